#pragma once

#include <stdexcept>
#include <string>

#include "diagen/dsl/domain.hpp"
#include "diagen/dsl/style.hpp"
#include "diagen/dsl/substance.hpp"
#include "diagen/layout/problem.hpp"

namespace diagen::layout {

/// Lower bound on radius/width/height added to every circle and rectangle.
inline constexpr double kMinShapeSize = 5.0;
inline constexpr double kDefaultStrokeWidth = 1.5;

class CompileError : public std::runtime_error {
 public:
  enum class Kind {
    UnmatchedVariable,   // a path names a variable the match did not bind
    UnassignedField,     // a shape or property is referenced before assignment
    DuplicateField,      // the same v.field assigned by two rule applications
    UnsupportedShape,    // a term applied to a shape kind it is not defined for
    BadArgument,         // wrong expression form for a property or term argument
  };
  CompileError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Lowers a program and style sheet to a layout problem. Shapes are created in
/// statement order, then rule order. Every shape gets an implicit onCanvas
/// penalty, circles and rectangles an implicit minSize penalty.
LayoutProblem compile(const dsl::SubstanceProgram& program, const dsl::StyleSheet& style,
                      const dsl::DomainSchema& schema);

}  // namespace diagen::layout
