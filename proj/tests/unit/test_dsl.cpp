#include <doctest.h>

#include <string>

#include "diagen/dsl/domain.hpp"
#include "diagen/dsl/errors.hpp"
#include "diagen/dsl/style.hpp"
#include "diagen/dsl/substance.hpp"
#include "generators.hpp"

using namespace diagen;
using dsl::ErrorKind;

namespace {

const char* kDomain = R"(-- graph-ish toy domain
type Node
type Leaf <: Node
type Edge
predicate Linked(Node, Node)
predicate Heavy(Node)
function Connect(Node, Node) -> Edge
)";

dsl::DomainSchema schema() { return dsl::parse_domain(kDomain); }

ErrorKind substance_error(const std::string& src) {
  try {
    dsl::parse_substance(src, schema());
  } catch (const dsl::ParseError& e) {
    return e.kind();
  }
  FAIL("expected a parse error for: " << src);
  return ErrorKind::Syntax;
}

ErrorKind domain_error(const std::string& src) {
  try {
    dsl::parse_domain(src);
  } catch (const dsl::ParseError& e) {
    return e.kind();
  }
  FAIL("expected a parse error for: " << src);
  return ErrorKind::Syntax;
}

ErrorKind style_error(const std::string& src) {
  try {
    dsl::parse_style(src, schema());
  } catch (const dsl::ParseError& e) {
    return e.kind();
  }
  FAIL("expected a parse error for: " << src);
  return ErrorKind::Syntax;
}

}  // namespace

TEST_CASE("domain declarations and subtyping") {
  const auto d = schema();
  CHECK(d.types.size() == 3);
  CHECK(d.find_predicate("Linked")->params == std::vector<std::string>{"Node", "Node"});
  CHECK(d.find_function("Connect")->result == "Edge");
  CHECK(d.is_subtype("Leaf", "Node"));
  CHECK(d.is_subtype("Node", "Node"));
  CHECK_FALSE(d.is_subtype("Node", "Leaf"));
  CHECK_FALSE(d.is_subtype("Edge", "Node"));
}

TEST_CASE("domain canonical text re-parses to the same schema") {
  const auto d = schema();
  const auto again = dsl::parse_domain(d.to_text());
  CHECK(again.to_text() == d.to_text());
  CHECK(d.to_text().find("type Leaf <: Node") != std::string::npos);
}

TEST_CASE("domain errors") {
  CHECK(domain_error("type A\ntype A\n") == ErrorKind::DuplicateName);
  CHECK(domain_error("type A <: B\n") == ErrorKind::UndeclaredType);
  CHECK(domain_error("type A <: B\ntype B <: A\n") == ErrorKind::CyclicSubtype);
  CHECK(domain_error("predicate P(Missing)\n") == ErrorKind::UndeclaredType);
  CHECK(domain_error("type\n") == ErrorKind::Syntax);
}

TEST_CASE("parse error positions are 1-based line and column") {
  try {
    dsl::parse_substance("Node a\nLinked(a, zz)\n", schema());
    FAIL("no error");
  } catch (const dsl::ParseError& e) {
    CHECK(e.kind() == ErrorKind::UndeclaredIdentifier);
    CHECK(e.pos().line == 2);
    CHECK(e.pos().column == 11);
    CHECK(std::string(e.what()).starts_with("2:11: "));
  }
}

TEST_CASE("substance statements") {
  const auto p = dsl::parse_substance(
      "Node a, b\nLeaf c\nLinked(a, c) -- comment\nHeavy(b)\nEdge e := Connect(a, b)\nLabel a \"Alpha\"\nAutoLabel All\n",
      schema());
  // `Node a, b` expands to two declarations, `Edge e := ...` to a declaration
  // and a binding.
  REQUIRE(p.statements.size() == 8);
  CHECK(std::get<dsl::Decl>(p.statements[1].node) == dsl::Decl{"Node", "b"});
  CHECK(std::get<dsl::PredApp>(p.statements[3].node).args == std::vector<std::string>{"a", "c"});
  CHECK(std::get<dsl::Decl>(p.statements[5].node) == dsl::Decl{"Edge", "e"});
  CHECK(std::get<dsl::FuncBind>(p.statements[6].node).function == "Connect");
  CHECK(std::get<dsl::LabelStmt>(p.statements[7].node).text == "Alpha");
  CHECK(p.autolabel);

  const auto labels = dsl::label_map(p);
  REQUIRE(labels.size() == 4);  // a, b, c, e
  CHECK(labels[0] == std::pair<std::string, std::string>{"a", "Alpha"});
  CHECK(labels[1].second == "b");
}

TEST_CASE("substance type checking") {
  CHECK(substance_error("Nope a\n") == ErrorKind::UndeclaredType);
  CHECK(substance_error("Node a\nNode a\n") == ErrorKind::DuplicateName);
  CHECK(substance_error("Node a\nMissing(a)\n") == ErrorKind::UnknownPredicate);
  CHECK(substance_error("Node a\nLinked(a)\n") == ErrorKind::ArityMismatch);
  CHECK(substance_error("Edge e\nHeavy(e)\n") == ErrorKind::TypeMismatch);
  CHECK(substance_error("Node a\nEdge e := Nope(a)\n") == ErrorKind::UnknownFunction);
  CHECK(substance_error("Node a\nNode e := Connect(a, a)\n") == ErrorKind::TypeMismatch);
  CHECK(substance_error("Node a\nLinked(a, a\n") == ErrorKind::Syntax);
  // A Leaf is usable where a Node is expected.
  CHECK_NOTHROW(dsl::parse_substance("Leaf x\nNode y\nLinked(x, y)\n", schema()));
}

TEST_CASE("substance serialization is canonical and round-trips") {
  const auto p = dsl::parse_substance("Node   a ,b\r\n\r\nLinked( a,b )\nLabel b \"say \\\"hi\\\"\"\n", schema());
  const std::string text = dsl::serialize_substance(p);
  CHECK(text == "Node a\nNode b\nLinked(a, b)\nLabel b \"say \\\"hi\\\"\"");
  CHECK(dsl::parse_substance(text, schema()) == p);
}

TEST_CASE("statement_lines are sorted canonical statements") {
  const auto p = dsl::parse_substance("Node b\nNode a\nLinked(b, a)\nAutoLabel All\n", schema());
  CHECK(dsl::statement_lines(p) ==
        std::vector<std::string>{"AutoLabel All", "Linked(b, a)", "Node a", "Node b"});
}

TEST_CASE("is_statement_syntax") {
  CHECK(dsl::is_statement_syntax("Node a"));
  CHECK(dsl::is_statement_syntax("Linked(a, b)"));
  CHECK(dsl::is_statement_syntax("Edge e := Connect(a, b)"));
  CHECK_FALSE(dsl::is_statement_syntax(""));
  CHECK_FALSE(dsl::is_statement_syntax("-- only a comment"));
  CHECK_FALSE(dsl::is_statement_syntax("Here is the program:"));
}

TEST_CASE("property: serialize then parse is the identity on random programs") {
  const auto sets = dsl::parse_domain("type Set\npredicate IsSubset(Set, Set)\npredicate Disjoint(Set, Set)\n");
  testing::Rng rng(17);
  for (int i = 0; i < 300; ++i) {
    const std::string src = testing::random_set_program(rng, 6, 8);
    const auto p = dsl::parse_substance(src, sets);
    const auto q = dsl::parse_substance(dsl::serialize_substance(p), sets);
    CHECK(p == q);
    CHECK(dsl::serialize_substance(q) == dsl::serialize_substance(p));
  }
}

TEST_CASE("style sheet structure") {
  const auto s = dsl::parse_style(R"(canvas {
  width = 800
  height = 500
}

forall Node x {
  x.icon = Circle { center: (?, ?), r: 20 }
  x.text = Text { center: x.icon.center, string: x.label }
  ensure minSize(x.icon, 10)
}

forall Node a; Node b where Linked(a, b) {
  a.edge = Line { start: a.icon.center, end: b.icon.center }
  ensure disjoint(a.icon, b.icon, 5)
  encourage near(a.icon, b.icon)
}
)",
                                  schema());
  CHECK(s.canvas.width == 800);
  CHECK(s.canvas.height == 500);
  REQUIRE(s.rules.size() == 2);
  CHECK(s.rules[0].assignments.size() == 2);
  CHECK(s.rules[0].assignments[0].shape.kind == dsl::ShapeKind::Circle);
  CHECK(s.rules[0].assignments[0].shape.find("center")->kind == dsl::Expr::Kind::Vec);
  CHECK(s.rules[0].assignments[0].shape.find("r")->number == 20);
  REQUIRE(s.rules[1].where.has_value());
  CHECK(s.rules[1].where->name == "Linked");
  CHECK(s.rules[1].constraints.size() == 1);
  CHECK(s.rules[1].objectives.size() == 1);
  CHECK(s.rules[1].objectives[0].name == "near");
}

TEST_CASE("style errors") {
  CHECK(style_error("forall Nope x {\n}\n") == ErrorKind::UndeclaredType);
  CHECK(style_error("forall Node x {\n  x.icon = Blob { r: 1 }\n}\n") == ErrorKind::UnknownShape);
  CHECK(style_error("forall Node x {\n  x.icon = Circle { width: 1 }\n}\n") == ErrorKind::UnknownProperty);
  CHECK(style_error("forall Node x {\n  ensure hovering(x.icon)\n}\n") == ErrorKind::UnknownConstraint);
  CHECK(style_error("forall Node x {\n  encourage pretty(x.icon)\n}\n") == ErrorKind::UnknownObjective);
  CHECK(style_error("forall Node a; Node b where Missing(a, b) {\n}\n") == ErrorKind::UnknownPredicate);
  CHECK(style_error("canvas {\n  width = -3\n  height = 10\n}\n") == ErrorKind::InvalidCanvas);
}
