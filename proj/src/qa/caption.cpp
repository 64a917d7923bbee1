#include "diagen/qa/caption.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace diagen::qa {

CaptionTemplates parse_caption_templates(std::string_view json_text) {
  CaptionTemplates t;
  try {
    const nlohmann::json j = nlohmann::json::parse(json_text);
    if (j.contains("types")) {
      for (const auto& [name, forms] : j.at("types").items()) {
        if (!forms.is_array() || forms.size() != 2) {
          throw CaptionError(fmt::format("caption type '{}' needs [singular, plural]", name));
        }
        t.types[name] = {forms[0].get<std::string>(), forms[1].get<std::string>()};
      }
    }
    if (j.contains("predicates")) t.predicates = j.at("predicates").get<std::map<std::string, std::string>>();
    if (j.contains("functions")) t.functions = j.at("functions").get<std::map<std::string, std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw CaptionError(std::string("caption templates: ") + e.what());
  }
  return t;
}

CaptionTemplates load_caption_templates(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CaptionError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_caption_templates(ss.str());
}

namespace {

std::string expand(std::string_view tmpl, const std::vector<std::string>& args) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] == '{') {
      const std::size_t close = tmpl.find('}', i);
      if (close != std::string_view::npos && close > i + 1) {
        const std::string_view key = tmpl.substr(i + 1, close - i - 1);
        if (key.find_first_not_of("0123456789") == std::string_view::npos) {
          const std::size_t k = std::stoul(std::string(key));
          if (k < args.size()) {
            out += args[k];
            i = close;
            continue;
          }
        }
      }
    }
    out += tmpl[i];
  }
  return out;
}

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out += (i + 1 == names.size()) ? " and " : ", ";
    out += names[i];
  }
  return out;
}

}  // namespace

Caption caption_from_substance(const dsl::SubstanceProgram& program, const dsl::DomainSchema&,
                               const CaptionTemplates& templates, std::string program_id) {
  Caption cap;
  cap.program_id = std::move(program_id);
  if (program.statements.empty()) {
    cap.text = "an empty diagram";
    return cap;
  }

  struct Group {
    std::string type;
    std::vector<std::string> names;
    std::vector<std::size_t> statements;
  };
  std::vector<Group> groups;
  std::vector<std::pair<std::size_t, std::string>> sentences;

  for (std::size_t i = 0; i < program.statements.size(); ++i) {
    const auto& node = program.statements[i].node;
    if (const auto* d = std::get_if<dsl::Decl>(&node)) {
      if (!templates.types.contains(d->type)) {
        throw CaptionError(fmt::format("no caption template for type '{}'", d->type));
      }
      auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) { return g.type == d->type; });
      if (it == groups.end()) it = groups.insert(groups.end(), Group{d->type, {}, {}});
      it->names.push_back(d->id);
      it->statements.push_back(i);
    } else if (const auto* p = std::get_if<dsl::PredApp>(&node)) {
      const auto t = templates.predicates.find(p->predicate);
      if (t == templates.predicates.end()) {
        throw CaptionError(fmt::format("no caption template for predicate '{}'", p->predicate));
      }
      sentences.emplace_back(i, expand(t->second, p->args));
    } else if (const auto* f = std::get_if<dsl::FuncBind>(&node)) {
      const auto t = templates.functions.find(f->function);
      if (t == templates.functions.end()) {
        throw CaptionError(fmt::format("no caption template for function '{}'", f->function));
      }
      std::vector<std::string> args{f->id};
      args.insert(args.end(), f->args.begin(), f->args.end());
      sentences.emplace_back(i, expand(t->second, args));
    } else if (const auto* l = std::get_if<dsl::LabelStmt>(&node)) {
      sentences.emplace_back(i, fmt::format("{} is labeled \"{}\"", l->id, l->text));
    }
  }

  std::vector<std::string> group_phrases;
  for (const Group& g : groups) {
    const auto& [singular, plural] = templates.types.at(g.type);
    const std::string phrase = fmt::format("{} {} named {}", g.names.size(),
                                           g.names.size() == 1 ? singular : plural, join_names(g.names));
    for (std::size_t s : g.statements) cap.derivation.emplace_back(s, phrase);
    group_phrases.push_back(phrase);
  }

  std::string text;
  if (!group_phrases.empty()) {
    text = "A diagram with ";
    for (std::size_t i = 0; i < group_phrases.size(); ++i) {
      if (i > 0) text += "; ";
      text += group_phrases[i];
    }
    text += ".";
  }
  for (const auto& [index, phrase] : sentences) {
    if (!text.empty()) text += ' ';
    text += phrase;
    text += '.';
    cap.derivation.emplace_back(index, phrase);
  }
  std::sort(cap.derivation.begin(), cap.derivation.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  cap.text = std::move(text);
  return cap;
}

}  // namespace diagen::qa
