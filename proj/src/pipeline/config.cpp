#include "diagen/pipeline/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace diagen::pipeline {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool valid_key(std::string_view k) {
  if (k.empty()) return false;
  for (char c : k) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.') return false;
  }
  return true;
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError(fmt::format("config line {}: {}", line, msg));
}

// Parses a value and returns the unconsumed remainder.
ConfigValue parse_value(std::string_view v, int line, std::string_view& rest) {
  if (!v.empty() && v.front() == '"') {
    std::string out;
    std::size_t i = 1;
    for (; i < v.size() && v[i] != '"'; ++i) {
      if (v[i] == '\\' && i + 1 < v.size()) {
        const char e = v[++i];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(line, fmt::format("unknown escape \\{}", e));
        }
      } else {
        out += v[i];
      }
    }
    if (i >= v.size()) fail(line, "unterminated string");
    rest = v.substr(i + 1);
    return out;
  }
  const std::size_t end = v.find('#');
  const std::string_view word = trim(v.substr(0, end));
  rest = end == std::string_view::npos ? std::string_view{} : v.substr(end);
  if (word == "true") return true;
  if (word == "false") return false;
  double d = 0.0;
  const auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), d);
  if (ec != std::errc() || ptr != word.data() + word.size() || word.empty()) {
    fail(line, fmt::format("bad value '{}'", word));
  }
  return d;
}

}  // namespace

ConfigTable parse_config_table(std::string_view text) {
  ConfigTable table;
  table[""];
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      const std::size_t close = line.find(']');
      if (close == std::string_view::npos) fail(lineno, "unterminated section header");
      const std::string_view after = trim(line.substr(close + 1));
      if (!after.empty() && after.front() != '#') fail(lineno, "text after section header");
      section = std::string(trim(line.substr(1, close - 1)));
      if (!valid_key(section)) fail(lineno, fmt::format("bad section name '{}'", section));
      if (table.contains(section)) fail(lineno, fmt::format("section [{}] repeated", section));
      table[section];
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) fail(lineno, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    if (!valid_key(key)) fail(lineno, fmt::format("bad key '{}'", key));
    std::string_view rest;
    ConfigValue value = parse_value(trim(line.substr(eq + 1)), lineno, rest);
    rest = trim(rest);
    if (!rest.empty() && rest.front() != '#') fail(lineno, "trailing text after value");
    if (!table[section].emplace(key, std::move(value)).second) {
      fail(lineno, fmt::format("key '{}' repeated", key));
    }
  }
  return table;
}

namespace {

class Section {
 public:
  Section(std::string name, const std::map<std::string, ConfigValue>& values)
      : name_(std::move(name)), values_(values) {}

  std::optional<std::string> str(const std::string& key) {
    const ConfigValue* v = take(key);
    if (v == nullptr) return std::nullopt;
    if (const auto* s = std::get_if<std::string>(v)) return *s;
    throw ConfigError(fmt::format("{}: expected a string", where(key)));
  }
  std::optional<double> num(const std::string& key) {
    const ConfigValue* v = take(key);
    if (v == nullptr) return std::nullopt;
    if (const auto* d = std::get_if<double>(v)) return *d;
    throw ConfigError(fmt::format("{}: expected a number", where(key)));
  }
  std::optional<long long> integer(const std::string& key) {
    const auto d = num(key);
    if (!d) return std::nullopt;
    if (*d != static_cast<double>(static_cast<long long>(*d))) {
      throw ConfigError(fmt::format("{}: expected an integer", where(key)));
    }
    return static_cast<long long>(*d);
  }
  std::optional<bool> boolean(const std::string& key) {
    const ConfigValue* v = take(key);
    if (v == nullptr) return std::nullopt;
    if (const auto* b = std::get_if<bool>(v)) return *b;
    throw ConfigError(fmt::format("{}: expected true or false", where(key)));
  }
  void finish() const {
    for (const auto& [key, _] : values_) {
      if (!used_.contains(key)) throw ConfigError(fmt::format("unknown key {}", where(key)));
    }
  }

 private:
  const ConfigValue* take(const std::string& key) {
    const auto it = values_.find(key);
    if (it == values_.end()) return nullptr;
    used_.insert(key);
    return &it->second;
  }
  std::string where(const std::string& key) const {
    return name_.empty() ? key : fmt::format("[{}] {}", name_, key);
  }

  std::string name_;
  const std::map<std::string, ConfigValue>& values_;
  std::set<std::string> used_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

model::ModelEndpoint read_endpoint(const std::string& name, Section s) {
  model::ModelEndpoint e;
  e.name = s.str("name").value_or(name);
  e.base_url = s.str("base_url").value_or("");
  e.model = s.str("model").value_or("");
  e.temperature = s.num("temperature").value_or(0.0);
  e.max_tokens = static_cast<int>(s.integer("max_tokens").value_or(2048));
  e.api_key_ref = s.str("api_key_env").value_or("");
  const std::string mode = s.str("image_mode").value_or("data-uri");
  if (mode == "data-uri") {
    e.image_mode = model::ImageMode::DataUri;
  } else if (mode == "inline-svg") {
    e.image_mode = model::ImageMode::InlineSvg;
  } else {
    throw ConfigError(fmt::format("[{}] image_mode must be data-uri or inline-svg", name));
  }
  s.finish();
  return e;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void PipelineConfig::validate() const {
  if (domain_name.empty()) throw ConfigError("domain must be set");
  if (judges_per_round < 1) throw ConfigError("judges_per_round must be at least 1");
  if (max_rounds < 1) throw ConfigError("max_rounds must be at least 1");
  if (variations < 1) throw ConfigError("variations must be at least 1");
  if (!(threshold > 0.0 && threshold <= 1.0)) throw ConfigError("threshold must lie in (0, 1]");
  if (dedup_threshold < 1) throw ConfigError("dedup_threshold must be at least 1");
  if (ideas < 1) throw ConfigError("ideas must be at least 1");
  if (qa_per_diagram < 0) throw ConfigError("qa_per_diagram must be non-negative");
  if (workers < 0) throw ConfigError("workers must be non-negative");
  if (judge_pool.empty()) throw ConfigError("at least one [judge.<name>] section is required");
  if (judges_per_round > judge_pool.size()) {
    throw ConfigError(fmt::format("judges_per_round = {} exceeds the judge pool of {}", judges_per_round,
                                  judge_pool.size()));
  }
  try {
    solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[solver] ") + e.what());
  }
}

PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  const ConfigTable table = parse_config_table(text);
  PipelineConfig c;
  c.config_dir = base_dir;

  Section top("", table.at(""));
  c.domain_name = top.str("domain").value_or("");
  auto path = [&](const char* key, std::filesystem::path& out, bool required) {
    if (const auto v = top.str(key)) {
      out = resolve(base_dir, *v);
    } else if (required) {
      throw ConfigError(fmt::format("{} must be set", key));
    }
  };
  path("domain_file", c.domain_file, true);
  path("style_file", c.style_file, true);
  path("knowledge_prompt", c.knowledge_prompt_file, true);
  path("instructions", c.instructions_file, false);
  path("docs", c.docs_file, false);
  path("shots", c.shots_dir, true);
  path("captions", c.captions_file, true);
  path("prompt_dir", c.prompt_dir, false);
  c.output_dir = resolve(base_dir, top.str("output_dir").value_or("out"));
  if (const auto m = top.str("mock_script")) c.mock_script = resolve(base_dir, *m);

  auto count = [](std::optional<long long> v, long long fallback, const char* key) {
    const long long n = v.value_or(fallback);
    if (n < 0) throw ConfigError(fmt::format("{} must be non-negative", key));
    return n;
  };
  c.ideas = static_cast<std::size_t>(count(top.integer("ideas"), 10, "ideas"));
  c.judges_per_round = static_cast<std::size_t>(count(top.integer("judges_per_round"), 3, "judges_per_round"));
  c.max_rounds = static_cast<int>(count(top.integer("max_rounds"), 8, "max_rounds"));
  c.threshold = top.num("threshold").value_or(0.85);
  c.dedup_threshold = static_cast<std::size_t>(count(top.integer("dedup_threshold"), 2, "dedup_threshold"));
  c.variations = static_cast<int>(count(top.integer("variations"), 10, "variations"));
  c.base_seed = static_cast<std::uint64_t>(count(top.integer("base_seed"), 0, "base_seed"));
  c.qa_per_diagram = static_cast<int>(count(top.integer("qa_per_diagram"), 1, "qa_per_diagram"));
  c.knowledge_planning = top.boolean("knowledge_planning").value_or(true);
  c.code_planning = top.boolean("code_planning").value_or(true);
  c.early_stop = top.boolean("early_stop").value_or(true);
  c.self_verify = top.boolean("self_verify").value_or(true);
  c.workers = static_cast<int>(count(top.integer("workers"), 0, "workers"));
  top.finish();

  for (const auto& [name, values] : table) {
    if (name.empty()) continue;
    if (name == "planner") {
      c.planner = read_endpoint(name, Section(name, values));
    } else if (name == "coder") {
      c.coder = read_endpoint(name, Section(name, values));
    } else if (name == "qa") {
      c.qa = read_endpoint(name, Section(name, values));
    } else if (name == "eval") {
      c.eval = read_endpoint(name, Section(name, values));
    } else if (name.starts_with("judge.")) {
      c.judge_pool.push_back(read_endpoint(name.substr(6), Section(name, values)));
    } else if (name == "solver") {
      Section s(name, values);
      layout::SolverSettings& v = c.solver;
      v.c0 = s.num("c0").value_or(v.c0);
      v.gamma = s.num("gamma").value_or(v.gamma);
      v.max_outer = static_cast<int>(s.integer("max_outer").value_or(v.max_outer));
      v.penalty_tol = s.num("penalty_tol").value_or(v.penalty_tol);
      v.lbfgs_memory = static_cast<int>(s.integer("lbfgs_memory").value_or(v.lbfgs_memory));
      v.max_inner = static_cast<int>(s.integer("max_inner").value_or(v.max_inner));
      v.grad_tol = s.num("grad_tol").value_or(v.grad_tol);
      v.armijo = s.num("armijo").value_or(v.armijo);
      v.shrink = s.num("shrink").value_or(v.shrink);
      v.max_backtracks = static_cast<int>(s.integer("max_backtracks").value_or(v.max_backtracks));
      s.finish();
    } else {
      throw ConfigError(fmt::format("unknown section [{}]", name));
    }
  }
  if (c.planner.name.empty()) c.planner.name = "planner";
  if (c.coder.name.empty()) c.coder.name = "coder";
  if (c.qa.name.empty()) c.qa.name = "qa";
  if (c.eval.name.empty()) c.eval.name = "eval";
  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  const std::filesystem::path base = std::filesystem::absolute(path).parent_path();
  return parse_config(read_file(path), base);
}

}  // namespace diagen::pipeline
