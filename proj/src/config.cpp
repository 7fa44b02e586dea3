#include "unipar/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "unipar/error.hpp"

namespace unipar {

namespace toml {

namespace {

class Parser {
 public:
  Parser(std::string_view line, int line_no) : s_(line), line_(line_no) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("config line " + std::to_string(line_) + ": " + what);
  }

  void skip_ws() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t')) ++i_;
  }

  bool at_end_or_comment() {
    skip_ws();
    return i_ >= s_.size() || s_[i_] == '#';
  }

  static bool key_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }

  std::string dotted_key() {
    std::string key;
    while (true) {
      skip_ws();
      const std::size_t start = i_;
      while (i_ < s_.size() && key_char(s_[i_])) ++i_;
      if (start == i_) fail("expected a key");
      key.append(s_.substr(start, i_ - start));
      skip_ws();
      if (i_ < s_.size() && s_[i_] == '.') {
        key += '.';
        ++i_;
        continue;
      }
      return key;
    }
  }

  bool consume(char c) {
    skip_ws();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }

  Value value() {
    skip_ws();
    if (i_ >= s_.size()) fail("missing value");
    Value v;
    v.line = line_;
    const char c = s_[i_];
    if (c == '"') {
      v.v = basic_string();
    } else if (c == '\'') {
      const std::size_t end = s_.find('\'', i_ + 1);
      if (end == std::string_view::npos) fail("unterminated string");
      v.v = std::string(s_.substr(i_ + 1, end - i_ - 1));
      i_ = end + 1;
    } else if (c == '[') {
      ++i_;
      Array items;
      while (!consume(']')) {
        items.push_back(value());
        if (std::holds_alternative<Array>(items.back().v)) fail("nested arrays are not supported");
        if (!consume(',')) {
          if (!consume(']')) fail("expected ',' or ']' in array");
          break;
        }
      }
      v.v = std::move(items);
    } else if (s_.substr(i_, 4) == "true") {
      v.v = true;
      i_ += 4;
    } else if (s_.substr(i_, 5) == "false") {
      v.v = false;
      i_ += 5;
    } else {
      const std::size_t start = i_;
      while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '.' || s_[i_] == '+' ||
                                s_[i_] == '-' || s_[i_] == '_')) {
        ++i_;
      }
      std::string num(s_.substr(start, i_ - start));
      std::erase(num, '_');
      if (num.empty()) fail("bad value");
      const char* b = num.data() + (num[0] == '+' ? 1 : 0);
      const char* e = num.data() + num.size();
      std::int64_t iv = 0;
      if (auto r = std::from_chars(b, e, iv); r.ec == std::errc() && r.ptr == e) {
        v.v = iv;
      } else {
        double dv = 0;
        auto rd = std::from_chars(b, e, dv);
        if (rd.ec != std::errc() || rd.ptr != e) fail("bad value '" + num + "'");
        v.v = dv;
      }
    }
    return v;
  }

  std::string basic_string() {
    ++i_;  // opening quote
    std::string out;
    while (true) {
      if (i_ >= s_.size()) fail("unterminated string");
      const char c = s_[i_++];
      if (c == '"') return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (i_ >= s_.size()) fail("unterminated escape");
      switch (const char e = s_[i_++]) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: fail(std::string("unsupported escape \\") + e);
      }
    }
  }

 private:
  std::string_view s_;
  std::size_t i_ = 0;
  int line_;
};

}  // namespace

std::map<std::string, Value> parse(std::string_view text) {
  std::map<std::string, Value> out;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    Parser p(line, line_no);
    if (p.at_end_or_comment()) continue;
    if (p.consume('[')) {
      section = p.dotted_key();
      if (!p.consume(']')) p.fail("expected ']'");
      if (!p.at_end_or_comment()) p.fail("trailing characters after section header");
      continue;
    }
    const std::string key = p.dotted_key();
    if (!p.consume('=')) p.fail("expected '=' after key '" + key + "'");
    Value v = p.value();
    if (!p.at_end_or_comment()) p.fail("trailing characters after value");
    const std::string full = section.empty() ? key : section + "." + key;
    if (!out.emplace(full, std::move(v)).second) p.fail("duplicate key '" + full + "'");
  }
  return out;
}

}  // namespace toml

namespace {

using toml::Value;

[[noreturn]] void type_error(const std::string& key, const Value& v, const char* want) {
  throw ConfigError("config line " + std::to_string(v.line) + ": '" + key + "' must be " + want);
}

std::string as_string(const std::string& key, const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v.v)) return *s;
  type_error(key, v, "a string");
}

std::int64_t as_int(const std::string& key, const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v.v)) return *i;
  type_error(key, v, "an integer");
}

std::size_t as_size(const std::string& key, const Value& v) {
  const auto i = as_int(key, v);
  if (i < 0) type_error(key, v, "non-negative");
  return static_cast<std::size_t>(i);
}

double as_double(const std::string& key, const Value& v) {
  if (const auto* d = std::get_if<double>(&v.v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v.v)) return static_cast<double>(*i);
  type_error(key, v, "a number");
}

bool as_bool(const std::string& key, const Value& v) {
  if (const auto* b = std::get_if<bool>(&v.v)) return *b;
  type_error(key, v, "true or false");
}

template <typename T, typename F>
std::vector<T> as_list(const std::string& key, const Value& v, F convert) {
  const auto* a = std::get_if<toml::Array>(&v.v);
  if (!a) type_error(key, v, "an array");
  std::vector<T> out;
  for (const Value& item : *a) out.push_back(convert(key, item));
  return out;
}

void apply_backend(BackendSpec& b, const std::string& field, const std::string& key, const Value& v) {
  if (field == "kind") {
    b.kind = as_string(key, v);
    if (b.kind != "mock" && b.kind != "http") throw ConfigError("'" + key + "' must be \"mock\" or \"http\"");
  } else if (field == "script") {
    b.script = as_string(key, v);
  } else if (field == "miss_policy") {
    b.miss_policy = as_string(key, v);
    if (b.miss_policy != "error" && b.miss_policy != "echo") throw ConfigError("'" + key + "' must be \"error\" or \"echo\"");
  } else if (field == "base_url") {
    b.http.base_url = as_string(key, v);
  } else if (field == "path") {
    b.http.path = as_string(key, v);
  } else if (field == "model") {
    b.http.model = as_string(key, v);
  } else if (field == "auth_header") {
    b.http.auth_header = as_string(key, v);
  } else if (field == "auth_prefix") {
    b.http.auth_prefix = as_string(key, v);
  } else if (field == "context_tokens") {
    b.http.context_tokens = as_size(key, v);
  } else if (field == "timeout") {
    b.http.timeout = std::chrono::seconds(as_int(key, v));
  } else {
    throw ConfigError("config line " + std::to_string(v.line) + ": unknown key '" + key + "'");
  }
}

}  // namespace

AppConfig apply_config(std::string_view text, AppConfig c) {
  const auto entries = toml::parse(text);
  using Setter = std::function<void(const std::string&, const Value&)>;
  const std::map<std::string, Setter> setters{
      {"run_id", [&](auto& k, auto& v) { c.run_id = as_string(k, v); }},
      {"seed", [&](auto& k, auto& v) { c.seed = static_cast<std::uint64_t>(as_int(k, v)); }},
      {"parallelism", [&](auto& k, auto& v) { c.parallelism = as_size(k, v); }},
      {"runs_dir", [&](auto& k, auto& v) { c.runs_dir = as_string(k, v); }},
      {"corpus.root", [&](auto& k, auto& v) { c.corpus_root = as_string(k, v); }},
      {"corpus.dir", [&](auto& k, auto& v) { c.corpus_dir = as_string(k, v); }},
      {"corpus.split", [&](auto& k, auto& v) { c.split_file = as_string(k, v); }},
      {"corpus.cutoff", [&](auto& k, auto& v) { c.cutoff = as_size(k, v); }},
      {"corpus.counter", [&](auto& k, auto& v) { c.counter = as_string(k, v); }},
      {"corpus.vocab", [&](auto& k, auto& v) { c.vocab = as_string(k, v); }},
      {"corpus.verify", [&](auto& k, auto& v) { c.verify = as_bool(k, v); }},
      {"corpus.categories", [&](auto& k, auto& v) { c.categories = as_string(k, v); }},
      {"corpus.ratio", [&](auto& k, auto& v) { c.ratio = as_string(k, v); }},
      {"toolchain.compile_timeout",
       [&](auto& k, auto& v) { c.toolchain.compile_timeout = std::chrono::seconds(as_int(k, v)); }},
      {"toolchain.run_timeout", [&](auto& k, auto& v) { c.toolchain.run_timeout = std::chrono::seconds(as_int(k, v)); }},
      {"toolchain.output_cap", [&](auto& k, auto& v) { c.toolchain.output_cap = as_size(k, v); }},
      {"toolchain.device_slots",
       [&](auto& k, auto& v) { c.toolchain.device_slots = static_cast<unsigned>(as_size(k, v)); }},
      {"toolchain.serial.cmd", [&](auto& k, auto& v) { c.toolchain.commands[Api::Serial] = as_string(k, v); }},
      {"toolchain.openmp.cmd", [&](auto& k, auto& v) { c.toolchain.commands[Api::OpenMP] = as_string(k, v); }},
      {"toolchain.cuda.cmd", [&](auto& k, auto& v) { c.toolchain.commands[Api::CUDA] = as_string(k, v); }},
      {"toolchain.detector.pass",
       [&](auto& k, auto& v) { c.toolchain.detector.pass_patterns = as_list<std::string>(k, v, as_string); }},
      {"toolchain.detector.fail",
       [&](auto& k, auto& v) { c.toolchain.detector.fail_patterns = as_list<std::string>(k, v, as_string); }},
      {"generation.temperature", [&](auto& k, auto& v) { c.pipeline.gen.temperature = as_double(k, v); }},
      {"generation.top_p", [&](auto& k, auto& v) { c.pipeline.gen.top_p = as_double(k, v); }},
      {"generation.max_tokens", [&](auto& k, auto& v) { c.pipeline.gen.max_tokens = static_cast<int>(as_int(k, v)); }},
      {"generation.model_id", [&](auto& k, auto& v) { c.pipeline.gen.model_id = as_string(k, v); }},
      {"pipeline.shots", [&](auto& k, auto& v) { c.pipeline.shots = static_cast<int>(as_int(k, v)); }},
      {"pipeline.compile_rounds", [&](auto& k, auto& v) { c.pipeline.compile_rounds = static_cast<int>(as_int(k, v)); }},
      {"pipeline.exec_rounds", [&](auto& k, auto& v) { c.pipeline.exec_rounds = static_cast<int>(as_int(k, v)); }},
      {"pipeline.transplant_rounds",
       [&](auto& k, auto& v) { c.pipeline.transplant_rounds = static_cast<int>(as_int(k, v)); }},
      {"pipeline.agentic", [&](auto& k, auto& v) { c.pipeline.agentic = as_bool(k, v); }},
      {"pipeline.diagnostics_budget", [&](auto& k, auto& v) { c.pipeline.diagnostics_budget = as_size(k, v); }},
      {"pipeline.retries", [&](auto& k, auto& v) { c.pipeline.retry.retries = static_cast<int>(as_int(k, v)); }},
      {"pipeline.backoff_ms",
       [&](auto& k, auto& v) { c.pipeline.retry.backoff_base = std::chrono::milliseconds(as_int(k, v)); }},
      {"sweep.temperatures", [&](auto& k, auto& v) { c.sweep.temperatures = as_list<double>(k, v, as_double); }},
      {"sweep.max_tokens",
       [&](auto& k, auto& v) {
         c.sweep.max_tokens = as_list<int>(k, v, [](auto& kk, auto& vv) { return static_cast<int>(as_int(kk, vv)); });
       }},
      {"sweep.top_p", [&](auto& k, auto& v) { c.sweep.top_p = as_double(k, v); }},
      {"sweep.shots",
       [&](auto& k, auto& v) {
         c.sweep.shots = as_list<int>(k, v, [](auto& kk, auto& vv) { return static_cast<int>(as_int(kk, vv)); });
       }},
      {"prompts.dir", [&](auto& k, auto& v) { c.prompts_dir = as_string(k, v); }},
  };

  for (const auto& [key, value] : entries) {
    const std::string leaf = key.substr(key.rfind('.') + 1);
    if (leaf == "api_key" || leaf == "key" || leaf == "secret" || leaf == "password" || leaf == "token") {
      throw ConfigError("config line " + std::to_string(value.line) + ": '" + key +
                        "' looks like a credential; set UNIPAR_API_KEY in the environment instead");
    }
    if (const auto it = setters.find(key); it != setters.end()) {
      it->second(key, value);
    } else if (key.starts_with("backend.questioner.")) {
      apply_backend(c.questioner, key.substr(19), key, value);
    } else if (key.starts_with("backend.repair.")) {
      apply_backend(c.repair, key.substr(15), key, value);
      c.repair_configured = true;
    } else {
      throw ConfigError("config line " + std::to_string(value.line) + ": unknown key '" + key + "'");
    }
  }
  c.pipeline.validate();
  return c;
}

AppConfig load_config(const std::filesystem::path& file, AppConfig base) {
  std::ifstream in(file);
  if (!in) throw ConfigError("config file not found: " + file.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return apply_config(buffer.str(), std::move(base));
}

namespace {

nlohmann::json backend_json(const BackendSpec& b) {
  nlohmann::json j{{"kind", b.kind}};
  if (b.kind == "mock") {
    j["script"] = b.script;
    j["miss_policy"] = b.miss_policy;
  } else {
    j["base_url"] = b.http.base_url;
    j["path"] = b.http.path;
    j["model"] = b.http.model;
    j["auth_header"] = b.http.auth_header;
    j["context_tokens"] = b.http.context_tokens;
    j["timeout_s"] = b.http.timeout.count();
  }
  return j;
}

}  // namespace

nlohmann::json to_json(const AppConfig& c) {
  nlohmann::json commands = nlohmann::json::object();
  for (const auto& [api, cmd] : c.toolchain.commands) commands[std::string(api_key(api))] = cmd;
  return nlohmann::json{
      {"run_id", c.run_id},
      {"seed", c.seed},
      {"parallelism", c.parallelism},
      {"corpus",
       {{"root", c.corpus_root},
        {"dir", c.corpus_dir},
        {"split", c.split_file},
        {"cutoff", c.cutoff},
        {"counter", c.counter},
        {"vocab", c.vocab},
        {"verify", c.verify},
        {"ratio", c.ratio}}},
      {"toolchain",
       {{"commands", commands},
        {"compile_timeout_s", c.toolchain.compile_timeout.count()},
        {"run_timeout_s", c.toolchain.run_timeout.count()},
        {"output_cap", c.toolchain.output_cap},
        {"device_slots", c.toolchain.device_slots},
        {"detector",
         {{"pass", c.toolchain.detector.pass_patterns}, {"fail", c.toolchain.detector.fail_patterns}}}}},
      {"pipeline", to_json(c.pipeline)},
      {"backend",
       {{"questioner", backend_json(c.questioner)},
        {"repair", c.repair_configured ? backend_json(c.repair) : nlohmann::json("questioner")}}},
      {"prompts_dir", c.prompts_dir}};
}

}  // namespace unipar
