#include "unipar/prompting.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "unipar/error.hpp"
#include "unipar/random.hpp"
#include "unipar/tokens.hpp"

namespace unipar {

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void finalize(PromptBundle& bundle) {
  bundle.rendered_token_estimate = approx_tokens(bundle.transcript().size());
}

bool code_like(std::string_view line) { return line.find_first_of(";{}#") != std::string_view::npos; }

bool blank_text(std::string_view text) {
  return std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); });
}

struct Line {
  std::size_t begin;  // offset of first byte
  std::size_t end;    // offset of '\n' or text end
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.push_back({start, text.size()});
      break;
    }
    lines.push_back({start, nl});
    start = nl + 1;
  }
  return lines;
}

bool is_fence(std::string_view line) {
  const auto first = line.find_first_not_of(" \t");
  return first != std::string_view::npos && line.substr(first, 3) == "```";
}

}  // namespace

std::string PromptBundle::transcript() const {
  std::string out;
  if (!system.empty()) out += "System: " + system + "\n";
  for (const Turn& turn : turns) {
    out += turn.role == Turn::Role::instruction ? "Instruction: " : "Assistant: ";
    out += turn.text;
    out += "\n";
  }
  return out;
}

PromptTemplates PromptTemplates::with_overrides(const std::filesystem::path& dir) {
  PromptTemplates t;
  const std::map<std::string, std::string*> slots{
      {"system", &t.system},
      {"instruction", &t.instruction},
      {"shot_response", &t.shot_response},
      {"finetune_response", &t.finetune_response},
      {"compile_repair", &t.compile_repair},
      {"runtime_repair", &t.runtime_repair},
  };
  if (!std::filesystem::is_directory(dir)) throw ConfigError("template directory not found: " + dir.string());
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".txt") continue;
    const auto slot = slots.find(entry.path().stem().string());
    if (slot == slots.end()) throw ConfigError("unknown prompt template file: " + entry.path().string());
    std::string text = read_text(entry.path());
    // Editors add a final newline; templates are single logical blocks.
    if (!text.empty() && text.back() == '\n') text.pop_back();
    *slot->second = std::move(text);
  }
  return t;
}

std::string substitute(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const std::size_t open = tmpl.find('{', pos);
    if (open == std::string_view::npos) break;
    const std::size_t close = tmpl.find('}', open + 1);
    if (close == std::string_view::npos) break;
    out.append(tmpl.substr(pos, open - pos));
    const auto it = values.find(std::string(tmpl.substr(open + 1, close - open - 1)));
    if (it != values.end()) {
      out += it->second;
      pos = close + 1;
    } else {
      out += '{';
      pos = open + 1;
    }
  }
  out.append(tmpl.substr(pos));
  return out;
}

PromptBundle render_translation_prompt(const TranslationTask& task, std::span<const ShotExample> shots,
                                       const PromptTemplates& templates) {
  PromptBundle bundle;
  bundle.system = templates.system;
  for (const ShotExample& shot : shots) {
    if (shot.from_api != task.direction.from || shot.to_api != task.direction.to) {
      throw Error("shot example '" + shot.benchmark_id + "' is " +
                  direction_label({shot.from_api, shot.to_api}) + " but the task is " +
                  direction_label(task.direction));
    }
    const std::map<std::string, std::string> values{
        {"from_api", std::string(api_name(shot.from_api))},
        {"to_api", std::string(api_name(shot.to_api))},
        {"from_code", shot.from_code},
        {"to_code", shot.to_code},
    };
    bundle.turns.push_back({Turn::Role::instruction, substitute(templates.instruction, values)});
    bundle.turns.push_back({Turn::Role::assistant, substitute(templates.shot_response, values)});
  }
  const std::map<std::string, std::string> values{
      {"from_api", std::string(api_name(task.direction.from))},
      {"to_api", std::string(api_name(task.direction.to))},
      {"from_code", task.source_code},
  };
  bundle.turns.push_back({Turn::Role::instruction, substitute(templates.instruction, values)});
  finalize(bundle);
  return bundle;
}

std::vector<ShotExample> select_shots(std::span<const ShotExample> candidates, Direction direction, int n,
                                      std::uint64_t seed, std::string_view exclude_benchmark, int max_shots) {
  if (n < 0 || n > max_shots) {
    throw Error("shot count " + std::to_string(n) + " outside [0, " + std::to_string(max_shots) + "]");
  }
  if (n == 0) return {};
  std::vector<const ShotExample*> pool;
  for (const ShotExample& c : candidates) {
    if (c.from_api == direction.from && c.to_api == direction.to && c.benchmark_id != exclude_benchmark) {
      pool.push_back(&c);
    }
  }
  if (pool.size() < static_cast<std::size_t>(n)) {
    throw Error("need " + std::to_string(n) + " shot examples for " + direction_label(direction) + " but only " +
                std::to_string(pool.size()) + " are available");
  }
  // Canonical order first so the sample depends only on the candidate set and seed.
  std::sort(pool.begin(), pool.end(),
            [](const ShotExample* a, const ShotExample* b) { return a->benchmark_id < b->benchmark_id; });
  Rng rng(seed);
  std::vector<ShotExample> picked;
  for (int i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
    picked.push_back(*pool[i]);
  }
  return picked;
}

std::string truncate_tail(std::string_view text, std::size_t budget) {
  if (text.size() <= budget) return std::string(text);
  std::size_t start = text.size() - budget;
  while (start < text.size() && (static_cast<unsigned char>(text[start]) & 0xC0) == 0x80) ++start;
  return std::string(text.substr(start));
}

PromptBundle render_repair_prompt(RepairKind kind, std::string_view current_code, std::string_view diagnostics,
                                  Direction direction, std::size_t budget, const PromptTemplates& templates) {
  PromptBundle bundle;
  bundle.system = templates.system;
  const std::map<std::string, std::string> values{
      {"from_api", std::string(api_name(direction.from))},
      {"to_api", std::string(api_name(direction.to))},
      {"code", std::string(current_code)},
      {"diagnostics", truncate_tail(diagnostics, budget)},
  };
  const std::string& tmpl = kind == RepairKind::compile ? templates.compile_repair : templates.runtime_repair;
  bundle.turns.push_back({Turn::Role::instruction, substitute(tmpl, values)});
  finalize(bundle);
  return bundle;
}

std::string extract_code(std::string_view response, Api /*target*/) {
  if (blank_text(response)) throw LlmError(LlmError::Kind::EmptyCompletion, "model returned an empty completion");

  const std::vector<Line> lines = split_lines(response);
  std::string_view best;
  bool found = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!is_fence(response.substr(lines[i].begin, lines[i].end - lines[i].begin))) continue;
    std::size_t j = i + 1;
    while (j < lines.size() && !is_fence(response.substr(lines[j].begin, lines[j].end - lines[j].begin))) ++j;
    const std::size_t body_begin = std::min(lines[i].end + 1, response.size());
    // The newline before the closing fence belongs to the fence.
    std::size_t body_end = j < lines.size() ? lines[j].begin : response.size();
    if (j < lines.size() && body_end > body_begin) --body_end;
    const std::string_view body = response.substr(body_begin, body_end - body_begin);
    if (!found || body.size() > best.size()) {
      best = body;
      found = true;
    }
    i = j;
  }
  if (found && !blank_text(best)) return std::string(best);

  std::size_t first = lines.size();
  std::size_t last = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!code_like(response.substr(lines[i].begin, lines[i].end - lines[i].begin))) continue;
    first = std::min(first, i);
    last = i;
  }
  if (first == lines.size()) return std::string(response);
  std::size_t end = lines[last].end;
  if (end < response.size()) ++end;  // keep the newline ending the last code line
  return std::string(response.substr(lines[first].begin, end - lines[first].begin));
}

FinetuneRecord render_finetune_record(const ShotExample& pair, const PromptTemplates& templates) {
  const std::map<std::string, std::string> values{
      {"from_api", std::string(api_name(pair.from_api))},
      {"to_api", std::string(api_name(pair.to_api))},
      {"from_code", pair.from_code},
      {"to_code", pair.to_code},
  };
  return FinetuneRecord{templates.system, substitute(templates.instruction, values),
                        substitute(templates.finetune_response, values)};
}

}  // namespace unipar
