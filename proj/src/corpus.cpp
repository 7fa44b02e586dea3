#include "unipar/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <sstream>

#include "unipar/error.hpp"
#include "unipar/lexer.hpp"
#include "unipar/parallel.hpp"
#include "unipar/random.hpp"
#include "unipar/toolchain.hpp"

namespace unipar {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(Verification v) {
  switch (v) {
    case Verification::unverified: return "unverified";
    case Verification::passed: return "passed";
    case Verification::failed: return "failed";
  }
  return "?";
}

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<std::string> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return buffer.str();
}

void write_file(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw CorpusError("cannot write " + path.string());
}

std::string member_label(const std::string& id, Api api) { return id + "/" + std::string(api_key(api)); }

Verification verification_from(const std::string& text) {
  for (Verification v : {Verification::unverified, Verification::passed, Verification::failed}) {
    if (text == to_string(v)) return v;
  }
  throw CorpusError("unknown verification state '" + text + "'");
}

}  // namespace

ScanResult scan_benchmarks(const fs::path& root, const std::set<Api>& apis, const ScanOptions& options) {
  if (!fs::is_directory(root)) throw CorpusError("benchmark root does not exist: " + root.string());

  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());

  ScanResult result;
  for (const fs::path& dir : dirs) {
    const std::string name = dir.filename().string();
    // Longest matching suffix wins.
    const std::pair<const std::string, Api>* match = nullptr;
    for (const auto& entry : options.suffixes) {
      if (name.size() > entry.first.size() && name.ends_with(entry.first) &&
          (!match || entry.first.size() > match->first.size())) {
        match = &entry;
      }
    }
    if (!match || !apis.contains(match->second)) continue;
    const std::string benchmark_id = name.substr(0, name.size() - match->first.size());

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      const std::string ext = lower(entry.path().extension().string());
      if (std::find(options.source_extensions.begin(), options.source_extensions.end(), ext) !=
          options.source_extensions.end()) {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());

    std::vector<fs::path> candidates = files;
    if (candidates.size() > 1) {
      std::erase_if(candidates, [&](const fs::path& p) {
        const std::string stem = lower(p.stem().string());
        return std::any_of(options.excluded_stems.begin(), options.excluded_stems.end(),
                           [&](const std::string& ex) { return lower(ex) == stem; });
      });
    }
    const fs::path rel_dir = fs::relative(dir, root);
    if (candidates.size() != 1) {
      std::string reason;
      if (files.empty()) {
        reason = "no source files";
      } else {
        reason = "ambiguous primary file among:";
        for (const fs::path& f : candidates.empty() ? files : candidates) reason += " " + f.filename().string();
      }
      result.report.skipped.push_back({rel_dir, reason});
      continue;
    }

    auto text = read_file(candidates.front());
    if (!text) {
      result.report.warnings.push_back("unreadable file skipped: " + fs::relative(candidates.front(), root).string());
      continue;
    }
    BenchmarkSource src;
    src.benchmark_id = benchmark_id;
    src.api = match->second;
    src.main_file_path = fs::relative(candidates.front(), root);
    src.source_text = std::move(*text);
    result.sources.push_back(std::move(src));
  }
  std::sort(result.sources.begin(), result.sources.end(), [](const BenchmarkSource& a, const BenchmarkSource& b) {
    return std::tie(a.benchmark_id, a.api) < std::tie(b.benchmark_id, b.api);
  });
  return result;
}

namespace {

// True when the logical line is `# pragma omp ...`.
bool is_omp_pragma(std::string_view line) {
  std::size_t i = line.find_first_not_of(" \t");
  if (i == std::string_view::npos || line[i] != '#') return false;
  i = line.find_first_not_of(" \t", i + 1);
  if (i == std::string_view::npos || line.substr(i, 6) != "pragma") return false;
  i += 6;
  const std::size_t j = line.find_first_not_of(" \t", i);
  if (j == i || j == std::string_view::npos || line.substr(j, 3) != "omp") return false;
  const std::size_t k = j + 3;
  return k == line.size() || !(std::isalnum(static_cast<unsigned char>(line[k])) || line[k] == '_');
}

bool is_omp_include(std::string_view line) {
  std::size_t i = line.find_first_not_of(" \t");
  if (i == std::string_view::npos || line[i] != '#') return false;
  i = line.find_first_not_of(" \t", i + 1);
  if (i == std::string_view::npos || line.substr(i, 7) != "include") return false;
  std::string rest(line.substr(i + 7));
  std::erase_if(rest, [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
  return rest == "<omp.h>" || rest == "\"omp.h\"";
}

}  // namespace

SerialDerivation derive_serial(std::string_view openmp_source) {
  SerialDerivation out;
  std::string& result = out.source;
  result.reserve(openmp_source.size());

  std::size_t pos = 0;
  while (pos < openmp_source.size()) {
    // Gather one logical line (physical lines joined by trailing backslashes).
    std::size_t end = pos;
    std::string logical;
    while (true) {
      std::size_t nl = openmp_source.find('\n', end);
      const bool last = nl == std::string_view::npos;
      std::string_view physical = openmp_source.substr(end, (last ? openmp_source.size() : nl) - end);
      if (!physical.empty() && physical.back() == '\r') physical.remove_suffix(1);
      end = last ? openmp_source.size() : nl + 1;
      if (!physical.empty() && physical.back() == '\\' && !last) {
        logical.append(physical.substr(0, physical.size() - 1));
        continue;
      }
      logical.append(physical);
      break;
    }
    if (is_omp_pragma(logical)) {
      ++out.pragmas_removed;
    } else if (is_omp_include(logical)) {
      ++out.omp_includes_removed;
    } else {
      result.append(openmp_source.substr(pos, end - pos));
    }
    pos = end;
  }

  try {
    const auto tokens = lex::tokenize(result);
    std::set<std::string> calls;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
      if (tokens[i].kind == lex::TokenKind::Identifier && tokens[i].text.starts_with("omp_") &&
          tokens[i + 1].is("(")) {
        calls.emplace(tokens[i].text);
      }
    }
    out.runtime_calls.assign(calls.begin(), calls.end());
  } catch (const LexError&) {
    // Unlexable input: the derivation itself is line-based and still valid.
  }
  return out;
}

std::size_t count_tokens(std::string_view source_text, const TokenCounter& counter) {
  return counter.count(source_text);
}

PruneResult prune_by_tokens(std::vector<BenchmarkSource> sources, std::size_t cutoff) {
  PruneResult result;
  for (BenchmarkSource& s : sources) {
    (s.token_count <= cutoff ? result.kept : result.dropped).push_back(std::move(s));
  }
  return result;
}

VerifyResult verify_kernel(const BenchmarkSource& source, const Toolchain& toolchain, std::chrono::seconds timeout,
                           const fs::path& workspace) {
  VerifyResult out;
  if (!toolchain.available(source.api)) {
    out.verdict = Verification::unverified;
    out.diagnostics = "warning: no " + std::string(api_name(source.api)) + " toolchain ('" +
                      toolchain.program(source.api) + "') available; left unverified";
    return out;
  }
  const CompileResult compiled = toolchain.compile(source.source_text, source.api, workspace);
  if (compiled.status == CompileStatus::toolchain_missing) {
    out.verdict = Verification::unverified;
    out.diagnostics = compiled.diagnostics;
    return out;
  }
  if (compiled.status != CompileStatus::ok) {
    out.verdict = Verification::failed;
    out.diagnostics = compiled.diagnostics;
    return out;
  }
  const RunResult run = toolchain.run_and_verify(*compiled.artifact_path, timeout, {},
                                                 toolchain.detector_for(source.benchmark_id), source.api);
  out.verdict = run.verdict == Verdict::pass ? Verification::passed : Verification::failed;
  out.diagnostics = "verdict " + std::string(to_string(run.verdict)) + ", exit " + std::to_string(run.exit_code) +
                    "\n" + run.stdout_text + run.stderr_text;
  return out;
}

std::vector<KernelTuple> build_tuples(std::vector<BenchmarkSource> sources, const TupleOptions& options) {
  std::map<std::string, KernelTuple> groups;
  for (BenchmarkSource& s : sources) {
    KernelTuple& tuple = groups[s.benchmark_id];
    tuple.benchmark_id = s.benchmark_id;
    const auto existing = tuple.members.find(s.api);
    if (existing != tuple.members.end()) {
      throw CorpusError("duplicate " + std::string(api_name(s.api)) + " source for benchmark '" + s.benchmark_id +
                        "': " + existing->second.main_file_path.string() + " and " + s.main_file_path.string());
    }
    tuple.members.emplace(s.api, std::move(s));
  }

  std::vector<KernelTuple> tuples;
  for (auto& [id, tuple] : groups) {
    const bool has_omp = tuple.members.contains(Api::OpenMP);
    if (!has_omp && !tuple.members.contains(Api::CUDA)) continue;
    if (options.derive_serial && has_omp && !tuple.members.contains(Api::Serial)) {
      const BenchmarkSource& omp = tuple.members.at(Api::OpenMP);
      SerialDerivation derived = derive_serial(omp.source_text);
      BenchmarkSource serial;
      serial.benchmark_id = id;
      serial.api = Api::Serial;
      serial.main_file_path = omp.main_file_path;
      serial.token_count = options.counter.count(derived.source);
      serial.source_text = std::move(derived.source);
      serial.notes.push_back("derived from OpenMP: removed " + std::to_string(derived.pragmas_removed) +
                             " pragma(s), " + std::to_string(derived.omp_includes_removed) + " omp.h include(s)");
      if (!derived.runtime_calls.empty()) {
        std::string calls;
        for (const std::string& c : derived.runtime_calls) calls += (calls.empty() ? "" : ", ") + c;
        serial.notes.push_back("retains OpenMP runtime calls: " + calls);
      }
      tuple.members.emplace(Api::Serial, std::move(serial));
    }
    if (const auto cat = options.categories.find(id); cat != options.categories.end()) tuple.category = cat->second;
    tuples.push_back(std::move(tuple));
  }
  return tuples;
}

SplitRatio parse_ratio(std::string_view text) {
  auto parse_uint = [&](std::string_view digits) -> std::uint64_t {
    if (digits.empty() || digits.size() > 18 ||
        !std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); })) {
      throw ConfigError("invalid split ratio '" + std::string(text) + "'");
    }
    return std::stoull(std::string(digits));
  };
  SplitRatio r;
  if (const auto colon = text.find(':'); colon != std::string_view::npos) {
    r.train = parse_uint(text.substr(0, colon));
    r.test = parse_uint(text.substr(colon + 1));
  } else {
    const auto dot = text.find('.');
    const std::string_view whole = text.substr(0, dot);
    const std::string_view frac = dot == std::string_view::npos ? std::string_view() : text.substr(dot + 1);
    if ((!whole.empty() && parse_uint(whole) != 0) || frac.empty()) {
      throw ConfigError("split ratio fraction must be in (0, 1): '" + std::string(text) + "'");
    }
    std::uint64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const std::uint64_t num = parse_uint(frac);
    r.train = num;
    r.test = den - num;
  }
  if (r.train == 0 || r.test == 0) throw ConfigError("split ratio needs nonzero train and test parts");
  const std::uint64_t g = std::gcd(r.train, r.test);
  r.train /= g;
  r.test /= g;
  return r;
}

std::vector<std::string> SplitManifest::ids(Direction d, bool test_half) const {
  std::vector<std::string> out;
  for (const SplitEntry& e : test_half ? test : train) {
    if (e.direction == d) out.push_back(e.benchmark_id);
  }
  return out;
}

std::size_t test_size(std::size_t n, SplitRatio ratio) {
  if (n < 2) return 0;
  const std::uint64_t parts = ratio.train + ratio.test;
  const std::uint64_t k = (2 * n * ratio.test + parts) / (2 * parts);
  return static_cast<std::size_t>(std::clamp<std::uint64_t>(k, 1, n - 1));
}

SplitManifest split_tasks(const std::map<Direction, std::vector<std::string>>& ids_by_direction, SplitRatio ratio,
                          std::uint64_t seed) {
  SplitManifest m;
  m.seed = seed;
  m.ratio = ratio;
  for (const auto& [direction, raw_ids] : ids_by_direction) {
    std::vector<std::string> ids = raw_ids;
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (ids.size() < 2) {
      m.warnings.push_back(direction_slug(direction) + ": " + std::to_string(ids.size()) +
                           " task(s); placed wholly in train");
      for (const std::string& id : ids) m.train.push_back({id, direction});
      continue;
    }
    Rng rng(seed ^ fnv1a(direction_slug(direction)));
    rng.shuffle(std::span<std::string>(ids));
    const std::size_t k = test_size(ids.size(), ratio);
    std::vector<std::string> test(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k));
    std::vector<std::string> train(ids.begin() + static_cast<std::ptrdiff_t>(k), ids.end());
    std::sort(test.begin(), test.end());
    std::sort(train.begin(), train.end());
    for (const std::string& id : train) m.train.push_back({id, direction});
    for (const std::string& id : test) m.test.push_back({id, direction});
  }
  return m;
}

SplitManifest split_corpus(const std::vector<KernelTuple>& tuples, std::span<const Direction> directions,
                           SplitRatio ratio, std::uint64_t seed) {
  std::map<Direction, std::vector<std::string>> ids;
  for (Direction d : directions) {
    auto& list = ids[d];
    for (const KernelTuple& t : tuples) {
      if (t.members.contains(d.from) && t.members.contains(d.to)) list.push_back(t.benchmark_id);
    }
  }
  return split_tasks(ids, ratio, seed);
}

std::vector<TranslationTask> make_tasks(const std::vector<KernelTuple>& tuples, Direction direction) {
  std::vector<TranslationTask> tasks;
  for (const KernelTuple& t : tuples) {
    const auto from = t.members.find(direction.from);
    const auto to = t.members.find(direction.to);
    if (from == t.members.end() || to == t.members.end()) continue;
    tasks.push_back({t.benchmark_id, direction, from->second.source_text, to->second.source_text,
                     t.category.value_or("")});
  }
  return tasks;
}

std::vector<TranslationTask> tasks_for(const std::vector<KernelTuple>& tuples, const SplitManifest& split,
                                       bool test_half, std::optional<Direction> direction) {
  std::map<std::string, const KernelTuple*> by_id;
  for (const KernelTuple& t : tuples) by_id[t.benchmark_id] = &t;
  std::vector<TranslationTask> tasks;
  for (const SplitEntry& e : test_half ? split.test : split.train) {
    if (direction && e.direction != *direction) continue;
    const auto it = by_id.find(e.benchmark_id);
    if (it == by_id.end()) throw CorpusError("split references unknown benchmark '" + e.benchmark_id + "'");
    const KernelTuple& t = *it->second;
    const auto from = t.members.find(e.direction.from);
    const auto to = t.members.find(e.direction.to);
    if (from == t.members.end() || to == t.members.end()) {
      throw CorpusError("benchmark '" + e.benchmark_id + "' lacks members for " + direction_label(e.direction));
    }
    tasks.push_back({t.benchmark_id, e.direction, from->second.source_text, to->second.source_text,
                     t.category.value_or("")});
  }
  return tasks;
}

CurateResult curate(const CurateOptions& options, const Toolchain* toolchain) {
  CurateResult result;
  ScanResult scanned = scan_benchmarks(options.root, options.apis, options.scan);
  result.report.scan = scanned.report;
  result.report.scanned = scanned.sources.size();

  std::vector<BenchmarkSource> sources;
  for (BenchmarkSource& s : scanned.sources) {
    try {
      s.source_text = lex::strip_comments(s.source_text);
    } catch (const LexError& e) {
      result.report.scan.warnings.push_back(s.main_file_path.string() + ": " + e.what() + "; skipped");
      continue;
    }
    s.token_count = options.counter.count(s.source_text);
    sources.push_back(std::move(s));
  }

  PruneResult pruned = prune_by_tokens(std::move(sources), options.cutoff);
  for (const BenchmarkSource& s : pruned.dropped) {
    result.report.pruned.emplace_back(member_label(s.benchmark_id, s.api), s.token_count);
  }

  TupleOptions tuple_options;
  tuple_options.counter = options.counter;
  fs::path categories = options.categories_file.value_or(options.root / "categories.json");
  if (fs::exists(categories)) {
    const auto text = read_file(categories);
    const json doc = json::parse(text.value_or(""), nullptr, false);
    if (!doc.is_object()) throw CorpusError("category sidecar is not a JSON object: " + categories.string());
    for (const auto& [id, tag] : doc.items()) tuple_options.categories[id] = tag.get<std::string>();
  } else if (options.categories_file) {
    throw CorpusError("category sidecar not found: " + categories.string());
  }
  result.tuples = build_tuples(std::move(pruned.kept), tuple_options);

  if (options.verify) {
    if (toolchain == nullptr) throw CorpusError("verification requested without a toolchain");
    std::vector<BenchmarkSource*> members;
    for (KernelTuple& t : result.tuples) {
      for (auto& [api, m] : t.members) members.push_back(&m);
    }
    std::vector<VerifyResult> verdicts(members.size());
    parallel_for(members.size(), options.workers, [&](std::size_t i) {
      const BenchmarkSource& m = *members[i];
      verdicts[i] = verify_kernel(m, *toolchain, options.verify_timeout,
                                  options.verify_workspace / m.benchmark_id / std::string(api_key(m.api)));
    });
    for (std::size_t i = 0; i < members.size(); ++i) {
      members[i]->verified = verdicts[i].verdict;
      const std::string label = member_label(members[i]->benchmark_id, members[i]->api);
      if (verdicts[i].verdict == Verification::failed) result.report.verification_failed.push_back(label);
      if (verdicts[i].verdict == Verification::unverified) result.report.verification_skipped.push_back(label);
    }
    // Failed kernels leave their tuple; tuples without OpenMP or CUDA are discarded.
    for (KernelTuple& t : result.tuples) {
      std::erase_if(t.members, [](const auto& kv) { return kv.second.verified == Verification::failed; });
    }
    std::erase_if(result.tuples, [](const KernelTuple& t) {
      return !t.members.contains(Api::OpenMP) && !t.members.contains(Api::CUDA);
    });
  }

  for (const KernelTuple& t : result.tuples) {
    for (const auto& [api, m] : t.members) {
      for (const std::string& note : m.notes) {
        if (note.starts_with("retains")) result.report.flags.push_back(member_label(t.benchmark_id, api) + ": " + note);
      }
    }
  }
  return result;
}

namespace {

json report_to_json(const CurateReport& r) {
  json skipped = json::array();
  for (const ScanSkip& s : r.scan.skipped) skipped.push_back({{"directory", s.directory.string()}, {"reason", s.reason}});
  json pruned = json::array();
  for (const auto& [label, count] : r.pruned) pruned.push_back({{"source", label}, {"token_count", count}});
  return json{{"scanned", r.scanned},
              {"skipped", skipped},
              {"warnings", r.scan.warnings},
              {"pruned", pruned},
              {"verification_failed", r.verification_failed},
              {"verification_skipped", r.verification_skipped},
              {"flags", r.flags}};
}

}  // namespace

void write_corpus(const fs::path& dir, const CurateResult& result) {
  fs::create_directories(dir);
  std::ostringstream jsonl;
  for (const KernelTuple& t : result.tuples) {
    fs::create_directories(dir / t.benchmark_id);
    for (const auto& [api, m] : t.members) {
      const std::string file = std::string(api_key(api)) + std::string(source_extension(api));
      write_file(dir / t.benchmark_id / file, m.source_text);
      json rec{{"id", t.benchmark_id},
               {"api", api_key(api)},
               {"path", t.benchmark_id + "/" + file},
               {"token_count", m.token_count},
               {"verified", to_string(m.verified)},
               {"origin", m.main_file_path.generic_string()},
               {"notes", m.notes}};
      if (t.category) rec["category"] = *t.category;
      jsonl << rec.dump() << "\n";
    }
  }
  write_file(dir / "corpus.jsonl", jsonl.str());
  write_file(dir / "curate_report.json", report_to_json(result.report).dump(2) + "\n");
}

std::vector<KernelTuple> load_corpus(const fs::path& dir) {
  std::ifstream in(dir / "corpus.jsonl");
  if (!in) throw CorpusError("corpus index not found: " + (dir / "corpus.jsonl").string());
  std::map<std::string, KernelTuple> groups;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json rec = json::parse(line, nullptr, false);
    if (!rec.is_object()) throw CorpusError("malformed corpus record: " + line.substr(0, 120));
    const auto api = parse_api(rec.at("api").get<std::string>());
    if (!api) throw CorpusError("unknown api in corpus record: " + line.substr(0, 120));
    BenchmarkSource m;
    m.benchmark_id = rec.at("id").get<std::string>();
    m.api = *api;
    m.main_file_path = rec.value("origin", rec.at("path").get<std::string>());
    m.token_count = rec.value("token_count", std::size_t{0});
    m.verified = verification_from(rec.value("verified", "unverified"));
    m.notes = rec.value("notes", std::vector<std::string>{});
    auto text = read_file(dir / rec.at("path").get<std::string>());
    if (!text) throw CorpusError("corpus file missing: " + rec.at("path").get<std::string>());
    m.source_text = std::move(*text);
    KernelTuple& t = groups[m.benchmark_id];
    t.benchmark_id = m.benchmark_id;
    if (rec.contains("category")) t.category = rec["category"].get<std::string>();
    t.members.emplace(m.api, std::move(m));
  }
  std::vector<KernelTuple> tuples;
  for (auto& [id, t] : groups) tuples.push_back(std::move(t));
  return tuples;
}

json to_json(const SplitManifest& split) {
  auto entries = [](const std::vector<SplitEntry>& list) {
    json arr = json::array();
    for (const SplitEntry& e : list) arr.push_back({{"benchmark_id", e.benchmark_id}, {"direction", direction_slug(e.direction)}});
    return arr;
  };
  return json{{"seed", split.seed},
              {"ratio", {{"train", split.ratio.train}, {"test", split.ratio.test}}},
              {"train", entries(split.train)},
              {"test", entries(split.test)},
              {"warnings", split.warnings}};
}

SplitManifest split_from_json(const json& j) {
  SplitManifest m;
  m.seed = j.at("seed").get<std::uint64_t>();
  m.ratio = {j.at("ratio").at("train").get<std::uint64_t>(), j.at("ratio").at("test").get<std::uint64_t>()};
  auto entries = [](const json& arr, std::vector<SplitEntry>& out) {
    for (const json& e : arr) {
      const auto d = parse_direction(e.at("direction").get<std::string>());
      if (!d) throw CorpusError("unknown direction in split: " + e.at("direction").get<std::string>());
      out.push_back({e.at("benchmark_id").get<std::string>(), *d});
    }
  };
  entries(j.at("train"), m.train);
  entries(j.at("test"), m.test);
  m.warnings = j.value("warnings", std::vector<std::string>{});
  return m;
}

void write_split(const fs::path& file, const SplitManifest& split) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  write_file(file, to_json(split).dump(2) + "\n");
}

SplitManifest read_split(const fs::path& file) {
  const auto text = read_file(file);
  if (!text) throw CorpusError("split manifest not found: " + file.string());
  const json doc = json::parse(*text, nullptr, false);
  if (doc.is_discarded()) throw CorpusError("split manifest is not JSON: " + file.string());
  return split_from_json(doc);
}

}  // namespace unipar
