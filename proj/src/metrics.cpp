#include "unipar/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "unipar/error.hpp"

namespace unipar {

namespace fs = std::filesystem;
using nlohmann::json;

std::string Rational::fixed3() const {
  if (den == 0) return "n/a";
  // Half-up rounding in integers: thousandths = floor((2000 * num + den) / (2 * den)).
  const unsigned __int128 t = (static_cast<unsigned __int128>(num) * 2000 + den) / (2 * static_cast<unsigned __int128>(den));
  const auto thousandths = static_cast<std::uint64_t>(t);
  std::string frac = std::to_string(thousandths % 1000);
  frac.insert(0, 3 - frac.size(), '0');
  return std::to_string(thousandths / 1000) + "." + frac;
}

std::vector<StagePoint> attribution_columns() {
  return {{Stage::translate, 0}, {Stage::compile_repair, 1}, {Stage::compile_repair, 2}, {Stage::compile_repair, 3}};
}

namespace {

std::string point_label(const StagePoint& p) { return std::string(to_string(p.stage)) + "/" + std::to_string(p.round); }

StagePoint point_from_label(const std::string& label) {
  const auto slash = label.find('/');
  const auto stage = parse_stage(label.substr(0, slash));
  if (slash == std::string::npos || !stage) throw Error("bad attribution key '" + label + "'");
  return {*stage, std::stoi(label.substr(slash + 1))};
}

void count(RateStats& s, const PipelineOutcome& o) {
  ++s.n_tasks;
  if (o.skipped()) {
    ++s.n_skipped;
    return;
  }
  if (o.compiled) {
    ++s.n_compiled;
    if (o.success_stage) ++s.round_attribution[*o.success_stage];
  }
  if (o.validated && o.compiled) ++s.n_validated;
}

std::string shortest(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

Aggregate aggregate(std::span<const PipelineOutcome> outcomes, std::span<const Direction> expected) {
  Aggregate agg;
  for (const PipelineOutcome& o : outcomes) {
    DirectionStats& s = agg.by_direction[o.direction];
    s.direction = o.direction;
    count(s, o);
    if (!o.category.empty()) count(agg.by_category[o.category], o);
  }
  for (Direction d : expected) {
    if (!agg.by_direction.contains(d)) agg.warnings.push_back(direction_label(d) + ": no outcomes; stats omitted");
  }
  for (const auto& [d, s] : agg.by_direction) {
    if (s.denominator() == 0) agg.warnings.push_back(direction_label(d) + ": every task skipped; rates undefined");
  }
  return agg;
}

AttributionTable attribute_rounds(std::span<const PipelineOutcome> outcomes) {
  AttributionTable table;
  for (const StagePoint& p : attribution_columns()) table.cells[p] = 0;
  for (const PipelineOutcome& o : outcomes) {
    if (o.skipped() || !o.compiled || !o.success_stage) continue;
    ++table.cells[*o.success_stage];
    ++table.n_compiled;
  }
  return table;
}

std::string GridPoint::key() const {
  return "t" + shortest(temperature) + "_m" + std::to_string(max_tokens) + "_p" + shortest(top_p) + "_s" +
         std::to_string(shots);
}

std::vector<GridPoint> SweepSpec::points() const {
  std::vector<GridPoint> out;
  for (double t : temperatures)
    for (int m : max_tokens)
      for (int s : shots) out.push_back({t, m, top_p, s});
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

json rate_stats_json(const RateStats& s) {
  json attribution = json::object();
  for (const auto& [p, n] : s.round_attribution) attribution[point_label(p)] = n;
  return json{{"n_tasks", s.n_tasks},
              {"n_skipped", s.n_skipped},
              {"n_compiled", s.n_compiled},
              {"n_validated", s.n_validated},
              {"compilation_rate", s.compilation_rate().fixed3()},
              {"validation_rate", s.validation_rate().fixed3()},
              {"validation_rate_of_compiled", s.validation_rate_of_compiled().fixed3()},
              {"round_attribution", attribution}};
}

void rate_stats_from(const json& j, RateStats& s) {
  s.n_tasks = j.at("n_tasks").get<std::size_t>();
  s.n_skipped = j.at("n_skipped").get<std::size_t>();
  s.n_compiled = j.at("n_compiled").get<std::size_t>();
  s.n_validated = j.at("n_validated").get<std::size_t>();
  const json attribution = j.value("round_attribution", json::object());
  for (const auto& [k, v] : attribution.items()) {
    s.round_attribution[point_from_label(k)] = v.get<std::size_t>();
  }
}

}  // namespace

json to_json(const RunManifest& m) {
  json points = json::array();
  for (const PointResult& p : m.points) {
    json directions = json::array();
    for (const auto& [d, s] : p.stats.by_direction) {
      json j = rate_stats_json(s);
      j["direction"] = direction_slug(d);
      directions.push_back(j);
    }
    json categories = json::object();
    for (const auto& [c, s] : p.stats.by_category) categories[c] = rate_stats_json(s);
    json cells = json::object();
    for (const auto& [pt, n] : p.attribution.cells) cells[point_label(pt)] = n;
    points.push_back({{"key", p.point.key()},
                      {"temperature", p.point.temperature},
                      {"max_tokens", p.point.max_tokens},
                      {"top_p", p.point.top_p},
                      {"shots", p.point.shots},
                      {"run_dir", p.run_dir},
                      {"n_outcomes", p.n_outcomes},
                      {"directions", directions},
                      {"categories", categories},
                      {"attribution", {{"cells", cells}, {"n_compiled", p.attribution.n_compiled}}},
                      {"warnings", p.stats.warnings}});
  }
  return json{{"run_id", m.run_id}, {"tool", "unipar " + std::string(kVersion)}, {"provenance", m.provenance},
              {"config", m.config}, {"points", points}};
}

RunManifest manifest_from_json(const json& j) {
  RunManifest m;
  m.run_id = j.value("run_id", "");
  m.config = j.value("config", json::object());
  m.provenance = j.value("provenance", json::object());
  for (const json& pj : j.value("points", json::array())) {
    PointResult p;
    p.point = {pj.at("temperature").get<double>(), pj.at("max_tokens").get<int>(), pj.at("top_p").get<double>(),
               pj.at("shots").get<int>()};
    p.run_dir = pj.value("run_dir", "");
    p.n_outcomes = pj.value("n_outcomes", std::size_t{0});
    for (const json& dj : pj.value("directions", json::array())) {
      const auto d = parse_direction(dj.at("direction").get<std::string>());
      if (!d) throw Error("bad direction in manifest: " + dj.at("direction").dump());
      DirectionStats s;
      s.direction = *d;
      rate_stats_from(dj, s);
      p.stats.by_direction[*d] = s;
    }
    const json categories = pj.value("categories", json::object());
    for (const auto& [c, cj] : categories.items()) rate_stats_from(cj, p.stats.by_category[c]);
    p.stats.warnings = pj.value("warnings", std::vector<std::string>{});
    const json aj = pj.value("attribution", json::object());
    const json cells = aj.value("cells", json::object());
    for (const auto& [k, v] : cells.items()) p.attribution.cells[point_from_label(k)] = v;
    p.attribution.n_compiled = aj.value("n_compiled", std::size_t{0});
    m.points.push_back(std::move(p));
  }
  std::sort(m.points.begin(), m.points.end(), [](const PointResult& a, const PointResult& b) { return a.point < b.point; });
  return m;
}

PointResult summarize_point(const GridPoint& point, std::string run_dir, std::span<const PipelineOutcome> outcomes,
                            std::span<const Direction> directions) {
  PointResult r;
  r.point = point;
  r.run_dir = std::move(run_dir);
  r.n_outcomes = outcomes.size();
  r.stats = aggregate(outcomes, directions);
  r.attribution = attribute_rounds(outcomes);
  return r;
}

RunManifest run_sweep(const SweepSpec& spec, std::span<const TranslationTask> tasks, const PipelineConfig& base,
                      PipelineEnv& env, const fs::path& sweep_dir, std::size_t parallelism,
                      std::span<const Direction> directions) {
  RunManifest m;
  for (const GridPoint& point : spec.points()) {
    PipelineConfig config = base;
    config.gen.temperature = point.temperature;
    config.gen.max_tokens = point.max_tokens;
    config.gen.top_p = point.top_p;
    config.shots = point.shots;
    const std::string key = point.key();
    const auto outcomes = run_batch(tasks, config, env, {sweep_dir / key, parallelism, {}});
    m.points.push_back(summarize_point(point, key, outcomes, directions));
  }
  json grid{{"temperatures", spec.temperatures},
            {"max_tokens", spec.max_tokens},
            {"top_p", spec.top_p},
            {"shots", spec.shots}};
  std::sort(grid["temperatures"].begin(), grid["temperatures"].end());
  std::sort(grid["max_tokens"].begin(), grid["max_tokens"].end());
  std::sort(grid["shots"].begin(), grid["shots"].end());
  m.config = json{{"pipeline", to_json(base)}, {"sweep", grid}};
  return m;
}

const char* extension(ReportFormat format) {
  switch (format) {
    case ReportFormat::markdown: return "md";
    case ReportFormat::csv: return "csv";
    case ReportFormat::json: return "json";
  }
  return "txt";
}

std::optional<ReportFormat> parse_report_format(std::string_view text) {
  if (text == "md" || text == "markdown") return ReportFormat::markdown;
  if (text == "csv") return ReportFormat::csv;
  if (text == "json") return ReportFormat::json;
  return std::nullopt;
}

namespace {

std::string render_markdown(const RunManifest& m) {
  std::ostringstream s;
  s << "# unipar report\n\n";
  s << "Run: `" << (m.run_id.empty() ? "-" : m.run_id) << "`\n\n";
  s << "## Provenance\n\n| Item | Value |\n|---|---|\n";
  s << "| tool | unipar " << kVersion << " |\n";
  for (const auto& [k, v] : m.provenance.items()) s << "| " << k << " | " << (v.is_string() ? v.get<std::string>() : v.dump()) << " |\n";
  s << "\n## Configuration\n\n```json\n" << m.config.dump(2) << "\n```\n\n";

  s << "## Rates\n\n";
  s << "| Point | Direction | Tasks | Skipped | Compiled | Validated | Compilation rate | Validation rate | "
       "Validated/compiled |\n";
  s << "|---|---|---:|---:|---:|---:|---:|---:|---:|\n";
  for (const PointResult& p : m.points) {
    for (const auto& [d, st] : p.stats.by_direction) {
      s << "| " << p.point.key() << " | " << direction_label(d) << " | " << st.n_tasks << " | " << st.n_skipped
        << " | " << st.n_compiled << " | " << st.n_validated << " | " << st.compilation_rate().fixed3() << " | "
        << st.validation_rate().fixed3() << " | " << st.validation_rate_of_compiled().fixed3() << " |\n";
    }
  }

  s << "\n## First compile success by round\n\n| Point | Direction |";
  const auto columns = attribution_columns();
  for (const StagePoint& c : columns) s << " " << point_label(c) << " |";
  s << " Compiled |\n|---|---|";
  for (std::size_t i = 0; i <= columns.size(); ++i) s << "---:|";
  s << "\n";
  for (const PointResult& p : m.points) {
    for (const auto& [d, st] : p.stats.by_direction) {
      s << "| " << p.point.key() << " | " << direction_label(d) << " |";
      for (const StagePoint& c : columns) {
        const auto it = st.round_attribution.find(c);
        s << " " << (it == st.round_attribution.end() ? 0 : it->second) << " |";
      }
      s << " " << st.n_compiled << " |\n";
    }
  }

  bool any_category = false;
  for (const PointResult& p : m.points) any_category |= !p.stats.by_category.empty();
  if (any_category) {
    s << "\n## By category\n\n| Point | Category | Tasks | Skipped | Compiled | Validated | Compilation rate | "
         "Validation rate |\n|---|---|---:|---:|---:|---:|---:|---:|\n";
    for (const PointResult& p : m.points) {
      for (const auto& [c, st] : p.stats.by_category) {
        s << "| " << p.point.key() << " | " << c << " | " << st.n_tasks << " | " << st.n_skipped << " | "
          << st.n_compiled << " | " << st.n_validated << " | " << st.compilation_rate().fixed3() << " | "
          << st.validation_rate().fixed3() << " |\n";
      }
    }
  }

  std::vector<std::string> warnings;
  for (const PointResult& p : m.points)
    for (const std::string& w : p.stats.warnings) warnings.push_back(p.point.key() + ": " + w);
  if (!warnings.empty()) {
    s << "\n## Warnings\n\n";
    for (const std::string& w : warnings) s << "- " << w << "\n";
  }
  return s.str();
}

const char* kCsvHeader =
    "point,temperature,max_tokens,top_p,shots,direction,n_tasks,n_skipped,n_compiled,n_validated,"
    "compilation_rate,validation_rate";

std::string render_csv(const RunManifest& m) {
  std::ostringstream s;
  s << kCsvHeader;
  const auto columns = attribution_columns();
  for (const StagePoint& c : columns) s << ",attr_" << to_string(c.stage) << "_" << c.round;
  s << "\n";
  for (const PointResult& p : m.points) {
    for (const auto& [d, st] : p.stats.by_direction) {
      s << p.point.key() << "," << shortest(p.point.temperature) << "," << p.point.max_tokens << ","
        << shortest(p.point.top_p) << "," << p.point.shots << "," << direction_slug(d) << "," << st.n_tasks << ","
        << st.n_skipped << "," << st.n_compiled << "," << st.n_validated << "," << st.compilation_rate().fixed3()
        << "," << st.validation_rate().fixed3();
      for (const StagePoint& c : columns) {
        const auto it = st.round_attribution.find(c);
        s << "," << (it == st.round_attribution.end() ? 0 : it->second);
      }
      s << "\n";
    }
  }
  return s.str();
}

}  // namespace

std::string render_report(const RunManifest& manifest, ReportFormat format) {
  switch (format) {
    case ReportFormat::markdown: return render_markdown(manifest);
    case ReportFormat::csv: return render_csv(manifest);
    case ReportFormat::json: return to_json(manifest).dump(2) + "\n";
  }
  return {};
}

void emit_report(const RunManifest& manifest, ReportFormat format, const fs::path& file) {
  write_atomic(file, render_report(manifest, format));
}

std::vector<CsvRow> parse_report_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || !line.starts_with(kCsvHeader)) throw Error("not a unipar report CSV");
  const std::size_t n_attr = attribution_columns().size();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 12 + n_attr) throw Error("CSV row has " + std::to_string(f.size()) + " fields: " + line);
    CsvRow r;
    r.point = f[0];
    r.temperature = std::stod(f[1]);
    r.max_tokens = std::stoi(f[2]);
    r.top_p = std::stod(f[3]);
    r.shots = std::stoi(f[4]);
    const auto d = parse_direction(f[5]);
    if (!d) throw Error("bad direction in CSV: " + f[5]);
    r.direction = *d;
    r.n_tasks = std::stoull(f[6]);
    r.n_skipped = std::stoull(f[7]);
    r.n_compiled = std::stoull(f[8]);
    r.n_validated = std::stoull(f[9]);
    r.compilation_rate = f[10];
    r.validation_rate = f[11];
    for (std::size_t i = 0; i < n_attr; ++i) r.attribution.push_back(std::stoull(f[12 + i]));
    rows.push_back(std::move(r));
  }
  return rows;
}

FinetuneExport export_finetune(const std::vector<KernelTuple>& tuples, const SplitManifest& split,
                               const FinetuneOptions& options) {
  FinetuneExport out;
  const auto tasks = tasks_for(tuples, split, false);
  for (const TranslationTask& t : tasks) {
    const ShotExample pair{t.direction.from, t.direction.to, t.source_code, t.ground_truth, t.benchmark_id};
    FinetuneRecord rec = render_finetune_record(pair, options.templates);
    const std::size_t estimate = options.counter.count(rec.system + "\n" + rec.instruction + "\n" + rec.response);
    if (estimate > options.context_limit) {
      out.flagged.push_back(t.id() + ": " + std::to_string(estimate) + " tokens");
      if (options.drop_oversize) {
        ++out.dropped;
        continue;
      }
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

std::string finetune_jsonl(const FinetuneExport& data) {
  std::string out;
  for (const FinetuneRecord& r : data.records) {
    out += json{{"system", r.system}, {"instruction", r.instruction}, {"response", r.response}}.dump() + "\n";
  }
  return out;
}

json finetune_schema() {
  const json text{{"type", "string"}, {"minLength", 1}};
  return json{{"$schema", "https://json-schema.org/draft/2020-12/schema"},
              {"title", "unipar fine-tuning record"},
              {"type", "object"},
              {"required", {"system", "instruction", "response"}},
              {"properties", {{"system", text}, {"instruction", text}, {"response", text}}},
              {"additionalProperties", false}};
}

}  // namespace unipar
