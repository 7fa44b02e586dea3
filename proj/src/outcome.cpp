#include "unipar/outcome.hpp"

#include "unipar/error.hpp"

namespace unipar {

using nlohmann::json;

namespace {

json stage_point_json(const std::optional<StagePoint>& p) {
  if (!p) return nullptr;
  return json{{"stage", to_string(p->stage)}, {"round", p->round}};
}

Stage stage_from(const json& j) {
  const auto s = parse_stage(j.get<std::string>());
  if (!s) throw Error("unknown stage '" + j.get<std::string>() + "'");
  return *s;
}

std::optional<StagePoint> stage_point_from(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return StagePoint{stage_from(j[key].at("stage")), j[key].at("round").get<int>()};
}

KernelGuard guard_from(const std::string& text) {
  for (KernelGuard g : {KernelGuard::unchanged, KernelGuard::changed, KernelGuard::not_checked}) {
    if (text == to_string(g)) return g;
  }
  throw Error("unknown kernel guard value '" + text + "'");
}

}  // namespace

json to_json(const RoundRecord& r) {
  json j{{"stage", to_string(r.stage)},
         {"round", r.round_index},
         {"prompt_hash", r.prompt_hash},
         {"response_hash", r.response_hash},
         {"workspace", r.workspace}};
  j["compile"] = r.compile ? to_json(*r.compile) : json(nullptr);
  j["run"] = r.run ? to_json(*r.run) : json(nullptr);
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

RoundRecord round_record_from_json(const json& j) {
  RoundRecord r;
  r.stage = stage_from(j.at("stage"));
  r.round_index = j.at("round").get<int>();
  r.prompt_hash = j.value("prompt_hash", "");
  r.response_hash = j.value("response_hash", "");
  r.workspace = j.value("workspace", "");
  if (j.contains("compile") && !j["compile"].is_null()) r.compile = compile_result_from_json(j["compile"]);
  if (j.contains("run") && !j["run"].is_null()) r.run = run_result_from_json(j["run"]);
  r.note = j.value("note", "");
  return r;
}

json to_json(const PipelineOutcome& o) {
  json trace = json::array();
  for (const RoundRecord& r : o.trace) trace.push_back(to_json(r));
  const TransplantSummary& t = o.transplant;
  json transplant{{"attempted", t.attempted},
                  {"main_replaced", t.main_replaced},
                  {"kernel_guard", to_string(t.kernel_guard)},
                  {"repair_rounds_used", t.repair_rounds_used},
                  {"compiled", t.compiled},
                  {"workspace", t.workspace}};
  transplant["compile"] = t.compile ? to_json(*t.compile) : json(nullptr);
  transplant["run"] = t.run ? to_json(*t.run) : json(nullptr);
  return json{{"task_id", o.task_id},
              {"benchmark_id", o.benchmark_id},
              {"direction", direction_slug(o.direction)},
              {"category", o.category},
              {"compiled", o.compiled},
              {"validated", o.validated},
              {"success_stage", stage_point_json(o.success_stage)},
              {"validation_stage", stage_point_json(o.validation_stage)},
              {"skipped_reason", o.skipped_reason ? json(*o.skipped_reason) : json(nullptr)},
              {"transplant", transplant},
              {"trace", trace},
              {"duration_ms", o.duration_ms}};
}

PipelineOutcome outcome_from_json(const json& j) {
  PipelineOutcome o;
  o.task_id = j.at("task_id").get<std::string>();
  o.benchmark_id = j.value("benchmark_id", "");
  const auto d = parse_direction(j.at("direction").get<std::string>());
  if (!d) throw Error("unknown direction '" + j.at("direction").get<std::string>() + "'");
  o.direction = *d;
  o.category = j.value("category", "");
  o.compiled = j.at("compiled").get<bool>();
  o.validated = j.at("validated").get<bool>();
  o.success_stage = stage_point_from(j, "success_stage");
  o.validation_stage = stage_point_from(j, "validation_stage");
  if (j.contains("skipped_reason") && !j["skipped_reason"].is_null()) {
    o.skipped_reason = j["skipped_reason"].get<std::string>();
  }
  if (j.contains("transplant")) {
    const json& t = j["transplant"];
    o.transplant.attempted = t.value("attempted", false);
    o.transplant.main_replaced = t.value("main_replaced", false);
    o.transplant.kernel_guard = guard_from(t.value("kernel_guard", "not_checked"));
    o.transplant.repair_rounds_used = t.value("repair_rounds_used", 0);
    o.transplant.compiled = t.value("compiled", false);
    o.transplant.workspace = t.value("workspace", "");
    if (t.contains("compile") && !t["compile"].is_null()) o.transplant.compile = compile_result_from_json(t["compile"]);
    if (t.contains("run") && !t["run"].is_null()) o.transplant.run = run_result_from_json(t["run"]);
  }
  for (const json& r : j.value("trace", json::array())) o.trace.push_back(round_record_from_json(r));
  o.duration_ms = j.value("duration_ms", std::int64_t{0});
  return o;
}

json without_timing(const json& j) {
  if (j.is_object()) {
    json out = json::object();
    for (const auto& [key, value] : j.items()) {
      if (key == "duration_ms" || key == "latency_ms") continue;
      out[key] = without_timing(value);
    }
    return out;
  }
  if (j.is_array()) {
    json out = json::array();
    for (const json& v : j) out.push_back(without_timing(v));
    return out;
  }
  return j;
}

}  // namespace unipar
