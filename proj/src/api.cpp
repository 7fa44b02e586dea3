#include "unipar/api.hpp"

#include <algorithm>
#include <cctype>

#include "unipar/error.hpp"

namespace unipar {

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string_view api_name(Api api) {
  switch (api) {
    case Api::Serial: return "Serial";
    case Api::OpenMP: return "OpenMP";
    case Api::CUDA: return "CUDA";
  }
  return "?";
}

std::string_view api_key(Api api) {
  switch (api) {
    case Api::Serial: return "serial";
    case Api::OpenMP: return "openmp";
    case Api::CUDA: return "cuda";
  }
  return "?";
}

std::string_view api_short(Api api) {
  switch (api) {
    case Api::Serial: return "serial";
    case Api::OpenMP: return "omp";
    case Api::CUDA: return "cuda";
  }
  return "?";
}

std::optional<Api> parse_api(std::string_view text) {
  const std::string key = lower(text);
  for (Api api : kAllApis) {
    if (key == lower(api_name(api)) || key == api_key(api) || key == api_short(api)) return api;
  }
  return std::nullopt;
}

std::string_view source_extension(Api api) { return api == Api::CUDA ? ".cu" : ".cpp"; }

std::string direction_slug(Direction d) {
  return std::string(api_short(d.from)) + "-to-" + std::string(api_short(d.to));
}

std::string direction_label(Direction d) {
  return std::string(api_name(d.from)) + "->" + std::string(api_name(d.to));
}

std::optional<Direction> parse_direction(std::string_view text) {
  const std::string key = lower(text);
  for (std::string_view sep : {"-to-", "->", "2"}) {
    const auto pos = key.find(sep);
    if (pos == std::string::npos) continue;
    auto from = parse_api(std::string_view(key).substr(0, pos));
    auto to = parse_api(std::string_view(key).substr(pos + sep.size()));
    if (from && to && *from != *to) return Direction{*from, *to};
  }
  return std::nullopt;
}

std::string TranslationTask::id() const { return benchmark_id + "__" + direction_slug(direction); }

const char* to_string(LlmError::Kind kind) {
  switch (kind) {
    case LlmError::Kind::RateLimited: return "RateLimited";
    case LlmError::Kind::Transport: return "Transport";
    case LlmError::Kind::ContextOverflow: return "ContextOverflow";
    case LlmError::Kind::EmptyCompletion: return "EmptyCompletion";
    case LlmError::Kind::ScriptMiss: return "ScriptMiss";
    case LlmError::Kind::BadResponse: return "BadResponse";
  }
  return "?";
}

}  // namespace unipar
