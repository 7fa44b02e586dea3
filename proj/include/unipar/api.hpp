#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace unipar {

// Programming paradigm of a kernel implementation.
enum class Api { Serial, OpenMP, CUDA };

inline constexpr std::string_view kVersion = "0.1.0";

inline constexpr std::array<Api, 3> kAllApis{Api::Serial, Api::OpenMP, Api::CUDA};

// Display name used in prompts: "Serial", "OpenMP", "CUDA".
std::string_view api_name(Api api);
// Lowercase key used in file names and config sections: "serial", "openmp", "cuda".
std::string_view api_key(Api api);
// Short form used in direction slugs: "serial", "omp", "cuda".
std::string_view api_short(Api api);
// Accepts any of the three spellings above, case-insensitively.
std::optional<Api> parse_api(std::string_view text);
// ".cpp" for host code, ".cu" for CUDA.
std::string_view source_extension(Api api);

struct Direction {
  Api from = Api::Serial;
  Api to = Api::OpenMP;

  friend auto operator<=>(const Direction&, const Direction&) = default;
};

// The four translation problems, in the order they are reported.
inline constexpr std::array<Direction, 4> kDirections{
    Direction{Api::Serial, Api::OpenMP},
    Direction{Api::Serial, Api::CUDA},
    Direction{Api::CUDA, Api::OpenMP},
    Direction{Api::OpenMP, Api::CUDA},
};

// "serial-to-omp", "cuda-to-omp", ...
std::string direction_slug(Direction d);
// "Serial->OpenMP"
std::string direction_label(Direction d);
std::optional<Direction> parse_direction(std::string_view text);

// One translation problem instance drawn from an aligned tuple.
struct TranslationTask {
  std::string benchmark_id;
  Direction direction;
  std::string source_code;
  std::string ground_truth;
  std::string category;

  // "<benchmark>__<direction-slug>"; filesystem-safe and unique per corpus.
  std::string id() const;
};

}  // namespace unipar
