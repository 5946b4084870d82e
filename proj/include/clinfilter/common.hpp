#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace clinfilter {

using Timestamp = std::chrono::sys_seconds;
using Day = std::chrono::sys_days;

// Malformed or unreadable input data.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration keys or values. Raised before any compute starts.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Accepts `YYYY-MM-DD`, `YYYY-MM-DDTHH:MM[:SS[.fff]]` with an optional `Z` or
// `+HH:MM` / `-HHMM` offset; a space may replace the `T`. Result is UTC.
std::optional<Timestamp> try_parse_iso8601(std::string_view text);
Timestamp parse_iso8601(std::string_view text);

std::string format_iso8601(Timestamp ts);  // 2020-03-15T08:30:00Z
std::string format_date(Day day);          // 2020-03-15
Day parse_date(std::string_view text);
Day floor_day(Timestamp ts);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

std::string join(const auto& parts, std::string_view sep) {
  std::string out;
  bool first = true;
  for (const auto& p : parts) {
    if (!first) out += sep;
    out += p;
    first = false;
  }
  return out;
}

// splitmix64 step; used to derive independent sampler seeds from a base seed.
constexpr std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace clinfilter
