#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace fluct {

using Timestamp = std::chrono::sys_seconds;

/// Parses an ISO-8601 instant with an explicit zone designator:
/// `YYYY-MM-DDTHH:MM:SSZ` or `YYYY-MM-DDTHH:MM:SS+HH:MM`. Naive (zone-less)
/// and fractional-second inputs are rejected.
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// Canonical `YYYY-MM-DDTHH:MM:SSZ` rendering.
std::string format_timestamp(Timestamp ts);

/// Real-valued days between two instants (b - a).
inline double days_between(Timestamp a, Timestamp b) {
  return static_cast<double>((b - a).count()) / 86400.0;
}

}  // namespace fluct
