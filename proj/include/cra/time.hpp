#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace cra {

/// UTC, second precision.
using Timestamp = std::chrono::sys_seconds;

/// Half-open [from, to).
struct Period {
  Timestamp from;
  Timestamp to;

  bool contains(Timestamp t) const { return from <= t && t < to; }
  friend bool operator==(const Period&, const Period&) = default;
};

/// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM:SS" with optional fractional
/// seconds and an optional "Z" suffix, and the Gerrit form
/// "YYYY-MM-DD HH:MM:SS.nnnnnnnnn". All values are read as UTC.
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// Throws cra::Error(InvalidArgument) when the text is not a timestamp.
Timestamp parse_timestamp_or_throw(std::string_view text);

/// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_timestamp(Timestamp t);

/// "YYYY-MM-DD HH:MM:SS" (Gerrit query syntax).
std::string format_gerrit_timestamp(Timestamp t);

Timestamp epoch();

/// First instant of the calendar month containing `t`.
Timestamp month_start(Timestamp t);

/// Moves by whole calendar months, keeping the day clamped to the month length.
Timestamp add_months(Timestamp t, int months);

/// "YYYY-MM"
std::string format_month(Timestamp t);

}  // namespace cra
