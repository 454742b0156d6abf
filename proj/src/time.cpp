#include "cra/time.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

#include "cra/error.hpp"

namespace cra {

namespace {

using namespace std::chrono;

bool read_int(std::string_view text, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > text.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) return false;
  }
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
  return ec == std::errc{};
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!read_int(text, 0, 4, y) || text.size() < 10 || text[4] != '-' || text[7] != '-' ||
      !read_int(text, 5, 2, mo) || !read_int(text, 8, 2, d)) {
    return std::nullopt;
  }
  std::size_t pos = 10;
  if (pos < text.size()) {
    if (text[pos] != 'T' && text[pos] != ' ') return std::nullopt;
    if (!read_int(text, pos + 1, 2, h) || text.size() < pos + 9 || text[pos + 3] != ':' ||
        !read_int(text, pos + 4, 2, mi) || text[pos + 6] != ':' || !read_int(text, pos + 7, 2, s)) {
      return std::nullopt;
    }
    pos += 9;
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      std::size_t digits = 0;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        ++pos;
        ++digits;
      }
      if (digits == 0) return std::nullopt;
    }
    if (pos < text.size() && text[pos] == 'Z') ++pos;
    if (pos != text.size()) return std::nullopt;
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) return std::nullopt;
  return Timestamp{sys_days{ymd}.time_since_epoch() + hours{h} + minutes{mi} + seconds{s}};
}

Timestamp parse_timestamp_or_throw(std::string_view text) {
  auto t = parse_timestamp(text);
  if (!t) throw Error(ErrorCode::InvalidArgument, "not an ISO-8601 timestamp: '" + std::string(text) + "'");
  return *t;
}

namespace {

struct Fields {
  int y;
  unsigned mo, d;
  long long h, mi, s;
};

Fields split(Timestamp t) {
  const auto days = floor<std::chrono::days>(t);
  const year_month_day ymd{days};
  const hh_mm_ss hms{t - days};
  return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
          static_cast<unsigned>(ymd.day()), hms.hours().count(), hms.minutes().count(),
          hms.seconds().count()};
}

}  // namespace

std::string format_timestamp(Timestamp t) {
  const Fields f = split(t);
  char buf[80];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", f.y, f.mo, f.d, f.h, f.mi, f.s);
  return buf;
}

std::string format_gerrit_timestamp(Timestamp t) {
  const Fields f = split(t);
  char buf[80];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02lld:%02lld:%02lld", f.y, f.mo, f.d, f.h, f.mi, f.s);
  return buf;
}

Timestamp epoch() { return Timestamp{}; }

Timestamp month_start(Timestamp t) {
  const year_month_day ymd{floor<days>(t)};
  return Timestamp{sys_days{ymd.year() / ymd.month() / 1}.time_since_epoch()};
}

Timestamp add_months(Timestamp t, int months) {
  const auto day_floor = floor<days>(t);
  const auto time_of_day = t - day_floor;
  year_month_day ymd{day_floor};
  year_month ym = ymd.year() / ymd.month();
  ym += std::chrono::months{months};
  const auto last = year_month_day_last{ym.year(), month_day_last{ym.month()}}.day();
  const auto d = ymd.day() > last ? last : ymd.day();
  return Timestamp{sys_days{ym / d}.time_since_epoch()} + time_of_day;
}

std::string format_month(Timestamp t) {
  const Fields f = split(t);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u", f.y, f.mo);
  return buf;
}

}  // namespace cra
