#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace menet {

struct ParsedTime {
  int64_t epoch_seconds = 0;  // seconds since 1970-01-01T00:00:00Z
  int hour_utc = 0;           // 0..23
};

namespace time_detail {

// Days since the civil epoch, Howard Hinnant's algorithm.
inline int64_t days_from_civil(int64_t y, int m, int d) {
  y -= m <= 2;
  const int64_t era = (y >= 0 ? y : y - 399) / 400;
  const int64_t yoe = y - era * 400;
  const int64_t doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + doe - 719468;
}

inline bool parse_fixed_uint(std::string_view s, size_t pos, size_t len, int& out) {
  if (pos + len > s.size()) return false;
  int v = 0;
  for (size_t i = pos; i < pos + len; ++i) {
    const char c = s[i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  return true;
}

inline int days_in_month(int y, int m) {
  static constexpr int lens[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && ((y % 4 == 0 && y % 100 != 0) || y % 400 == 0)) return 29;
  return lens[m - 1];
}

}  // namespace time_detail

// Strict ISO-8601 parser for "YYYY-MM-DD[T ]HH:MM:SS[.frac][Z|+HH:MM|-HH:MM]".
// A missing zone designator means UTC. Returns nullopt on any malformation or
// out-of-range field; callers reject the record rather than defaulting.
inline std::optional<ParsedTime> parse_iso8601_utc(std::string_view s) {
  using namespace time_detail;
  int year, month, day, hour, minute, second;
  if (!parse_fixed_uint(s, 0, 4, year)) return std::nullopt;
  if (s.size() < 19 || s[4] != '-' || s[7] != '-') return std::nullopt;
  if (s[10] != 'T' && s[10] != ' ') return std::nullopt;
  if (s[13] != ':' || s[16] != ':') return std::nullopt;
  if (!parse_fixed_uint(s, 5, 2, month) || !parse_fixed_uint(s, 8, 2, day) ||
      !parse_fixed_uint(s, 11, 2, hour) || !parse_fixed_uint(s, 14, 2, minute) ||
      !parse_fixed_uint(s, 17, 2, second)) {
    return std::nullopt;
  }
  if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month)) return std::nullopt;
  if (hour > 23 || minute > 59 || second > 59) return std::nullopt;

  size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    size_t digits = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      ++pos;
      ++digits;
    }
    if (digits == 0) return std::nullopt;
  }

  int64_t offset_seconds = 0;
  if (pos < s.size()) {
    const char sign = s[pos];
    if (sign == 'Z') {
      ++pos;
    } else if (sign == '+' || sign == '-') {
      int oh, om;
      if (!parse_fixed_uint(s, pos + 1, 2, oh)) return std::nullopt;
      size_t mpos = pos + 3;
      if (mpos < s.size() && s[mpos] == ':') ++mpos;
      if (!parse_fixed_uint(s, mpos, 2, om)) return std::nullopt;
      if (oh > 23 || om > 59) return std::nullopt;
      offset_seconds = (sign == '-' ? -1 : 1) * (oh * 3600LL + om * 60LL);
      pos = mpos + 2;
    } else {
      return std::nullopt;
    }
  }
  if (pos != s.size()) return std::nullopt;

  const int64_t days = days_from_civil(year, month, day);
  const int64_t local = days * 86400 + hour * 3600 + minute * 60 + second;
  const int64_t utc = local - offset_seconds;

  ParsedTime out;
  out.epoch_seconds = utc;
  const int64_t sec_of_day = ((utc % 86400) + 86400) % 86400;
  out.hour_utc = static_cast<int>(sec_of_day / 3600);
  return out;
}

}  // namespace menet
