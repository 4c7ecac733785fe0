#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace chronofact {

enum class Granularity : std::uint8_t { kDay, kMonth, kYear };

std::string_view to_string(Granularity g);
Granularity granularity_from_string(std::string_view s);

// Day index on the proleptic Gregorian calendar, day 0 = 0001-01-01.
using DayIndex = std::int64_t;

DayIndex day_index(int year, unsigned month, unsigned day);
DayIndex last_day_of_month(int year, unsigned month);
DayIndex first_day_of_year(int year);
DayIndex last_day_of_year(int year);

// "YYYY-MM-DD"
std::string format_iso_date(DayIndex day);
DayIndex parse_iso_date(std::string_view iso);

struct CivilDate {
  int year;
  unsigned month;
  unsigned day;
};
CivilDate civil_from_day(DayIndex day);

// Closed interval [start_day, end_day]. Year granularity spans cover
// Jan 1 to Dec 31 of their years, month granularity spans cover whole months.
class TimeSpan {
 public:
  TimeSpan(DayIndex start_day, DayIndex end_day, Granularity granularity);

  static TimeSpan year(int y) { return years(y, y); }
  static TimeSpan years(int first, int last);
  static TimeSpan month(int y, unsigned m);
  static TimeSpan day(int y, unsigned m, unsigned d);

  DayIndex start_day() const { return start_; }
  DayIndex end_day() const { return end_; }
  Granularity granularity() const { return granularity_; }

  bool overlaps(const TimeSpan& other) const {
    return start_ <= other.end_ && other.start_ <= end_;
  }

  friend bool operator==(const TimeSpan&, const TimeSpan&) = default;

 private:
  DayIndex start_;
  DayIndex end_;
  Granularity granularity_;
};

}  // namespace chronofact
