#include "chronofact/time_span.hpp"

#include <chrono>
#include <cstdio>

#include "chronofact/error.hpp"

namespace chronofact {
namespace {

using std::chrono::sys_days;
using std::chrono::year_month_day;

const sys_days kEpoch = sys_days{std::chrono::year{1} / std::chrono::January / 1};

}  // namespace

std::string_view to_string(Granularity g) {
  switch (g) {
    case Granularity::kDay: return "day";
    case Granularity::kMonth: return "month";
    case Granularity::kYear: return "year";
  }
  return "?";
}

Granularity granularity_from_string(std::string_view s) {
  if (s == "day") return Granularity::kDay;
  if (s == "month") return Granularity::kMonth;
  if (s == "year") return Granularity::kYear;
  throw ValidationError("unknown granularity '" + std::string(s) + "'");
}

DayIndex day_index(int year, unsigned month, unsigned day) {
  year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
  if (!ymd.ok()) throw ValidationError("invalid calendar date");
  return (sys_days{ymd} - kEpoch).count();
}

DayIndex last_day_of_month(int year, unsigned month) {
  std::chrono::year_month_day_last last{std::chrono::year{year},
                                        std::chrono::month_day_last{std::chrono::month{month}}};
  if (!last.ok()) throw ValidationError("invalid month");
  return (sys_days{last} - kEpoch).count();
}

DayIndex first_day_of_year(int year) { return day_index(year, 1, 1); }
DayIndex last_day_of_year(int year) { return day_index(year, 12, 31); }

CivilDate civil_from_day(DayIndex day) {
  year_month_day ymd{kEpoch + std::chrono::days{day}};
  return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
          static_cast<unsigned>(ymd.day())};
}

std::string format_iso_date(DayIndex day) {
  const CivilDate c = civil_from_day(day);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", c.year, c.month, c.day);
  return buf;
}

DayIndex parse_iso_date(std::string_view iso) {
  int y = 0;
  unsigned m = 0, d = 0;
  const std::string s(iso);
  char tail = 0;
  if (std::sscanf(s.c_str(), "%d-%u-%u%c", &y, &m, &d, &tail) != 3) {
    throw ValidationError("malformed ISO-8601 date '" + s + "'");
  }
  return day_index(y, m, d);
}

TimeSpan::TimeSpan(DayIndex start_day, DayIndex end_day, Granularity granularity)
    : start_(start_day), end_(end_day), granularity_(granularity) {
  if (start_ > end_) throw ValidationError("time span starts after it ends");
  const CivilDate s = civil_from_day(start_);
  const CivilDate e = civil_from_day(end_);
  if (granularity_ == Granularity::kYear && !(s.month == 1 && s.day == 1 && e.month == 12 && e.day == 31)) {
    throw ValidationError("year-granularity span must cover whole years");
  }
  if (granularity_ == Granularity::kMonth &&
      !(s.day == 1 && end_ == last_day_of_month(e.year, e.month))) {
    throw ValidationError("month-granularity span must cover whole months");
  }
}

TimeSpan TimeSpan::years(int first, int last) {
  return TimeSpan(first_day_of_year(first), last_day_of_year(last), Granularity::kYear);
}

TimeSpan TimeSpan::month(int y, unsigned m) {
  return TimeSpan(day_index(y, m, 1), last_day_of_month(y, m), Granularity::kMonth);
}

TimeSpan TimeSpan::day(int y, unsigned m, unsigned d) {
  const DayIndex i = day_index(y, m, d);
  return TimeSpan(i, i, Granularity::kDay);
}

}  // namespace chronofact
