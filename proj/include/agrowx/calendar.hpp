#pragma once

#include "agrowx/error.hpp"

#include <chrono>
#include <cstdio>
#include <string>
#include <string_view>

namespace agrowx {

using Date = std::chrono::year_month_day;

inline Date make_date(int y, unsigned m, unsigned d) {
    return Date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
}

inline unsigned days_in_month(int year, unsigned month) {
    const auto last = std::chrono::year_month_day_last{std::chrono::year{year},
                                                       std::chrono::month_day_last{std::chrono::month{month}}};
    return static_cast<unsigned>(last.day());
}

inline std::chrono::sys_days to_days(const Date& d) { return std::chrono::sys_days{d}; }
inline Date from_days(std::chrono::sys_days d) { return Date{d}; }

inline Date add_days(const Date& d, long n) { return from_days(to_days(d) + std::chrono::days{n}); }

inline long days_between(const Date& a, const Date& b) { return (to_days(b) - to_days(a)).count(); }

inline int year_of(const Date& d) { return static_cast<int>(d.year()); }
inline unsigned month_of(const Date& d) { return static_cast<unsigned>(d.month()); }
inline unsigned day_of(const Date& d) { return static_cast<unsigned>(d.day()); }

inline std::string to_iso(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year_of(d), month_of(d), day_of(d));
    return buf;
}

inline Date parse_iso(std::string_view s) {
    int y = 0;
    unsigned m = 0, d = 0;
    char tail = 0;
    const std::string str(s);
    if (str.size() != 10 || std::sscanf(str.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3)
        fail(ErrorKind::Format, "bad ISO date '" + str + "'");
    const Date date = make_date(y, m, d);
    if (!date.ok()) fail(ErrorKind::Calendar, "invalid date '" + str + "'");
    return date;
}

}  // namespace agrowx
