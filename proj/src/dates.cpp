#include "volalab/dates.hpp"

#include <chrono>
#include <cctype>
#include <stdexcept>

namespace volalab {

namespace chr = std::chrono;

namespace {

chr::year_month_day to_ymd(int serial) {
    return chr::year_month_day{chr::sys_days{chr::days{serial}}};
}

}  // namespace

Date::Date(int year, int month, int day) {
    chr::year_month_day ymd{chr::year{year}, chr::month{static_cast<unsigned>(month)},
                            chr::day{static_cast<unsigned>(day)}};
    if (!ymd.ok()) {
        throw std::invalid_argument("invalid calendar date: " + std::to_string(year) + "-" +
                                    std::to_string(month) + "-" + std::to_string(day));
    }
    serial_ = static_cast<int>(chr::sys_days{ymd}.time_since_epoch().count());
}

Date Date::parse(const std::string& text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw std::invalid_argument("expected YYYY-MM-DD, got '" + text + "'");
    }
    for (int i : {0, 1, 2, 3, 5, 6, 8, 9}) {
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
            throw std::invalid_argument("expected YYYY-MM-DD, got '" + text + "'");
        }
    }
    const int y = std::stoi(text.substr(0, 4));
    const int m = std::stoi(text.substr(5, 2));
    const int d = std::stoi(text.substr(8, 2));
    return Date(y, m, d);
}

std::string Date::to_string() const {
    const auto ymd = to_ymd(serial_);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

int Date::year() const { return static_cast<int>(to_ymd(serial_).year()); }
int Date::month() const { return static_cast<int>(static_cast<unsigned>(to_ymd(serial_).month())); }
int Date::day() const { return static_cast<int>(static_cast<unsigned>(to_ymd(serial_).day())); }

int Date::weekday() const {
    const chr::weekday wd{chr::sys_days{chr::days{serial_}}};
    return static_cast<int>(wd.iso_encoding()) - 1;  // iso: Mon=1..Sun=7
}

Date add_business_days(Date d, int steps) {
    const int dir = steps >= 0 ? 1 : -1;
    int remaining = steps >= 0 ? steps : -steps;
    while (remaining > 0) {
        d = d + dir;
        if (!d.is_weekend()) --remaining;
    }
    // Snap a weekend endpoint to the nearest business day in the walk direction.
    while (d.is_weekend()) d = d + dir;
    return d;
}

bool strictly_increasing(const std::vector<Date>& dates) {
    for (std::size_t i = 1; i < dates.size(); ++i) {
        if (!(dates[i - 1] < dates[i])) return false;
    }
    return true;
}

}  // namespace volalab
