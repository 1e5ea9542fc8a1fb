#pragma once

#include <compare>
#include <string>
#include <vector>

namespace volalab {

// Calendar date (no time component), stored as days since 1970-01-01.
class Date {
  public:
    Date() = default;
    Date(int year, int month, int day);

    // Parses strict ISO-8601 "YYYY-MM-DD". Throws std::invalid_argument otherwise.
    static Date parse(const std::string& text);

    std::string to_string() const;

    int year() const;
    int month() const;
    int day() const;

    // 0 = Monday ... 6 = Sunday.
    int weekday() const;
    bool is_weekend() const { return weekday() >= 5; }

    int serial() const { return serial_; }
    static Date from_serial(int serial) {
        Date d;
        d.serial_ = serial;
        return d;
    }

    Date operator+(int days) const { return from_serial(serial_ + days); }
    Date operator-(int days) const { return from_serial(serial_ - days); }
    int operator-(Date other) const { return serial_ - other.serial_; }
    auto operator<=>(const Date&) const = default;

  private:
    int serial_ = 0;
};

// Business-day step, Monday-Friday, no holiday calendar. `steps` may be negative.
Date add_business_days(Date d, int steps);

// True when `dates` is strictly increasing (implies no duplicates).
bool strictly_increasing(const std::vector<Date>& dates);

}  // namespace volalab
