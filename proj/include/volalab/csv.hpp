#pragma once

#include <string>
#include <vector>

#include "volalab/dates.hpp"

namespace volalab {

// Daily index closing levels. Invariants: dates strictly increasing,
// every close > 0, at least two rows.
struct PriceSeries {
    std::vector<Date> dates;
    std::vector<double> closes;

    std::size_t size() const { return dates.size(); }
};

// Daily factor returns, stored as decimals regardless of file units.
struct FactorTable {
    std::vector<Date> dates;
    std::vector<double> rf;
    std::vector<double> mkt_rf;
    std::vector<double> smb;
    std::vector<double> hml;
    std::vector<double> umd;

    std::size_t size() const { return dates.size(); }
};

enum class Units { percent, decimal };

// Reads a `date,close` CSV (ISO dates, UTF-8, LF or CRLF). Rows may arrive
// unsorted; the result is sorted by date. Throws MalformedRow, NonPositivePrice,
// DuplicateDate, EmptyFile.
PriceSeries load_price_csv(const std::string& path);

// Reads a factor CSV with columns date,mkt_rf,smb,hml,umd,rf (any column order).
// Percent inputs are divided by 100 so the table always holds decimals.
// Throws MalformedRow, MissingColumn, DuplicateDate, EmptyFile.
FactorTable load_factor_csv(const std::string& path, Units units);

// Writers emit shortest round-trip decimal text, so load(write(x)) == x exactly.
void write_price_csv(const std::string& path, const PriceSeries& series);
void write_factor_csv(const std::string& path, const FactorTable& table);

// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace volalab
