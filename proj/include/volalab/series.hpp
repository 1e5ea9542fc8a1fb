#pragma once

#include <string>
#include <vector>

#include "volalab/csv.hpp"
#include "volalab/dates.hpp"

namespace volalab {

enum class ReturnMethod { simple, log };

ReturnMethod parse_return_method(const std::string& name);
std::string to_string(ReturnMethod method);

// Per-day returns as decimals. returns[i] is the return realized on dates[i],
// computed from the close at dates[i] against the previous close.
struct ReturnSeries {
    std::vector<Date> dates;
    std::vector<double> returns;
    ReturnMethod method = ReturnMethod::log;

    std::size_t size() const { return dates.size(); }
};

// Throws TooShort for fewer than 2 prices.
ReturnSeries compute_returns(const PriceSeries& prices, ReturnMethod method);

// A date-indexed bundle of named numeric columns, the common currency for
// alignment. Column names must be unique within a table.
struct DataTable {
    std::vector<Date> dates;
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;

    std::size_t rows() const { return dates.size(); }
    void add_column(std::string name, std::vector<double> values);
    const std::vector<double>& column(const std::string& name) const;
    bool has_column(const std::string& name) const;
};

DataTable to_table(const ReturnSeries& series, const std::string& column_name);
DataTable to_table(const FactorTable& factors);

// Inner join on dates: output rows are the intersection of all input date
// sets, every column carried through. Requires at least two inputs; throws
// EmptyIntersection when no date is shared.
DataTable align(const std::vector<DataTable>& tables);

}  // namespace volalab
