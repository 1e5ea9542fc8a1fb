#include "volalab/series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "volalab/errors.hpp"

namespace volalab {

ReturnMethod parse_return_method(const std::string& name) {
    if (name == "simple") return ReturnMethod::simple;
    if (name == "log") return ReturnMethod::log;
    throw std::invalid_argument("unknown return method '" + name + "'");
}

std::string to_string(ReturnMethod method) {
    return method == ReturnMethod::simple ? "simple" : "log";
}

ReturnSeries compute_returns(const PriceSeries& prices, ReturnMethod method) {
    if (prices.size() < 2) {
        throw TooShort("need at least 2 prices, got " + std::to_string(prices.size()));
    }
    ReturnSeries out;
    out.method = method;
    const std::size_t n = prices.size() - 1;
    out.dates.assign(prices.dates.begin() + 1, prices.dates.end());
    out.returns.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double ratio = prices.closes[t + 1] / prices.closes[t];
        out.returns[t] = method == ReturnMethod::simple ? ratio - 1.0 : std::log(ratio);
    }
    return out;
}

void DataTable::add_column(std::string name, std::vector<double> values) {
    if (values.size() != dates.size()) {
        throw DimensionMismatch("column '" + name + "' has " + std::to_string(values.size()) +
                                " rows, table has " + std::to_string(dates.size()));
    }
    if (has_column(name)) {
        throw std::invalid_argument("duplicate column name '" + name + "'");
    }
    names.push_back(std::move(name));
    columns.push_back(std::move(values));
}

const std::vector<double>& DataTable::column(const std::string& name) const {
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (names[j] == name) return columns[j];
    }
    throw MissingColumn("no column named '" + name + "'");
}

bool DataTable::has_column(const std::string& name) const {
    return std::find(names.begin(), names.end(), name) != names.end();
}

DataTable to_table(const ReturnSeries& series, const std::string& column_name) {
    DataTable t;
    t.dates = series.dates;
    t.add_column(column_name, series.returns);
    return t;
}

DataTable to_table(const FactorTable& factors) {
    DataTable t;
    t.dates = factors.dates;
    t.add_column("rf", factors.rf);
    t.add_column("mkt_rf", factors.mkt_rf);
    t.add_column("smb", factors.smb);
    t.add_column("hml", factors.hml);
    t.add_column("umd", factors.umd);
    return t;
}

DataTable align(const std::vector<DataTable>& tables) {
    if (tables.size() < 2) {
        throw std::invalid_argument("align requires at least 2 tables");
    }
    for (const auto& t : tables) {
        if (!strictly_increasing(t.dates)) {
            throw std::invalid_argument("align input dates must be strictly increasing");
        }
    }

    std::vector<Date> common = tables[0].dates;
    for (std::size_t i = 1; i < tables.size(); ++i) {
        std::vector<Date> next;
        std::set_intersection(common.begin(), common.end(), tables[i].dates.begin(),
                              tables[i].dates.end(), std::back_inserter(next));
        common = std::move(next);
    }
    if (common.empty()) throw EmptyIntersection("no shared dates across inputs");

    DataTable out;
    out.dates = common;
    for (const auto& t : tables) {
        // Row indices of the common dates within this table.
        std::vector<std::size_t> idx;
        idx.reserve(common.size());
        std::size_t pos = 0;
        for (const Date& d : common) {
            while (t.dates[pos] < d) ++pos;
            idx.push_back(pos);
        }
        for (std::size_t j = 0; j < t.names.size(); ++j) {
            std::vector<double> col;
            col.reserve(idx.size());
            for (std::size_t r : idx) col.push_back(t.columns[j][r]);
            out.add_column(t.names[j], std::move(col));
        }
    }
    return out;
}

}  // namespace volalab
