#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "volalab/dates.hpp"
#include "volalab/series.hpp"

namespace volalab {

// Regression panel for the weekday/factor mean equation. Monday is the
// reference category, so a Monday row has all four dummies at zero.
// y_lags[i] holds y shifted by i+1 days; rows without full lag history are
// dropped at construction, so every column is complete.
struct ReturnPanel {
    std::vector<Date> dates;
    std::vector<double> y;
    std::vector<double> rf;
    std::vector<double> mkt_rf;
    std::vector<double> smb;
    std::vector<double> hml;
    std::vector<double> umd;
    std::array<std::vector<double>, 4> dummies;  // Tue, Wed, Thu, Fri
    std::vector<std::vector<double>> y_lags;

    std::size_t rows() const { return dates.size(); }
    int lag_order() const { return static_cast<int>(y_lags.size()); }
};

// One 0/1 column per weekday Tuesday..Friday. Throws WeekendDate on
// Saturday/Sunday input.
std::array<std::vector<double>, 4> weekday_dummies(const std::vector<Date>& dates);

// Builds the panel from aligned data holding columns y, rf, mkt_rf, smb, hml,
// umd. The first `lag_order` rows are consumed as lag history. Throws
// TooFewRows when length <= lag_order.
ReturnPanel build_panel(const DataTable& aligned, int lag_order);

// Splits at `cutoff`: the cutoff date itself belongs to the pre period.
// Throws CutoffOutOfRange when cutoff lies outside [first date, last date].
std::pair<ReturnPanel, ReturnPanel> split_period(const ReturnPanel& panel, Date cutoff);

// Restricts the panel to dates in [start, end].
ReturnPanel clip_period(const ReturnPanel& panel, Date start, Date end);

}  // namespace volalab
