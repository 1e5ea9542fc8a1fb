#include "volalab/panel.hpp"

#include <algorithm>
#include <string>

#include "volalab/errors.hpp"

namespace volalab {

namespace {

ReturnPanel take_rows(const ReturnPanel& panel, std::size_t begin, std::size_t end) {
    ReturnPanel out;
    auto slice = [&](const std::vector<double>& v) {
        return std::vector<double>(v.begin() + begin, v.begin() + end);
    };
    out.dates.assign(panel.dates.begin() + begin, panel.dates.begin() + end);
    out.y = slice(panel.y);
    out.rf = slice(panel.rf);
    out.mkt_rf = slice(panel.mkt_rf);
    out.smb = slice(panel.smb);
    out.hml = slice(panel.hml);
    out.umd = slice(panel.umd);
    for (int k = 0; k < 4; ++k) out.dummies[k] = slice(panel.dummies[k]);
    out.y_lags.reserve(panel.y_lags.size());
    for (const auto& lag : panel.y_lags) out.y_lags.push_back(slice(lag));
    return out;
}

}  // namespace

std::array<std::vector<double>, 4> weekday_dummies(const std::vector<Date>& dates) {
    std::array<std::vector<double>, 4> cols;
    for (auto& c : cols) c.assign(dates.size(), 0.0);
    for (std::size_t i = 0; i < dates.size(); ++i) {
        const int wd = dates[i].weekday();
        if (wd >= 5) {
            throw WeekendDate(dates[i].to_string() + " falls on a weekend");
        }
        if (wd >= 1) cols[wd - 1][i] = 1.0;  // Monday (0) is the reference
    }
    return cols;
}

ReturnPanel build_panel(const DataTable& aligned, int lag_order) {
    if (lag_order < 0) throw std::invalid_argument("lag_order must be >= 0");
    const std::size_t n = aligned.rows();
    if (n <= static_cast<std::size_t>(lag_order)) {
        throw TooFewRows("panel needs more than " + std::to_string(lag_order) + " rows, got " +
                         std::to_string(n));
    }
    const auto& y_full = aligned.column("y");
    const std::size_t skip = static_cast<std::size_t>(lag_order);
    const std::size_t kept = n - skip;

    ReturnPanel panel;
    panel.dates.assign(aligned.dates.begin() + skip, aligned.dates.end());
    auto tail = [&](const std::string& name) {
        const auto& col = aligned.column(name);
        return std::vector<double>(col.begin() + skip, col.end());
    };
    panel.y = tail("y");
    panel.rf = tail("rf");
    panel.mkt_rf = tail("mkt_rf");
    panel.smb = tail("smb");
    panel.hml = tail("hml");
    panel.umd = tail("umd");
    panel.dummies = weekday_dummies(panel.dates);

    panel.y_lags.resize(skip);
    for (std::size_t i = 0; i < skip; ++i) {
        auto& lag = panel.y_lags[i];
        lag.resize(kept);
        for (std::size_t t = 0; t < kept; ++t) lag[t] = y_full[skip + t - (i + 1)];
    }
    return panel;
}

std::pair<ReturnPanel, ReturnPanel> split_period(const ReturnPanel& panel, Date cutoff) {
    if (panel.rows() == 0) throw TooFewRows("cannot split an empty panel");
    if (cutoff < panel.dates.front() || cutoff > panel.dates.back()) {
        throw CutoffOutOfRange("cutoff " + cutoff.to_string() + " outside panel span " +
                               panel.dates.front().to_string() + ".." +
                               panel.dates.back().to_string());
    }
    const auto it = std::upper_bound(panel.dates.begin(), panel.dates.end(), cutoff);
    const std::size_t k = static_cast<std::size_t>(it - panel.dates.begin());
    return {take_rows(panel, 0, k), take_rows(panel, k, panel.rows())};
}

ReturnPanel clip_period(const ReturnPanel& panel, Date start, Date end) {
    const auto lo = std::lower_bound(panel.dates.begin(), panel.dates.end(), start);
    const auto hi = std::upper_bound(panel.dates.begin(), panel.dates.end(), end);
    const std::size_t a = static_cast<std::size_t>(lo - panel.dates.begin());
    const std::size_t b = static_cast<std::size_t>(hi - panel.dates.begin());
    if (b <= a) throw TooFewRows("no panel rows between " + start.to_string() + " and " + end.to_string());
    return take_rows(panel, a, b);
}

}  // namespace volalab
