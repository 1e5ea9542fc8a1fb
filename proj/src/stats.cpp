#include "volalab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "volalab/errors.hpp"

namespace volalab {

namespace {

constexpr const char* kWeekdayNames[5] = {"Monday", "Tuesday", "Wednesday", "Thursday", "Friday"};

// Continued fraction for the incomplete beta function (Lentz's method).
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-14;
    constexpr double kTiny = 1e-30;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw std::runtime_error("incomplete_beta: continued fraction did not converge");
}

}  // namespace

double mean(std::span<const double> x) {
    if (x.empty()) throw DegenerateSample("mean of empty sample");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
    if (x.size() < 2) throw DegenerateSample("variance needs at least 2 observations");
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) {
        const double d = v - m;
        s += d * d;
    }
    return s / static_cast<double>(x.size() - 1);
}

double sample_sd(std::span<const double> x) { return std::sqrt(sample_variance(x)); }

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete_beta: a, b must be > 0");
    if (x < 0.0 || x > 1.0) throw std::invalid_argument("incomplete_beta: x outside [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(a, b, x) / a;
    }
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
    if (!(df > 0.0)) throw std::invalid_argument("student_t_cdf: df must be > 0");
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    const double x = df / (df + t * t);
    const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, x);  // P(T >= |t|)
    return t >= 0.0 ? 1.0 - tail : tail;
}

double student_t_two_sided_p(double t, double df) {
    if (!(df > 0.0)) throw std::invalid_argument("p-value: df must be > 0");
    if (t == 0.0) return 1.0;
    return std::min(1.0, incomplete_beta(0.5 * df, 0.5, df / (df + t * t)));
}

double normal_two_sided_p(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

TTestResult paired_t_test(std::span<const double> diffs) {
    const std::size_t n = diffs.size();
    if (n < 2) throw DegenerateSample("paired t-test needs at least 2 differences");
    const double m = mean(diffs);
    const double sd = sample_sd(diffs);
    const double df = static_cast<double>(n - 1);
    if (sd == 0.0) {
        if (m == 0.0) return {0.0, df, 1.0};
        throw DegenerateSample("zero spread around nonzero mean difference");
    }
    const double t = m / (sd / std::sqrt(static_cast<double>(n)));
    return {t, df, student_t_two_sided_p(t, df)};
}

TTestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) {
        throw DegenerateSample("welch t-test needs at least 2 observations per sample");
    }
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double va = sample_variance(a) / na;
    const double vb = sample_variance(b) / nb;
    const double se2 = va + vb;
    if (se2 == 0.0) {
        if (mean(a) == mean(b)) return {0.0, na + nb - 2.0, 1.0};
        throw DegenerateSample("zero variance in both samples with unequal means");
    }
    const double t = (mean(a) - mean(b)) / std::sqrt(se2);
    const double df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    return {t, df, student_t_two_sided_p(t, df)};
}

std::string significance_stars(double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("p outside [0,1]");
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "";
}

std::array<WeekdayStats, 5> weekday_summary(const ReturnSeries& a, const ReturnSeries& b,
                                            const DateRange& period) {
    if (period.end < period.start) throw std::invalid_argument("period end before start");

    const DataTable joined = align({to_table(a, "a"), to_table(b, "b")});
    const auto& va = joined.column("a");
    const auto& vb = joined.column("b");

    std::array<std::vector<double>, 5> by_day_a, by_day_b, by_day_d;
    for (std::size_t i = 0; i < joined.rows(); ++i) {
        const Date d = joined.dates[i];
        if (d < period.start || period.end < d) continue;
        const int wd = d.weekday();
        if (wd >= 5) continue;  // calendar data could carry weekend rows; skip them
        by_day_a[wd].push_back(va[i]);
        by_day_b[wd].push_back(vb[i]);
        by_day_d[wd].push_back(va[i] - vb[i]);
    }

    std::array<WeekdayStats, 5> out;
    for (int wd = 0; wd < 5; ++wd) {
        const auto& da = by_day_a[wd];
        if (da.empty()) {
            throw NoObservations(std::string(kWeekdayNames[wd]) + " has no observations in period");
        }
        WeekdayStats& row = out[wd];
        row.weekday = kWeekdayNames[wd];
        row.n = static_cast<long>(da.size());
        row.mean_a = mean(da);
        row.mean_b = mean(by_day_b[wd]);
        row.mean_diff = mean(by_day_d[wd]);
        if (row.n >= 2) {
            row.sd_a = sample_sd(da);
            row.sd_b = sample_sd(by_day_b[wd]);
            row.sd_diff = sample_sd(by_day_d[wd]);
            const TTestResult tt = paired_t_test(by_day_d[wd]);
            row.t = tt.t;
            row.df = tt.df;
            row.p = tt.p;
            row.stars = significance_stars(tt.p);
        } else {
            row.sd_a = row.sd_b = row.sd_diff = std::numeric_limits<double>::quiet_NaN();
            row.t = row.df = row.p = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return out;
}

}  // namespace volalab
