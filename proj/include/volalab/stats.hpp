#pragma once

#include <array>
#include <span>
#include <string>

#include "volalab/dates.hpp"
#include "volalab/series.hpp"

namespace volalab {

double mean(std::span<const double> x);
// Unbiased (n-1) sample variance / standard deviation.
double sample_variance(std::span<const double> x);
double sample_sd(std::span<const double> x);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);
// P(T <= t) for Student-t with df degrees of freedom.
double student_t_cdf(double t, double df);
// Two-sided tail probability P(|T| >= |t|).
double student_t_two_sided_p(double t, double df);
// Two-sided normal tail probability P(|Z| >= |z|).
double normal_two_sided_p(double z);

struct TTestResult {
    double t;
    double df;
    double p;
};

// t = mean(d) / (sd(d)/sqrt(n)), df = n-1. All-zero differences give t = 0,
// p = 1. Throws DegenerateSample for n < 2 or zero spread around a nonzero mean.
TTestResult paired_t_test(std::span<const double> diffs);

// Welch unequal-variance statistic with Welch-Satterthwaite df.
TTestResult welch_t_test(std::span<const double> a, std::span<const double> b);

// "***" p<0.001, "**" p<0.01, "*" p<0.05, "" otherwise (strict inequalities).
std::string significance_stars(double p);

// One per-weekday comparison row for two same-day return series.
// A t statistic is only defined for n >= 2; rows with n == 1 carry NaN there.
struct WeekdayStats {
    std::string weekday;
    double mean_a = 0.0;
    double mean_b = 0.0;
    double mean_diff = 0.0;
    double sd_a = 0.0;
    double sd_b = 0.0;
    double sd_diff = 0.0;
    long n = 0;
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
    std::string stars;
};

struct DateRange {
    Date start;
    Date end;
};

// Monday..Friday rows over same-day pairs of (a, b) within the period.
// The paired t-test runs on the per-day differences a - b. Throws
// NoObservations when a weekday has no shared date in the period.
std::array<WeekdayStats, 5> weekday_summary(const ReturnSeries& a, const ReturnSeries& b,
                                            const DateRange& period);

}  // namespace volalab
