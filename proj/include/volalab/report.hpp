#pragma once

#include <array>
#include <string>
#include <vector>

#include "volalab/estimate.hpp"
#include "volalab/stats.hpp"

namespace volalab {

// One describe block: the five weekday rows of a period.
struct PeriodStats {
    std::string label;  // "full", "pre", "post"
    Date start;
    Date end;
    std::array<WeekdayStats, 5> rows;
};

// Fixed-width text in the Table-1 layout: per weekday, the two series and
// their difference with Mean(%), St.Dev(%), StdErr(%), then the t-test line.
// Percentages carry three decimal places.
std::string describe_text(const std::vector<PeriodStats>& periods, const std::string& name_a,
                          const std::string& name_b);

// Machine-readable rows, header:
// period,weekday,n,mean_a_pct,mean_b_pct,mean_diff_pct,sd_a_pct,sd_b_pct,
// sd_diff_pct,se_diff_pct,t,df,p,significance
std::string describe_csv(const std::vector<PeriodStats>& periods);

struct FitReportMeta {
    std::string period_label;
    Date start;
    Date end;
};

// Fixed-width text in the Tables-2/4 layout. Mean rows in order Tue, Wed,
// Thu, Fri, Rf, Rm-Rf, SMB, HML, UMD, R_lag<i>; then the variance block
// a (news), b (persistence), gamma (asymmetric families only), Intercept.
// Columns: Coef., Std. Err., Sig.
std::string fit_text(const FitResult& fit, const FitReportMeta& meta);

// Every estimated parameter by internal name, full precision, header:
// name,coef,std_err,t_stat,p_value,significance
std::string fit_csv(const FitResult& fit);

// One summary row per fit, header:
// family,period,n,loglik,converged,iterations,gradient_norm,q0
std::string fits_summary_csv(const std::vector<std::pair<FitReportMeta, const FitResult*>>& fits);

// Plot data: date,return rows.
std::string returns_csv(const ReturnSeries& series);
// Plot data: date,close_a,close_b on the shared dates of the two series.
std::string prices_compare_csv(const PriceSeries& a, const PriceSeries& b);

// Display labels of the mean and variance blocks in report order.
std::vector<std::string> fit_report_rows(const FitResult& fit);

std::string format_percent(double value);

}  // namespace volalab
