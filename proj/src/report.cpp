#include "volalab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "volalab/errors.hpp"

namespace volalab {

namespace {

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, v);
    return buf;
}

std::string coef(double v) { return std::isnan(v) ? "nan" : fmt("%12.6f", v); }

std::string csv_num(double v) { return fmt("%.12g", v); }

// Display rows of the mean block: label and internal parameter name.
std::vector<std::pair<std::string, std::string>> mean_rows(const FitResult& fit) {
    std::vector<std::pair<std::string, std::string>> rows = {
        {"Tue", "tue"},   {"Wed", "wed"},       {"Thu", "thu"}, {"Fri", "fri"},
        {"Rf", "rf"},     {"Rm-Rf", "mkt_rf"},  {"SMB", "smb"}, {"HML", "hml"},
        {"UMD", "umd"},
    };
    for (int i = 1; i <= static_cast<int>(fit.mean.ylag.size()); ++i) {
        rows.emplace_back("R_lag" + std::to_string(i), "ylag" + std::to_string(i));
    }
    return rows;
}

// Variance block in table order: a = news (vb), b = persistence (va),
// gamma for the asymmetric families, Intercept = vc.
std::vector<std::pair<std::string, std::string>> variance_rows(const FitResult& fit) {
    std::vector<std::pair<std::string, std::string>> rows = {{"a", "vb"}, {"b", "va"}};
    if (fit.spec.family != Family::garch) rows.emplace_back("gamma", "gamma");
    rows.emplace_back("Intercept", "vc");
    return rows;
}

void append_entry_line(std::ostringstream& out, const std::string& label, const ParamEntry& e) {
    char line[128];
    std::snprintf(line, sizeof(line), "%-10s %12s  %12s  %-3s\n", label.c_str(),
                  coef(e.estimate).c_str(), coef(e.std_err).c_str(), e.stars.c_str());
    out << line;
}

}  // namespace

std::string format_percent(double value) {
    if (std::isnan(value)) return "nan";
    return fmt("%.3f", value * 100.0) + "%";
}

std::string describe_text(const std::vector<PeriodStats>& periods, const std::string& name_a,
                          const std::string& name_b) {
    std::ostringstream out;
    for (const auto& period : periods) {
        out << "===== period " << period.label << " (" << period.start.to_string() << " .. "
            << period.end.to_string() << ") =====\n";
        char header[160];
        std::snprintf(header, sizeof(header), "%-10s %-18s %12s %12s %12s\n", "Day", "Series",
                      "Mean(%)", "St.Dev(%)", "StdErr(%)");
        out << header;
        for (const auto& row : period.rows) {
            const double rn = static_cast<double>(row.n);
            auto line = [&](const std::string& day, const std::string& series, double m, double sd) {
                char buf[160];
                const double se = sd / std::sqrt(rn);
                std::snprintf(buf, sizeof(buf), "%-10s %-18s %12s %12s %12s\n", day.c_str(),
                              series.c_str(), format_percent(m).c_str(), format_percent(sd).c_str(),
                              format_percent(se).c_str());
                out << buf;
            };
            line(row.weekday, name_a, row.mean_a, row.sd_a);
            line("", name_b, row.mean_b, row.sd_b);
            line("", "Difference", row.mean_diff, row.sd_diff);
            char tbuf[160];
            std::snprintf(tbuf, sizeof(tbuf), "%-10s T-test %8.4f  df %6.0f  p %.6f  Sig. %-3s  N %ld\n",
                          "", row.t, row.df, row.p, row.stars.c_str(), row.n);
            out << tbuf;
        }
        out << '\n';
    }
    return out.str();
}

std::string describe_csv(const std::vector<PeriodStats>& periods) {
    std::ostringstream out;
    out << "period,weekday,n,mean_a_pct,mean_b_pct,mean_diff_pct,sd_a_pct,sd_b_pct,"
           "sd_diff_pct,se_diff_pct,t,df,p,significance\n";
    for (const auto& period : periods) {
        for (const auto& row : period.rows) {
            const double rn = static_cast<double>(row.n);
            out << period.label << ',' << row.weekday << ',' << row.n << ','
                << csv_num(row.mean_a * 100.0) << ',' << csv_num(row.mean_b * 100.0) << ','
                << csv_num(row.mean_diff * 100.0) << ',' << csv_num(row.sd_a * 100.0) << ','
                << csv_num(row.sd_b * 100.0) << ',' << csv_num(row.sd_diff * 100.0) << ','
                << csv_num(row.sd_diff / std::sqrt(rn) * 100.0) << ',' << csv_num(row.t) << ','
                << csv_num(row.df) << ',' << csv_num(row.p) << ',' << row.stars << '\n';
        }
    }
    return out.str();
}

std::vector<std::string> fit_report_rows(const FitResult& fit) {
    std::vector<std::string> labels;
    for (const auto& [label, name] : mean_rows(fit)) labels.push_back(label);
    labels.push_back("Variance Equation");
    for (const auto& [label, name] : variance_rows(fit)) labels.push_back(label);
    return labels;
}

std::string fit_text(const FitResult& fit, const FitReportMeta& meta) {
    std::ostringstream out;
    out << "===== " << to_string(fit.spec.family) << " | period " << meta.period_label << " ("
        << meta.start.to_string() << " .. " << meta.end.to_string() << ") =====\n";
    char info[256];
    std::snprintf(info, sizeof(info),
                  "n=%ld  logLik=%.6f  converged=%s  iterations=%d  gradientNorm=%.3e\n",
                  fit.n_obs, fit.loglik, fit.converged ? "yes" : "no", fit.iterations,
                  fit.gradient_norm);
    out << info;
    out << "p-values: normal approximation (quasi-ML)";
    if (!fit.se_ok) out << "  [standard errors unavailable: singular Hessian]";
    out << '\n';

    char header[128];
    std::snprintf(header, sizeof(header), "%-10s %12s  %12s  %-4s\n", "", "Coef.", "Std. Err.",
                  "Sig.");
    out << header;
    for (const auto& [label, name] : mean_rows(fit)) {
        append_entry_line(out, label, fit.entry(name));
    }
    out << "Variance Equation\n";
    for (const auto& [label, name] : variance_rows(fit)) {
        append_entry_line(out, label, fit.entry(name));
    }
    return out.str();
}

std::string fit_csv(const FitResult& fit) {
    std::ostringstream out;
    out << "name,coef,std_err,t_stat,p_value,significance\n";
    for (const auto& e : fit.params) {
        out << e.name << ',' << csv_num(e.estimate) << ',' << csv_num(e.std_err) << ','
            << csv_num(e.t_stat) << ',' << csv_num(e.p_value) << ',' << e.stars << '\n';
    }
    return out.str();
}

std::string fits_summary_csv(const std::vector<std::pair<FitReportMeta, const FitResult*>>& fits) {
    std::ostringstream out;
    out << "family,period,n,loglik,converged,iterations,gradient_norm,q0\n";
    for (const auto& [meta, fit] : fits) {
        out << to_string(fit->spec.family) << ',' << meta.period_label << ',' << fit->n_obs << ','
            << csv_num(fit->loglik) << ',' << (fit->converged ? 1 : 0) << ',' << fit->iterations
            << ',' << csv_num(fit->gradient_norm) << ',' << csv_num(fit->q0) << '\n';
    }
    return out.str();
}

std::string returns_csv(const ReturnSeries& series) {
    std::ostringstream out;
    out << "date,return\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << series.dates[i].to_string() << ',' << format_double(series.returns[i]) << '\n';
    }
    return out.str();
}

std::string prices_compare_csv(const PriceSeries& a, const PriceSeries& b) {
    std::ostringstream out;
    out << "date,close_a,close_b\n";
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a.dates[i] < b.dates[j]) {
            ++i;
        } else if (b.dates[j] < a.dates[i]) {
            ++j;
        } else {
            out << a.dates[i].to_string() << ',' << format_double(a.closes[i]) << ','
                << format_double(b.closes[j]) << '\n';
            ++i;
            ++j;
        }
    }
    return out.str();
}

}  // namespace volalab
