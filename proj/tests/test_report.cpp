#include "doctest.h"

#include <sstream>

#include "helpers.hpp"
#include "volalab/estimate.hpp"
#include "volalab/report.hpp"
#include "volalab/simulate.hpp"

using namespace volalab;

namespace {

FitResult quick_fit(Family family) {
    SimulationConfig cfg;
    cfg.family = family;
    cfg.mean.intercept = 1e-4;
    if (family == Family::egarch) {
        cfg.variance.vc = -0.5;
        cfg.variance.va = 0.90;
        cfg.variance.vb = 0.10;
        cfg.variance.gamma = -0.05;
    } else {
        cfg.variance.vc = 0.05e-4;
        cfg.variance.va = 0.85;
        cfg.variance.vb = 0.10;
        cfg.variance.gamma = family == Family::gjr ? 0.05 : 0.0;
    }
    cfg.mean.ylag = {0.03};
    cfg.factors = FactorSimConfig{};
    cfg.n = 1600;
    cfg.seed = 31;
    const SimulationResult sim = simulate(cfg);
    ModelSpec spec;
    spec.family = family;
    spec.lag_order = 1;
    return fit(sim.panel, spec);
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("report row order follows the table layout") {
    const FitResult garch = quick_fit(Family::garch);
    const std::vector<std::string> expected{"Tue", "Wed", "Thu",   "Fri", "Rf",
                                            "Rm-Rf", "SMB", "HML", "UMD", "R_lag1",
                                            "Variance Equation", "a",   "b", "Intercept"};
    CHECK(fit_report_rows(garch) == expected);

    const FitResult gjr = quick_fit(Family::gjr);
    const std::vector<std::string> with_gamma{"Tue", "Wed", "Thu",   "Fri", "Rf",
                                              "Rm-Rf", "SMB", "HML", "UMD", "R_lag1",
                                              "Variance Equation", "a",   "b", "gamma",
                                              "Intercept"};
    CHECK(fit_report_rows(gjr) == with_gamma);
}

TEST_CASE("plain garch text omits the gamma row, asymmetric families keep it") {
    const FitReportMeta meta{"full", Date(2002, 1, 2), Date(2015, 12, 31)};
    const std::string garch_text = fit_text(quick_fit(Family::garch), meta);
    CHECK(garch_text.find("\ngamma") == std::string::npos);
    CHECK(garch_text.find("Variance Equation") != std::string::npos);
    CHECK(garch_text.find("Intercept") != std::string::npos);

    const std::string gjr_text = fit_text(quick_fit(Family::gjr), meta);
    CHECK(gjr_text.find("\ngamma") != std::string::npos);

    // Mean rows appear in documented order.
    const auto lines = lines_of(gjr_text);
    std::vector<std::string> labels;
    for (const auto& line : lines) {
        const auto space = line.find_first_of(" \t");
        if (space != std::string::npos) labels.push_back(line.substr(0, space));
    }
    auto pos = [&](const std::string& label) {
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == label) return static_cast<long>(i);
        }
        return -1L;
    };
    CHECK(pos("Tue") < pos("Wed"));
    CHECK(pos("Wed") < pos("Thu"));
    CHECK(pos("Thu") < pos("Fri"));
    CHECK(pos("Fri") < pos("Rf"));
    CHECK(pos("Rf") < pos("Rm-Rf"));
    CHECK(pos("Rm-Rf") < pos("SMB"));
    CHECK(pos("SMB") < pos("HML"));
    CHECK(pos("HML") < pos("UMD"));
    CHECK(pos("UMD") < pos("R_lag1"));
    CHECK(pos("R_lag1") < pos("Variance"));
    CHECK(pos("a") < pos("b"));
    CHECK(pos("b") < pos("gamma"));
    CHECK(pos("gamma") < pos("Intercept"));
}

TEST_CASE("variance block maps a to the news and b to the persistence coefficient") {
    const FitResult fr = quick_fit(Family::garch);
    const FitReportMeta meta{"full", Date(2002, 1, 2), Date(2015, 12, 31)};
    const std::string text = fit_text(fr, meta);
    char expect_a[64], expect_b[64];
    std::snprintf(expect_a, sizeof(expect_a), "a          %12.6f", fr.entry("vb").estimate);
    std::snprintf(expect_b, sizeof(expect_b), "b          %12.6f", fr.entry("va").estimate);
    CHECK(text.find(expect_a) != std::string::npos);
    CHECK(text.find(expect_b) != std::string::npos);
}

TEST_CASE("percent formatting uses three decimals") {
    CHECK(format_percent(-0.0016) == "-0.160%");
    CHECK(format_percent(0.0) == "0.000%");
    CHECK(format_percent(0.01234) == "1.234%");
}

TEST_CASE("describe csv header is the documented contract") {
    PeriodStats ps;
    ps.label = "full";
    ps.start = Date(2002, 1, 2);
    ps.end = Date(2002, 3, 1);
    for (int i = 0; i < 5; ++i) {
        ps.rows[i].weekday = "Monday";
        ps.rows[i].n = 5;
        ps.rows[i].mean_a = 0.001;
        ps.rows[i].mean_b = 0.002;
        ps.rows[i].mean_diff = -0.001;
        ps.rows[i].sd_a = ps.rows[i].sd_b = ps.rows[i].sd_diff = 0.01;
        ps.rows[i].t = -0.5;
        ps.rows[i].df = 4;
        ps.rows[i].p = 0.64;
    }
    const auto lines = lines_of(describe_csv({ps}));
    REQUIRE(lines.size() == 6);
    CHECK(lines[0] ==
          "period,weekday,n,mean_a_pct,mean_b_pct,mean_diff_pct,sd_a_pct,sd_b_pct,"
          "sd_diff_pct,se_diff_pct,t,df,p,significance");
    CHECK(lines[1].rfind("full,Monday,5,", 0) == 0);
}

TEST_CASE("fit csv carries every parameter with full precision") {
    const FitResult fr = quick_fit(Family::garch);
    const auto lines = lines_of(fit_csv(fr));
    CHECK(lines[0] == "name,coef,std_err,t_stat,p_value,significance");
    REQUIRE(lines.size() == fr.params.size() + 1);
    CHECK(lines[1].rfind("const,", 0) == 0);
    bool saw_vc = false;
    for (const auto& line : lines) {
        if (line.rfind("vc,", 0) == 0) saw_vc = true;
    }
    CHECK(saw_vc);
}

TEST_CASE("plot csv emitters") {
    ReturnSeries r;
    r.dates = {Date(2002, 1, 3), Date(2002, 1, 4)};
    r.returns = {0.01, -0.02};
    const auto lines = lines_of(returns_csv(r));
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "date,return");
    CHECK(lines[1] == "2002-01-03,0.01");

    PriceSeries a, b;
    a.dates = {Date(2002, 1, 2), Date(2002, 1, 3), Date(2002, 1, 4)};
    a.closes = {1.0, 2.0, 3.0};
    b.dates = {Date(2002, 1, 3), Date(2002, 1, 4), Date(2002, 1, 7)};
    b.closes = {10.0, 20.0, 30.0};
    const auto cmp = lines_of(prices_compare_csv(a, b));
    REQUIRE(cmp.size() == 3);  // header + 2 shared dates
    CHECK(cmp[0] == "date,close_a,close_b");
    CHECK(cmp[1] == "2002-01-03,2,10");
}
