#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "volalab/csv.hpp"
#include "volalab/errors.hpp"
#include "volalab/series.hpp"
#include "volalab/simulate.hpp"
#include "volalab/stats.hpp"

using namespace volalab;

namespace {

SimulationConfig garch_config(std::uint64_t seed, int n) {
    SimulationConfig cfg;
    cfg.family = Family::garch;
    cfg.mean.intercept = 1e-4;
    cfg.variance.vc = 0.05e-4;
    cfg.variance.va = 0.85;
    cfg.variance.vb = 0.10;
    cfg.n = n;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("same seed reproduces the panel exactly") {
    const SimulationResult a = simulate(garch_config(42, 500));
    const SimulationResult b = simulate(garch_config(42, 500));
    REQUIRE(a.panel.rows() == b.panel.rows());
    for (std::size_t t = 0; t < a.panel.rows(); ++t) {
        CHECK(a.panel.y[t] == b.panel.y[t]);
        CHECK(a.true_q2[t] == b.true_q2[t]);
        CHECK(a.panel.dates[t] == b.panel.dates[t]);
    }
    const SimulationResult c = simulate(garch_config(43, 500));
    CHECK(a.panel.y[0] != c.panel.y[0]);
    CHECK(a.rng_algorithm == "box-muller/mt19937_64");
}

TEST_CASE("iid case: sample variance approaches vc") {
    SimulationConfig cfg;
    cfg.family = Family::garch;
    cfg.variance.vc = 0.04;
    cfg.variance.va = 0.0;
    cfg.variance.vb = 0.0;
    cfg.n = 100000;
    cfg.seed = 7;
    const SimulationResult sim = simulate(cfg);
    const double v = sample_variance(sim.panel.y);
    CHECK(v == doctest::Approx(0.04).epsilon(0.03));
    for (double q : sim.true_q2) CHECK(q == 0.04);
}

TEST_CASE("standardized residuals have unit variance") {
    SimulationConfig cfg = garch_config(101, 100000);
    const SimulationResult sim = simulate(cfg);
    std::vector<double> z(sim.panel.rows());
    for (std::size_t t = 0; t < z.size(); ++t) {
        const double e = sim.panel.y[t] - cfg.mean.intercept;
        z[t] = e / std::sqrt(sim.true_q2[t]);
    }
    const double v = sample_variance(z);
    CHECK(v >= 0.97);
    CHECK(v <= 1.03);
}

TEST_CASE("long-run variance matches the closed form") {
    SimulationConfig cfg;
    cfg.family = Family::garch;
    cfg.variance.vc = 0.1;
    cfg.variance.va = 0.90;
    cfg.variance.vb = 0.05;
    cfg.n = 1000000;
    cfg.seed = 3;
    const SimulationResult sim = simulate(cfg);
    CHECK(sample_variance(sim.panel.y) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("generated panel satisfies the panel invariants") {
    SimulationConfig cfg = garch_config(55, 3000);
    cfg.mean.ylag = {0.05};
    cfg.factors = FactorSimConfig{};
    const SimulationResult sim = simulate(cfg);
    const ReturnPanel& p = sim.panel;
    CHECK(p.rows() == 3000);
    CHECK(strictly_increasing(p.dates));
    CHECK(p.lag_order() == 1);
    for (std::size_t t = 0; t < p.rows(); ++t) {
        double row = 0.0;
        for (int k = 0; k < 4; ++k) {
            CHECK((p.dummies[k][t] == 0.0 || p.dummies[k][t] == 1.0));
            row += p.dummies[k][t];
        }
        CHECK(row == (p.dates[t].weekday() == 0 ? 0.0 : 1.0));
        if (t >= 1) CHECK(p.y_lags[0][t] == p.y[t - 1]);
        CHECK(sim.true_q2[t] > 0.0);
    }
    CHECK(p.dates.front() == add_business_days(cfg.start_date, 0));
}

TEST_CASE("burn-in length does not move the kept moments") {
    SimulationConfig a = garch_config(77, 60000);
    a.burn_in = 500;
    SimulationConfig b = a;
    b.burn_in = 1000;
    const double va = sample_variance(simulate(a).panel.y);
    const double vb = sample_variance(simulate(b).panel.y);
    CHECK(std::fabs(va - vb) / vb < 0.02);
}

TEST_CASE("weekday effect injection") {
    const SimulationResult sim = simulate(garch_config(88, 1000));
    const std::array<double, 5> zero{};
    const ReturnPanel same = inject_weekday_effect(sim.panel, zero);
    for (std::size_t t = 0; t < same.rows(); ++t) CHECK(same.y[t] == sim.panel.y[t]);

    const std::array<double, 5> offsets{-0.001, 0.0, 0.0005, 0.0, 0.0};
    const ReturnPanel moved = inject_weekday_effect(sim.panel, offsets);
    for (std::size_t t = 0; t < moved.rows(); ++t) {
        const int wd = moved.dates[t].weekday();
        CHECK(moved.y[t] == doctest::Approx(sim.panel.y[t] + offsets[wd]).epsilon(1e-15));
    }

    std::array<double, 5> negated;
    for (int i = 0; i < 5; ++i) negated[i] = -offsets[i];
    const ReturnPanel back = inject_weekday_effect(moved, negated);
    for (std::size_t t = 0; t < back.rows(); ++t) {
        CHECK(std::fabs(back.y[t] - sim.panel.y[t]) < 1e-15);
    }
}

TEST_CASE("generative weekday offsets shift the per-day means") {
    SimulationConfig cfg = garch_config(61, 60000);
    cfg.weekday_effect = {{-0.002, 0.0, 0.0, 0.0, 0.0}};
    const SimulationResult sim = simulate(cfg);
    std::array<double, 5> sum{};
    std::array<long, 5> count{};
    for (std::size_t t = 0; t < sim.panel.rows(); ++t) {
        const int wd = sim.panel.dates[t].weekday();
        sum[wd] += sim.panel.y[t];
        count[wd] += 1;
    }
    const double monday_mean = sum[0] / static_cast<double>(count[0]);
    CHECK(monday_mean == doctest::Approx(cfg.mean.intercept - 0.002).epsilon(0.15));
    for (int wd = 1; wd < 5; ++wd) {
        const double mean_wd = sum[wd] / static_cast<double>(count[wd]);
        CHECK(std::fabs(mean_wd - cfg.mean.intercept) < 3e-4);
    }
}

TEST_CASE("simulation rejects invalid parameters") {
    SimulationConfig cfg = garch_config(1, 100);
    cfg.variance.va = 0.95;
    cfg.variance.vb = 0.10;  // va + vb >= 1
    CHECK_THROWS_AS(simulate(cfg), ConstraintViolation);

    SimulationConfig neg = garch_config(1, 0);
    CHECK_THROWS_AS(simulate(neg), std::invalid_argument);
}

TEST_CASE("emitted files reload through ingestion") {
    SimulationConfig cfg = garch_config(99, 800);
    cfg.factors = FactorSimConfig{};
    const SimulationResult sim = simulate(cfg);
    const EmittedPanel files = emit_panel(sim.panel);

    testutil::TempDir dir;
    write_price_csv(dir.file("dep.csv"), files.prices);
    write_price_csv(dir.file("mkt.csv"), files.market_prices);
    write_factor_csv(dir.file("factors.csv"), files.factors);

    const PriceSeries dep = load_price_csv(dir.file("dep.csv"));
    const FactorTable fac = load_factor_csv(dir.file("factors.csv"), Units::decimal);
    REQUIRE(dep.size() == sim.panel.rows() + 1);
    REQUIRE(fac.size() == sim.panel.rows());

    // Log returns of the emitted price path reproduce y.
    const ReturnSeries r = compute_returns(dep, ReturnMethod::log);
    REQUIRE(r.size() == sim.panel.rows());
    for (std::size_t t = 0; t < r.size(); ++t) {
        CHECK(r.returns[t] == doctest::Approx(sim.panel.y[t]).epsilon(1e-9));
        CHECK(r.dates[t] == sim.panel.dates[t]);
    }
    for (std::size_t t = 0; t < fac.size(); ++t) {
        CHECK(fac.mkt_rf[t] == sim.panel.mkt_rf[t]);  // exact via round-trip format
    }
}

TEST_CASE("egarch and gjr simulation respects their recursions") {
    SimulationConfig eg;
    eg.family = Family::egarch;
    eg.variance.vc = -0.2;
    eg.variance.va = 0.95;
    eg.variance.vb = 0.10;
    eg.variance.gamma = -0.06;
    eg.n = 2000;
    eg.seed = 12;
    const SimulationResult sim = simulate(eg);
    for (double q : sim.true_q2) CHECK(q > 0.0);

    SimulationConfig gj;
    gj.family = Family::gjr;
    gj.variance.vc = 0.05e-4;
    gj.variance.va = 0.85;
    gj.variance.vb = 0.08;
    gj.variance.gamma = 0.06;
    gj.n = 2000;
    gj.seed = 12;
    const SimulationResult sims = simulate(gj);
    for (double q : sims.true_q2) CHECK(q > 0.0);
}
