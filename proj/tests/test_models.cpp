#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "helpers.hpp"
#include "volalab/errors.hpp"
#include "volalab/models.hpp"
#include "volalab/reference.hpp"
#include "volalab/transform.hpp"

using namespace volalab;

namespace {

std::vector<double> random_residuals(std::mt19937_64& rng, std::size_t n, double sd) {
    std::normal_distribution<double> noise(0.0, sd);
    std::vector<double> e(n);
    for (auto& v : e) v = noise(rng);
    return e;
}

}  // namespace

TEST_CASE("garch filter one-step recursion") {
    VarianceParams vp;
    vp.vc = 0.1;
    vp.va = 0.7;
    vp.vb = 0.2;
    const std::vector<double> e{0.5, 0.0};
    const auto q2 = filter_garch(vp, e, {}, 1.0);
    REQUIRE(q2.size() == 2);
    CHECK(q2[0] == 1.0);
    CHECK(q2[1] == doctest::Approx(0.85).epsilon(1e-15));  // 0.1 + 0.2*0.25 + 0.7*1.0
}

TEST_CASE("garch constant-variance degenerate case") {
    VarianceParams vp;
    vp.vc = 0.04;
    const auto q2 = filter_garch(vp, std::vector<double>(10, 0.3), {}, 0.04);
    for (double q : q2) CHECK(q == doctest::Approx(0.04).epsilon(1e-15));
}

TEST_CASE("egarch one-step recursion and sign asymmetry") {
    VarianceParams vp;
    vp.vc = -0.1;
    vp.va = 0.9;
    vp.vb = 0.2;
    vp.gamma = -0.1;
    const std::vector<double> e{-1.0, 0.0};
    const auto q2 = filter_egarch(vp, e, {}, 1.0);
    CHECK(q2[1] == doctest::Approx(std::exp(0.2)).epsilon(1e-15));

    // Negative xi: a negative shock raises variance more than a positive one.
    const std::vector<double> down{-1.0, 0.0};
    const std::vector<double> up{1.0, 0.0};
    const auto q_down = filter_egarch(vp, down, {}, 1.0);
    const auto q_up = filter_egarch(vp, up, {}, 1.0);
    CHECK(q_down[1] > q_up[1]);
}

TEST_CASE("egarch constant log-variance case") {
    VarianceParams vp;
    vp.vc = std::log(0.04);
    const auto q2 = filter_egarch(vp, std::vector<double>(8, 0.5), {}, 1.0);
    CHECK(q2[0] == 1.0);
    for (std::size_t t = 1; t < q2.size(); ++t) {
        CHECK(q2[t] == doctest::Approx(0.04).epsilon(1e-15));
    }
}

TEST_CASE("gjr indicator recursion") {
    VarianceParams vp;
    vp.vc = 0.1;
    vp.va = 0.7;
    vp.vb = 0.1;
    vp.gamma = 0.2;
    const std::vector<double> neg{-0.5, 0.0};
    const std::vector<double> pos{0.5, 0.0};
    CHECK(filter_gjr(vp, neg, {}, 1.0)[1] == doctest::Approx(0.875).epsilon(1e-15));
    CHECK(filter_gjr(vp, pos, {}, 1.0)[1] == doctest::Approx(0.825).epsilon(1e-15));
}

TEST_CASE("gjr reduces exactly to garch at gamma zero") {
    std::mt19937_64 rng(31);
    const auto e = random_residuals(rng, 300, 0.8);
    VarianceParams vp;
    vp.vc = 0.05;
    vp.va = 0.82;
    vp.vb = 0.12;
    vp.gamma = 0.0;
    const auto gjr = filter_gjr(vp, e, {}, 0.7);
    const auto garch = filter_garch(vp, e, {}, 0.7);
    for (std::size_t t = 0; t < e.size(); ++t) CHECK(gjr[t] == garch[t]);
}

TEST_CASE("garch with zero persistence reproduces arch(1)") {
    std::mt19937_64 rng(32);
    const auto e = random_residuals(rng, 200, 0.5);
    VarianceParams vp;
    vp.vc = 0.03;
    vp.va = 0.0;
    vp.vb = 0.25;
    const auto q2 = filter_garch(vp, e, {}, 0.5);
    for (std::size_t t = 1; t < e.size(); ++t) {
        const double e2 = e[t - 1] * e[t - 1];
        const double arch = vp.vc + vp.vb * e2;
        CHECK(q2[t] == arch);  // adding va*q with va=0 is exact
    }
}

TEST_CASE("filters match the naive reference implementation") {
    std::mt19937_64 rng(33);
    for (int rep = 0; rep < 25; ++rep) {
        const auto e = random_residuals(rng, 400, 1.2);
        std::uniform_real_distribution<double> u01(0.05, 0.95);

        VarianceParams garch;
        garch.vc = u01(rng);
        const double total = 0.97 * u01(rng);
        const double share = u01(rng);
        garch.va = total * share;
        garch.vb = total * (1.0 - share);
        const auto got = filter_garch(garch, e, {}, 1.0);
        const auto expect = reference::filter_garch(garch, e, {}, 1.0);
        for (std::size_t t = 0; t < e.size(); ++t) {
            CHECK(got[t] == doctest::Approx(expect[t]).epsilon(1e-12));
        }

        VarianceParams eg;
        eg.vc = u01(rng) - 0.5;
        eg.va = 0.9 * (2.0 * u01(rng) - 1.0);
        eg.vb = u01(rng) - 0.5;
        eg.gamma = u01(rng) - 0.5;
        const auto got_e = filter_egarch(eg, e, {}, 1.0);
        const auto expect_e = reference::filter_egarch(eg, e, {}, 1.0);
        for (std::size_t t = 0; t < e.size(); ++t) {
            CHECK(got_e[t] == doctest::Approx(expect_e[t]).epsilon(1e-12));
        }

        VarianceParams gjr = garch;
        gjr.va *= 0.8;
        gjr.gamma = 0.1 * u01(rng);
        const auto got_g = filter_gjr(gjr, e, {}, 1.0);
        const auto expect_g = reference::filter_gjr(gjr, e, {}, 1.0);
        for (std::size_t t = 0; t < e.size(); ++t) {
            CHECK(got_g[t] == doctest::Approx(expect_g[t]).epsilon(1e-12));
        }
    }
}

TEST_CASE("variance paths stay positive under the constraint sets") {
    std::mt19937_64 rng(34);
    std::uniform_real_distribution<double> wide(-4.0, 4.0);
    for (int rep = 0; rep < 500; ++rep) {
        const auto e = random_residuals(rng, 50, 2.0);
        for (Family family : {Family::garch, Family::gjr}) {
            std::vector<double> x(unconstrained_size(family, 0));
            for (auto& v : x) v = wide(rng);
            const VarianceParams vp = to_constrained(family, x, 0);
            const auto q2 = filter_variance(family, vp, e, {}, 0.5);
            for (double q : q2) CHECK(q > 0.0);
        }
        // EGARCH: any real parameters at all.
        VarianceParams eg;
        eg.vc = wide(rng);
        eg.va = std::tanh(wide(rng));
        eg.vb = wide(rng);
        eg.gamma = wide(rng);
        const auto q2 = filter_egarch(eg, e, {}, 0.5);
        for (double q : q2) {
            CHECK(q > 0.0);
            CHECK(std::isfinite(q));
        }
    }
}

TEST_CASE("constraint checks reject invalid parameters") {
    VarianceParams vp;
    vp.vc = 0.1;
    vp.va = 0.6;
    vp.vb = 0.5;  // va + vb >= 1
    CHECK_THROWS_AS(check_constraints(Family::garch, vp), ConstraintViolation);
    vp.vb = -0.1;
    CHECK_THROWS_AS(check_constraints(Family::garch, vp), ConstraintViolation);
    vp.vb = 0.1;
    vp.vc = 0.0;
    CHECK_THROWS_AS(check_constraints(Family::garch, vp), ConstraintViolation);

    VarianceParams gjr;
    gjr.vc = 0.1;
    gjr.va = 0.5;
    gjr.vb = 0.1;
    gjr.gamma = -0.2;  // vb + gamma < 0
    CHECK_THROWS_AS(check_constraints(Family::gjr, gjr), ConstraintViolation);

    VarianceParams eg;
    eg.va = 1.0;
    CHECK_THROWS_AS(check_constraints(Family::egarch, eg), ConstraintViolation);
    eg.va = -2.0;
    CHECK_THROWS_AS(check_constraints(Family::egarch, eg), ConstraintViolation);

    // Plain-garch filter needs q0 > 0.
    VarianceParams ok;
    ok.vc = 0.1;
    CHECK_THROWS_AS(filter_garch(ok, std::vector<double>{0.1, 0.2}, {}, 0.0), ConstraintViolation);
}

TEST_CASE("exogenous loadings can force the variance negative") {
    VarianceParams vp;
    vp.vc = 0.01;
    vp.va = 0.1;
    vp.vb = 0.1;
    vp.vx.assign(kVarianceExogCount, 0.0);
    vp.vx[5] = -50.0;  // market loading large and negative

    ReturnPanel panel = testutil::make_panel({0.0, 0.0, 0.0});
    panel.mkt_rf = {0.0, 1.0, 1.0};
    const auto exog = variance_exog(panel);
    const std::vector<double> e{0.1, 0.1, 0.1};
    CHECK_THROWS_AS(filter_garch(vp, e, exog, 1.0), NonPositiveVariance);
}

TEST_CASE("gaussian log-likelihood closed forms and oracle") {
    CHECK(gaussian_loglik(std::vector<double>{0.0}, std::vector<double>{1.0}) ==
          doctest::Approx(-0.91893853320467274).epsilon(1e-15));
    CHECK(gaussian_loglik(std::vector<double>{1.0}, std::vector<double>{1.0}) ==
          doctest::Approx(-1.4189385332046727).epsilon(1e-15));

    std::mt19937_64 rng(35);
    const auto e = random_residuals(rng, 10, 1.0);
    std::vector<double> q2(10);
    std::uniform_real_distribution<double> uq(0.2, 3.0);
    for (auto& q : q2) q = uq(rng);
    CHECK(gaussian_loglik(e, q2) ==
          doctest::Approx(reference::gaussian_loglik(e, q2)).epsilon(1e-13));

    CHECK_THROWS_AS(gaussian_loglik(e, std::vector<double>(10, -1.0)), NonPositiveVariance);
    CHECK_THROWS_AS(gaussian_loglik(e, std::vector<double>(3, 1.0)), DimensionMismatch);
}

TEST_CASE("log-likelihood is permutation invariant within tolerance") {
    std::mt19937_64 rng(36);
    const std::size_t n = 20000;
    auto e = random_residuals(rng, n, 1.0);
    std::vector<double> q2(n);
    std::uniform_real_distribution<double> uq(1e-5, 4.0);
    for (auto& q : q2) q = uq(rng);
    const double base = gaussian_loglik(e, q2);

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<double> e2(n), q22(n);
    for (std::size_t i = 0; i < n; ++i) {
        e2[i] = e[idx[i]];
        q22[i] = q2[idx[i]];
    }
    const double shuffled = gaussian_loglik(e2, q22);
    CHECK(std::fabs(base - shuffled) <= 1e-9 * std::fabs(base));
}

TEST_CASE("unconditional variance matches the closed form on a long path") {
    // vc=0.1, va=0.9, vb=0.05 -> 0.1 / (1 - 0.95) = 2.0.
    VarianceParams vp;
    vp.vc = 0.1;
    vp.va = 0.9;
    vp.vb = 0.05;
    std::mt19937_64 rng(37);
    std::normal_distribution<double> z01(0.0, 1.0);
    const std::size_t n = 400000;
    std::vector<double> e(n);
    double q = 2.0;
    double sum_q = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        e[t] = std::sqrt(q) * z01(rng);
        sum_q += q;
        q = vp.vc + vp.va * q + vp.vb * e[t] * e[t];
    }
    CHECK(sum_q / static_cast<double>(n) == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("mean residuals") {
    auto panel = testutil::make_panel({0.01, -0.02, 0.03, 0.00, 0.02});
    panel.mkt_rf = {0.001, 0.002, -0.001, 0.0, 0.003};

    MeanParams zero;
    const auto e = mean_residuals(zero, panel);
    for (std::size_t t = 0; t < panel.rows(); ++t) CHECK(e[t] == panel.y[t]);

    // Intercept at the sample mean centers the residuals.
    MeanParams centered;
    double ybar = 0.0;
    for (double v : panel.y) ybar += v;
    ybar /= static_cast<double>(panel.rows());
    centered.intercept = ybar;
    const auto ec = mean_residuals(centered, panel);
    double total = 0.0;
    for (double v : ec) total += v;
    CHECK(total == doctest::Approx(0.0).epsilon(1e-12));

    // Hand-checked single row: y - dot(coeffs, regressors).
    auto one = testutil::make_panel({0.05, 0.07}, 1);  // keeps one row with lag 0.05
    one.mkt_rf = {0.01};
    one.smb = {0.02};
    MeanParams mp;
    mp.intercept = 0.001;
    mp.weekday = {0.0, 0.0, 0.0, 0.0};
    mp.mkt_rf = 0.5;
    mp.smb = -0.25;
    mp.ylag = {0.1};
    const auto er = mean_residuals(mp, one);
    REQUIRE(er.size() == 1);
    const double expected = 0.07 - (0.001 + 0.5 * 0.01 + (-0.25) * 0.02 + 0.1 * 0.05);
    CHECK(er[0] == doctest::Approx(expected).epsilon(1e-15));

    // Wrong lag-coefficient count is rejected.
    MeanParams bad;
    bad.ylag = {0.1, 0.2};
    CHECK_THROWS_AS(mean_residuals(bad, panel), DimensionMismatch);
    MeanParams needs_q;
    needs_q.qlag = 0.5;
    CHECK_THROWS_AS(mean_residuals(needs_q, panel), DimensionMismatch);
}

TEST_CASE("mean residuals match the reference on larger panels") {
    std::mt19937_64 rng(38);
    DataTable t;
    const int n = 9000;  // crosses the parallel cutoff
    t.dates = testutil::business_days(Date(2002, 1, 2), n);
    t.add_column("y", testutil::random_vector(rng, n, -0.05, 0.05));
    t.add_column("rf", testutil::random_vector(rng, n, 0.0, 1e-4));
    t.add_column("mkt_rf", testutil::random_vector(rng, n, -0.04, 0.04));
    t.add_column("smb", testutil::random_vector(rng, n, -0.02, 0.02));
    t.add_column("hml", testutil::random_vector(rng, n, -0.02, 0.02));
    t.add_column("umd", testutil::random_vector(rng, n, -0.02, 0.02));
    const ReturnPanel panel = build_panel(t, 2);

    MeanParams mp;
    mp.intercept = 3e-4;
    mp.weekday = {1e-4, -2e-4, 3e-4, 5e-5};
    mp.rf = -1.5;
    mp.mkt_rf = 0.7;
    mp.smb = 0.45;
    mp.hml = -0.62;
    mp.umd = 0.07;
    mp.ylag = {0.05, -0.02};
    const auto got = mean_residuals(mp, panel);
    const auto expect = reference::mean_residuals(mp, panel);
    REQUIRE(got.size() == expect.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-14));
    }
}

TEST_CASE("news impact symmetry properties") {
    std::vector<double> grid;
    for (double x = -3.0; x <= 3.0; x += 0.25) grid.push_back(x);

    VarianceParams garch;
    garch.vc = 0.05;
    garch.va = 0.9;
    garch.vb = 0.08;
    const auto sym = news_impact(garch, Family::garch, grid, 1.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const std::size_t mirror = grid.size() - 1 - i;
        CHECK(sym[i] == doctest::Approx(sym[mirror]).epsilon(1e-12));
    }

    VarianceParams gjr = garch;
    gjr.gamma = 0.1;
    const auto asym = news_impact(gjr, Family::gjr, grid, 1.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < 0.0) CHECK(asym[i] > sym[i]);
        if (grid[i] >= 0.0) CHECK(asym[i] == doctest::Approx(sym[i]).epsilon(1e-12));
    }

    VarianceParams eg;
    eg.vc = -0.1;
    eg.va = 0.95;
    eg.vb = 0.1;
    eg.gamma = 0.0;
    const auto eg_sym = news_impact(eg, Family::egarch, grid, 1.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const std::size_t mirror = grid.size() - 1 - i;
        CHECK(eg_sym[i] == doctest::Approx(eg_sym[mirror]).epsilon(1e-12));
    }
}

TEST_CASE("evaluate_model with the mean-variance term interleaves correctly") {
    auto panel = testutil::make_panel({0.01, -0.02, 0.015, 0.005, -0.01});
    ModelSpec spec;
    spec.family = Family::garch;
    spec.lag_order = 0;
    spec.mean_variance = true;

    MeanParams mp;
    mp.intercept = 0.001;
    mp.qlag = 0.5;
    VarianceParams vp;
    vp.vc = 1e-4;
    vp.va = 0.5;
    vp.vb = 0.2;

    const double q0 = 2e-4;
    const ModelEvaluation ev = evaluate_model(spec, mp, vp, panel, q0);

    // Hand recursion.
    std::vector<double> q_expect{q0}, e_expect;
    e_expect.push_back(panel.y[0] - mp.intercept - *mp.qlag * q0);
    for (std::size_t t = 1; t < panel.rows(); ++t) {
        const double q = vp.vc + vp.va * q_expect[t - 1] + vp.vb * e_expect[t - 1] * e_expect[t - 1];
        q_expect.push_back(q);
        e_expect.push_back(panel.y[t] - mp.intercept - *mp.qlag * q_expect[t - 1]);
    }
    for (std::size_t t = 0; t < panel.rows(); ++t) {
        CHECK(ev.q2[t] == doctest::Approx(q_expect[t]).epsilon(1e-14));
        CHECK(ev.residuals[t] == doctest::Approx(e_expect[t]).epsilon(1e-14));
    }
}
