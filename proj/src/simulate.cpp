#include "volalab/simulate.hpp"

#include <cmath>
#include <random>

#include "volalab/errors.hpp"

namespace volalab {

namespace {

// Deterministic standard-normal stream: Box-Muller (trigonometric form) over
// mt19937_64, independent of the standard library's distribution internals.
class NormalStream {
  public:
    explicit NormalStream(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01_open();
        const double u2 = uniform01_open();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    static constexpr const char* name() { return "box-muller/mt19937_64"; }

  private:
    double uniform01_open() {
        // (0, 1]: avoids log(0).
        const std::uint64_t r = rng_();
        return (static_cast<double>(r >> 11) + 1.0) * 0x1.0p-53;
    }

    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

double unconditional_variance(Family family, const VarianceParams& vp) {
    switch (family) {
        case Family::garch:
            return vp.vc / (1.0 - vp.va - vp.vb);
        case Family::gjr:
            return vp.vc / (1.0 - vp.va - vp.vb - 0.5 * vp.gamma);
        case Family::egarch: {
            const double mean_abs_z = std::sqrt(2.0 / M_PI);
            return std::exp((vp.vc + vp.vb * mean_abs_z) / (1.0 - vp.va));
        }
    }
    return 1.0;
}

}  // namespace

SimulationResult simulate(const SimulationConfig& config) {
    if (config.n <= 0) throw std::invalid_argument("simulation length must be positive");
    if (config.burn_in < 0) throw std::invalid_argument("burn-in must be >= 0");
    check_constraints(config.family, config.variance);
    if (config.variance_regressors && config.variance.vx.size() != kVarianceExogCount) {
        throw DimensionMismatch("variance regressors enabled but loadings missing");
    }
    if (!config.variance_regressors && !config.variance.vx.empty()) {
        throw DimensionMismatch("variance loadings set but regressors disabled");
    }

    const int total = config.n + config.burn_in;
    const int n_lags = static_cast<int>(config.mean.ylag.size());
    NormalStream normals(config.seed);
    const FactorSimConfig fc = config.factors.value_or(FactorSimConfig{});

    std::vector<Date> dates(total);
    dates[config.burn_in] = add_business_days(config.start_date, 0);
    for (int t = config.burn_in + 1; t < total; ++t) {
        dates[t] = add_business_days(dates[t - 1], 1);
    }
    for (int t = config.burn_in - 1; t >= 0; --t) {
        dates[t] = add_business_days(dates[t + 1], -1);
    }

    std::vector<double> y(total), rf(total), mkt(total), smb(total), hml(total), umd(total);
    std::vector<double> q2(total), resid(total);

    const double q_init = unconditional_variance(config.family, config.variance);
    double q_prev = q_init;      // Q^2_{t-1}
    double e_prev = 0.0;         // e_{t-1}
    const VarianceParams& vp = config.variance;

    for (int t = 0; t < total; ++t) {
        // Factors for this day.
        const double mkt_shock = fc.mkt_sd * normals.next();
        mkt[t] = fc.mkt_mean + mkt_shock;
        smb[t] = fc.smb_on_mkt * mkt_shock + fc.smb_sd * normals.next();
        hml[t] = fc.hml_on_mkt * mkt_shock + fc.hml_sd * normals.next();
        umd[t] = fc.umd_on_mkt * mkt_shock + fc.umd_sd * normals.next();
        rf[t] = fc.rf_level + fc.rf_sd * normals.next();

        // Conditional variance from the recursion.
        double q;
        if (t == 0) {
            q = q_init;
        } else {
            const int wd = dates[t].weekday();
            double exog_term = 0.0;
            if (config.variance_regressors) {
                const double row[kVarianceExogCount] = {
                    wd == 1 ? 1.0 : 0.0, wd == 2 ? 1.0 : 0.0, wd == 3 ? 1.0 : 0.0,
                    wd == 4 ? 1.0 : 0.0, rf[t], mkt[t], smb[t], hml[t], umd[t]};
                for (int j = 0; j < kVarianceExogCount; ++j) exog_term += vp.vx[j] * row[j];
            }
            if (config.family == Family::egarch) {
                const double z = e_prev / std::sqrt(q_prev);
                double lq = vp.vc + vp.va * std::log(q_prev) + vp.vb * std::fabs(z) +
                            vp.gamma * z + exog_term;
                if (lq > 700.0) lq = 700.0;
                if (lq < -700.0) lq = -700.0;
                q = std::exp(lq);
            } else {
                const double e2 = e_prev * e_prev;
                q = vp.vc + vp.va * q_prev + vp.vb * e2 + exog_term;
                if (config.family == Family::gjr && e_prev < 0.0) q += vp.gamma * e2;
                if (!(q > 0.0)) {
                    throw NonPositiveVariance("simulated variance <= 0 at t=" + std::to_string(t));
                }
            }
        }
        q2[t] = q;

        const double e = std::sqrt(q) * normals.next();
        resid[t] = e;

        // Mean equation.
        const int wd = dates[t].weekday();
        double mu = config.mean.intercept;
        if (wd >= 1 && wd <= 4) mu += config.mean.weekday[wd - 1];
        mu += config.mean.rf * rf[t] + config.mean.mkt_rf * mkt[t] + config.mean.smb * smb[t] +
              config.mean.hml * hml[t] + config.mean.umd * umd[t];
        for (int i = 0; i < n_lags; ++i) {
            const int src = t - (i + 1);
            mu += config.mean.ylag[i] * (src >= 0 ? y[src] : 0.0);
        }
        if (config.mean.qlag.has_value()) mu += *config.mean.qlag * q_prev;
        if (config.weekday_effect.has_value()) mu += (*config.weekday_effect)[wd];

        y[t] = mu + e;
        e_prev = e;
        q_prev = q;
    }

    // Assemble the kept window; lag history comes from the burn-in tail.
    const int b = config.burn_in;
    if (b < n_lags) {
        throw std::invalid_argument("burn-in must cover the lag order");
    }
    SimulationResult out;
    out.rng_algorithm = NormalStream::name();
    ReturnPanel& panel = out.panel;
    panel.dates.assign(dates.begin() + b, dates.end());
    panel.y.assign(y.begin() + b, y.end());
    panel.rf.assign(rf.begin() + b, rf.end());
    panel.mkt_rf.assign(mkt.begin() + b, mkt.end());
    panel.smb.assign(smb.begin() + b, smb.end());
    panel.hml.assign(hml.begin() + b, hml.end());
    panel.umd.assign(umd.begin() + b, umd.end());
    panel.dummies = weekday_dummies(panel.dates);
    panel.y_lags.resize(n_lags);
    for (int i = 0; i < n_lags; ++i) {
        panel.y_lags[i].resize(config.n);
        for (int t = 0; t < config.n; ++t) panel.y_lags[i][t] = y[b + t - (i + 1)];
    }
    out.true_q2.assign(q2.begin() + b, q2.end());
    return out;
}

ReturnPanel inject_weekday_effect(const ReturnPanel& panel,
                                  const std::array<double, 5>& offsets) {
    ReturnPanel out = panel;
    for (std::size_t t = 0; t < out.rows(); ++t) {
        out.y[t] += offsets[out.dates[t].weekday()];
    }
    return out;
}

EmittedPanel emit_panel(const ReturnPanel& panel, double base_price) {
    if (panel.rows() == 0) throw TooFewRows("cannot emit an empty panel");
    EmittedPanel out;

    // Price level one business day before the first return.
    const Date d0 = add_business_days(panel.dates.front(), -1);
    out.prices.dates.push_back(d0);
    out.prices.closes.push_back(base_price);
    out.market_prices.dates.push_back(d0);
    out.market_prices.closes.push_back(base_price);

    double log_dep = std::log(base_price);
    double log_mkt = std::log(base_price);
    for (std::size_t t = 0; t < panel.rows(); ++t) {
        log_dep += panel.y[t];
        log_mkt += panel.mkt_rf[t] + panel.rf[t];
        out.prices.dates.push_back(panel.dates[t]);
        out.prices.closes.push_back(std::exp(log_dep));
        out.market_prices.dates.push_back(panel.dates[t]);
        out.market_prices.closes.push_back(std::exp(log_mkt));
    }

    out.factors.dates = panel.dates;
    out.factors.rf = panel.rf;
    out.factors.mkt_rf = panel.mkt_rf;
    out.factors.smb = panel.smb;
    out.factors.hml = panel.hml;
    out.factors.umd = panel.umd;
    return out;
}

}  // namespace volalab
