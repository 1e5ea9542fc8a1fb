#include "volalab/reference.hpp"

#include <cmath>

namespace volalab::reference {

namespace {

// Exogenous row layout matches variance_exog(): 4 dummies then 5 factors.
double exog_term(const std::vector<double>& vx, std::span<const double> exog, std::size_t t) {
    if (vx.empty()) return 0.0;
    double s = 0.0;
    for (std::size_t j = 0; j < vx.size(); ++j) {
        s += vx[j] * exog[t * vx.size() + j];
    }
    return s;
}

}  // namespace

std::vector<double> mean_residuals(const MeanParams& params, const ReturnPanel& panel,
                                   const std::vector<double>* q_lagged) {
    std::vector<double> e;
    e.reserve(panel.rows());
    for (std::size_t t = 0; t < panel.rows(); ++t) {
        double fitted = params.intercept;
        for (int k = 0; k < 4; ++k) fitted += params.weekday[k] * panel.dummies[k][t];
        fitted += params.rf * panel.rf[t];
        fitted += params.mkt_rf * panel.mkt_rf[t];
        fitted += params.smb * panel.smb[t];
        fitted += params.hml * panel.hml[t];
        fitted += params.umd * panel.umd[t];
        for (std::size_t i = 0; i < params.ylag.size(); ++i) {
            fitted += params.ylag[i] * panel.y_lags[i][t];
        }
        if (params.qlag.has_value() && q_lagged) fitted += *params.qlag * (*q_lagged)[t];
        e.push_back(panel.y[t] - fitted);
    }
    return e;
}

std::vector<double> filter_garch(const VarianceParams& vp, std::span<const double> e,
                                 std::span<const double> exog, double q0) {
    std::vector<double> q2(e.size());
    q2[0] = q0;
    for (std::size_t t = 1; t < e.size(); ++t) {
        q2[t] = vp.vc + exog_term(vp.vx, exog, t) + vp.va * q2[t - 1] + vp.vb * e[t - 1] * e[t - 1];
    }
    return q2;
}

std::vector<double> filter_egarch(const VarianceParams& vp, std::span<const double> e,
                                  std::span<const double> exog, double q0) {
    std::vector<double> q2(e.size());
    q2[0] = q0;
    for (std::size_t t = 1; t < e.size(); ++t) {
        const double ratio = e[t - 1] / std::sqrt(q2[t - 1]);
        double log_q2 = vp.vc + exog_term(vp.vx, exog, t) + vp.va * std::log(q2[t - 1]) +
                        vp.vb * std::fabs(ratio) + vp.gamma * ratio;
        if (log_q2 > 700.0) log_q2 = 700.0;
        if (log_q2 < -700.0) log_q2 = -700.0;
        q2[t] = std::exp(log_q2);
    }
    return q2;
}

std::vector<double> filter_gjr(const VarianceParams& vp, std::span<const double> e,
                               std::span<const double> exog, double q0) {
    std::vector<double> q2(e.size());
    q2[0] = q0;
    for (std::size_t t = 1; t < e.size(); ++t) {
        const double indicator = e[t - 1] < 0.0 ? 1.0 : 0.0;
        q2[t] = vp.vc + exog_term(vp.vx, exog, t) + vp.va * q2[t - 1] +
                vp.vb * e[t - 1] * e[t - 1] + vp.gamma * e[t - 1] * e[t - 1] * indicator;
    }
    return q2;
}

double gaussian_loglik(std::span<const double> e, std::span<const double> q2) {
    const double log_2pi = std::log(2.0 * 3.14159265358979323846);
    double total = 0.0;
    for (std::size_t t = 0; t < e.size(); ++t) {
        total += -0.5 * (log_2pi + std::log(q2[t]) + e[t] * e[t] / q2[t]);
    }
    return total;
}

}  // namespace volalab::reference
