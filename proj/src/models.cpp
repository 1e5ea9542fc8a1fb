#include "volalab/models.hpp"

#include <cmath>
#include <stdexcept>

#include "volalab/errors.hpp"

namespace volalab {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;
constexpr double kLogVarClamp = 700.0;  // keeps exp() finite for wild parameters
constexpr std::size_t kParallelCutoff = 8192;
constexpr std::size_t kBlock = 4096;

double dot_exog(std::span<const double> exog, const std::vector<double>& vx, std::size_t t) {
    double s = 0.0;
    const double* row = exog.data() + t * kVarianceExogCount;
    for (int j = 0; j < kVarianceExogCount; ++j) s += vx[j] * row[j];
    return s;
}

void check_filter_inputs(const VarianceParams& vp, std::span<const double> e,
                         std::span<const double> exog, double q0) {
    if (e.empty()) throw DimensionMismatch("empty residual series");
    if (!(q0 > 0.0)) throw ConstraintViolation("initial variance must be > 0");
    if (exog.empty()) {
        if (!vp.vx.empty()) {
            throw DimensionMismatch("variance loadings given without exogenous rows");
        }
    } else {
        if (vp.vx.size() != kVarianceExogCount) {
            throw DimensionMismatch("expected " + std::to_string(kVarianceExogCount) +
                                    " variance loadings, got " + std::to_string(vp.vx.size()));
        }
        if (exog.size() != e.size() * kVarianceExogCount) {
            throw DimensionMismatch("exogenous matrix rows do not match residual length");
        }
    }
}

}  // namespace

Family parse_family(const std::string& name) {
    if (name == "garch") return Family::garch;
    if (name == "egarch") return Family::egarch;
    if (name == "gjr") return Family::gjr;
    throw std::invalid_argument("unknown family '" + name + "' (expected garch|egarch|gjr)");
}

std::string to_string(Family family) {
    switch (family) {
        case Family::garch: return "garch";
        case Family::egarch: return "egarch";
        case Family::gjr: return "gjr";
    }
    return "?";
}

bool constraints_ok(Family family, const VarianceParams& vp) {
    switch (family) {
        case Family::garch:
            return vp.vc > 0.0 && vp.va >= 0.0 && vp.vb >= 0.0 && vp.va + vp.vb < 1.0;
        case Family::gjr:
            return vp.vc > 0.0 && vp.va >= 0.0 && vp.vb >= 0.0 && vp.vb + vp.gamma >= 0.0 &&
                   vp.va + vp.vb + 0.5 * vp.gamma < 1.0;
        case Family::egarch:
            return std::fabs(vp.va) < 1.0;
    }
    return false;
}

void check_constraints(Family family, const VarianceParams& vp) {
    if (constraints_ok(family, vp)) return;
    throw ConstraintViolation(to_string(family) + " constraints violated: vc=" +
                              std::to_string(vp.vc) + " va=" + std::to_string(vp.va) +
                              " vb=" + std::to_string(vp.vb) + " gamma=" + std::to_string(vp.gamma));
}

std::vector<double> variance_exog(const ReturnPanel& panel) {
    const std::size_t n = panel.rows();
    std::vector<double> exog(n * kVarianceExogCount);
    for (std::size_t t = 0; t < n; ++t) {
        double* row = exog.data() + t * kVarianceExogCount;
        row[0] = panel.dummies[0][t];
        row[1] = panel.dummies[1][t];
        row[2] = panel.dummies[2][t];
        row[3] = panel.dummies[3][t];
        row[4] = panel.rf[t];
        row[5] = panel.mkt_rf[t];
        row[6] = panel.smb[t];
        row[7] = panel.hml[t];
        row[8] = panel.umd[t];
    }
    return exog;
}

std::vector<double> mean_residuals(const MeanParams& params, const ReturnPanel& panel,
                                   const std::vector<double>* q_lagged) {
    const std::size_t n = panel.rows();
    if (params.ylag.size() != panel.y_lags.size()) {
        throw DimensionMismatch("mean lag coefficients (" + std::to_string(params.ylag.size()) +
                                ") do not match panel lag order (" +
                                std::to_string(panel.y_lags.size()) + ")");
    }
    if (params.qlag.has_value() != (q_lagged != nullptr)) {
        throw DimensionMismatch("lagged variance path must be supplied iff the mean-variance term is on");
    }
    if (q_lagged && q_lagged->size() != n) {
        throw DimensionMismatch("lagged variance path length does not match panel");
    }

    std::vector<double> e(n);
    const int n_lags = static_cast<int>(params.ylag.size());
#pragma omp parallel for schedule(static) if (n >= kParallelCutoff)
    for (std::size_t t = 0; t < n; ++t) {
        double fit = params.intercept;
        fit += params.weekday[0] * panel.dummies[0][t];
        fit += params.weekday[1] * panel.dummies[1][t];
        fit += params.weekday[2] * panel.dummies[2][t];
        fit += params.weekday[3] * panel.dummies[3][t];
        fit += params.rf * panel.rf[t];
        fit += params.mkt_rf * panel.mkt_rf[t];
        fit += params.smb * panel.smb[t];
        fit += params.hml * panel.hml[t];
        fit += params.umd * panel.umd[t];
        for (int i = 0; i < n_lags; ++i) fit += params.ylag[i] * panel.y_lags[i][t];
        if (q_lagged) fit += *params.qlag * (*q_lagged)[t];
        e[t] = panel.y[t] - fit;
    }
    return e;
}

std::vector<double> filter_garch(const VarianceParams& vp, std::span<const double> e,
                                 std::span<const double> exog, double q0) {
    check_filter_inputs(vp, e, exog, q0);
    check_constraints(Family::garch, vp);
    const std::size_t n = e.size();
    std::vector<double> q2(n);
    q2[0] = q0;
    if (exog.empty()) {
        // Positivity is guaranteed by the constraint set: q >= vc > 0.
        for (std::size_t t = 1; t < n; ++t) {
            const double e2 = e[t - 1] * e[t - 1];
            q2[t] = vp.vc + vp.va * q2[t - 1] + vp.vb * e2;
        }
        return q2;
    }
    for (std::size_t t = 1; t < n; ++t) {
        const double e2 = e[t - 1] * e[t - 1];
        const double q = vp.vc + vp.va * q2[t - 1] + vp.vb * e2 + dot_exog(exog, vp.vx, t);
        if (!(q > 0.0)) {
            throw NonPositiveVariance("garch variance " + std::to_string(q) + " at t=" +
                                      std::to_string(t));
        }
        q2[t] = q;
    }
    return q2;
}

std::vector<double> filter_egarch(const VarianceParams& vp, std::span<const double> e,
                                  std::span<const double> exog, double q0) {
    check_filter_inputs(vp, e, exog, q0);
    check_constraints(Family::egarch, vp);
    const std::size_t n = e.size();
    std::vector<double> q2(n);
    q2[0] = q0;
    double lq = std::log(q0);
    for (std::size_t t = 1; t < n; ++t) {
        const double sd_prev = std::sqrt(q2[t - 1]);
        const double z = e[t - 1] / sd_prev;
        lq = vp.vc + vp.va * lq + vp.vb * std::fabs(z) + vp.gamma * z;
        if (!exog.empty()) lq += dot_exog(exog, vp.vx, t);
        if (lq > kLogVarClamp) lq = kLogVarClamp;
        if (lq < -kLogVarClamp) lq = -kLogVarClamp;
        q2[t] = std::exp(lq);
    }
    return q2;
}

std::vector<double> filter_gjr(const VarianceParams& vp, std::span<const double> e,
                               std::span<const double> exog, double q0) {
    check_filter_inputs(vp, e, exog, q0);
    check_constraints(Family::gjr, vp);
    const std::size_t n = e.size();
    std::vector<double> q2(n);
    q2[0] = q0;
    if (exog.empty()) {
        // Positivity guaranteed: vc > 0 and (vb + gamma d) e^2 >= 0.
        for (std::size_t t = 1; t < n; ++t) {
            const double e2 = e[t - 1] * e[t - 1];
            const double down = e[t - 1] < 0.0 ? 1.0 : 0.0;
            q2[t] = vp.vc + vp.va * q2[t - 1] + vp.vb * e2 + vp.gamma * e2 * down;
        }
        return q2;
    }
    for (std::size_t t = 1; t < n; ++t) {
        const double e2 = e[t - 1] * e[t - 1];
        const double down = e[t - 1] < 0.0 ? 1.0 : 0.0;
        const double q = vp.vc + vp.va * q2[t - 1] + vp.vb * e2 + vp.gamma * e2 * down +
                         dot_exog(exog, vp.vx, t);
        if (!(q > 0.0)) {
            throw NonPositiveVariance("gjr variance " + std::to_string(q) + " at t=" +
                                      std::to_string(t));
        }
        q2[t] = q;
    }
    return q2;
}

std::vector<double> filter_variance(Family family, const VarianceParams& vp,
                                    std::span<const double> e, std::span<const double> exog,
                                    double q0) {
    switch (family) {
        case Family::garch: return filter_garch(vp, e, exog, q0);
        case Family::egarch: return filter_egarch(vp, e, exog, q0);
        case Family::gjr: return filter_gjr(vp, e, exog, q0);
    }
    throw std::logic_error("unreachable");
}

double gaussian_loglik(std::span<const double> e, std::span<const double> q2) {
    if (e.size() != q2.size()) throw DimensionMismatch("residual/variance length mismatch");
    if (e.empty()) throw DimensionMismatch("empty series");
    const std::size_t n = e.size();
    const std::size_t n_blocks = (n + kBlock - 1) / kBlock;

    // Fixed-size blocks with per-block Kahan sums keep the result identical
    // for any thread count.
    std::vector<double> block_sum(n_blocks, 0.0);
    bool bad = false;
#pragma omp parallel for schedule(static) if (n >= kParallelCutoff) reduction(|| : bad)
    for (std::size_t blk = 0; blk < n_blocks; ++blk) {
        const std::size_t lo = blk * kBlock;
        const std::size_t hi = std::min(lo + kBlock, n);
        double sum = 0.0, carry = 0.0;
        for (std::size_t t = lo; t < hi; ++t) {
            if (!(q2[t] > 0.0)) {
                bad = true;
                break;
            }
            const double term = -0.5 * (kLog2Pi + std::log(q2[t]) + e[t] * e[t] / q2[t]);
            const double y = term - carry;
            const double s = sum + y;
            carry = (s - sum) - y;
            sum = s;
        }
        block_sum[blk] = sum;
    }
    if (bad) throw NonPositiveVariance("non-positive variance in log-likelihood");

    double total = 0.0, carry = 0.0;
    for (double s : block_sum) {
        const double y = s - carry;
        const double t = total + y;
        carry = (t - total) - y;
        total = t;
    }
    return total;
}

std::vector<double> news_impact(const VarianceParams& vp, Family family,
                                std::span<const double> shock_grid, double q_bar) {
    if (!(q_bar > 0.0)) throw ConstraintViolation("news impact needs q_bar > 0");
    std::vector<double> out(shock_grid.size());
    for (std::size_t i = 0; i < shock_grid.size(); ++i) {
        const double x = shock_grid[i];
        switch (family) {
            case Family::garch:
                out[i] = vp.vc + vp.va * q_bar + vp.vb * x * x;
                break;
            case Family::gjr:
                out[i] = vp.vc + vp.va * q_bar + vp.vb * x * x +
                         vp.gamma * x * x * (x < 0.0 ? 1.0 : 0.0);
                break;
            case Family::egarch: {
                const double sd = std::sqrt(q_bar);
                const double z = x / sd;
                out[i] = std::exp(vp.vc + vp.va * std::log(q_bar) + vp.vb * std::fabs(z) +
                                  vp.gamma * z);
                break;
            }
        }
    }
    return out;
}

ModelEvaluation evaluate_model(const ModelSpec& spec, const MeanParams& mp,
                               const VarianceParams& vp, const ReturnPanel& panel, double q0) {
    check_constraints(spec.family, vp);
    const std::size_t n = panel.rows();
    if (n == 0) throw DimensionMismatch("empty panel");

    std::vector<double> exog;
    if (spec.variance_regressors) exog = variance_exog(panel);

    ModelEvaluation ev;
    if (!spec.mean_variance) {
        ev.residuals = mean_residuals(mp, panel);
        ev.q2 = filter_variance(spec.family, vp, ev.residuals, exog, q0);
    } else {
        if (!mp.qlag.has_value()) {
            throw DimensionMismatch("mean-variance term enabled but qlag coefficient missing");
        }
        // Base fit without the variance term; the recursion adds it per row.
        MeanParams base = mp;
        base.qlag.reset();
        const std::vector<double> e0 = mean_residuals(base, panel);
        ev.residuals.resize(n);
        ev.q2.resize(n);
        ev.q2[0] = q0;
        ev.residuals[0] = e0[0] - *mp.qlag * q0;  // q0 stands in for the pre-sample variance
        for (std::size_t t = 1; t < n; ++t) {
            const double e_prev = ev.residuals[t - 1];
            const double q_prev = ev.q2[t - 1];
            double q;
            if (spec.family == Family::egarch) {
                const double z = e_prev / std::sqrt(q_prev);
                double lq = vp.vc + vp.va * std::log(q_prev) + vp.vb * std::fabs(z) + vp.gamma * z;
                if (!exog.empty()) lq += dot_exog(exog, vp.vx, t);
                if (lq > kLogVarClamp) lq = kLogVarClamp;
                if (lq < -kLogVarClamp) lq = -kLogVarClamp;
                q = std::exp(lq);
            } else {
                const double e2 = e_prev * e_prev;
                q = vp.vc + vp.va * q_prev + vp.vb * e2;
                if (spec.family == Family::gjr && e_prev < 0.0) q += vp.gamma * e2;
                if (!exog.empty()) q += dot_exog(exog, vp.vx, t);
                if (!(q > 0.0)) throw NonPositiveVariance("variance <= 0 at t=" + std::to_string(t));
            }
            ev.q2[t] = q;
            ev.residuals[t] = e0[t] - *mp.qlag * q_prev;
        }
    }
    ev.loglik = gaussian_loglik(ev.residuals, ev.q2);
    return ev;
}

}  // namespace volalab
