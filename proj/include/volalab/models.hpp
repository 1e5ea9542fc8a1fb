#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "volalab/panel.hpp"

namespace volalab {

enum class Family { garch, egarch, gjr };

Family parse_family(const std::string& name);
std::string to_string(Family family);

// Coefficients of the mean equation: intercept, weekday dummies (Tue..Fri),
// factor loadings, per-lag coefficients on lagged y, and an optional loading
// on the lagged conditional variance.
struct MeanParams {
    double intercept = 0.0;
    std::array<double, 4> weekday{};  // Tue, Wed, Thu, Fri
    double rf = 0.0;
    double mkt_rf = 0.0;
    double smb = 0.0;
    double hml = 0.0;
    double umd = 0.0;
    std::vector<double> ylag;
    std::optional<double> qlag;  // set only when the mean-variance term is on
};

// Variance-equation coefficients. For EGARCH the recursion runs on
// log-variance, so vc is the log-variance intercept and vb multiplies
// |e/Q| rather than e^2. gamma is the asymmetry coefficient (EGARCH xi /
// GJR gamma); it is ignored for plain GARCH. vx holds the optional
// exogenous loadings on [Tue, Wed, Thu, Fri, rf, mkt_rf, smb, hml, umd].
struct VarianceParams {
    double vc = 0.0;
    double va = 0.0;     // persistence, on lagged (log-)variance
    double vb = 0.0;     // news, on lagged squared residual (|e/Q| for EGARCH)
    double gamma = 0.0;  // asymmetry
    std::vector<double> vx;
};

// Number of exogenous variance regressors when enabled.
inline constexpr int kVarianceExogCount = 9;

// Which mean-equation regressors are estimated. The full design is the
// weekday/factor equation; the reduced designs serve controlled fits on
// simulated data (unused coefficients are pinned at zero).
enum class MeanDesign { full, intercept_dummies, intercept_only };

struct ModelSpec {
    Family family = Family::garch;
    int lag_order = 1;
    bool mean_variance = false;       // gamma * Q^2_{t-1} term in the mean
    bool variance_regressors = false;
    MeanDesign mean_design = MeanDesign::full;
};

// Validates the family constraint set:
//   GARCH: vc > 0, va >= 0, vb >= 0, va + vb < 1
//   GJR:   additionally vb + gamma >= 0 and va + vb + gamma/2 < 1
//   EGARCH: |va| < 1, everything else unconstrained
// Throws ConstraintViolation with a description of the first violation.
void check_constraints(Family family, const VarianceParams& vp);
bool constraints_ok(Family family, const VarianceParams& vp);

// Row-major n x 9 matrix [Tue, Wed, Thu, Fri, rf, mkt_rf, smb, hml, umd]
// used when the variance equation carries exogenous regressors.
std::vector<double> variance_exog(const ReturnPanel& panel);

// e_t = y_t - fitted mean. q_lagged, when given, holds Q^2_{t-1} per row and
// must be present iff params.qlag is set. Parallel over rows.
std::vector<double> mean_residuals(const MeanParams& params, const ReturnPanel& panel,
                                   const std::vector<double>* q_lagged = nullptr);

// Conditional variance recursions. Each returns the path Q^2_t with
// Q^2_1 = q0 and the family recursion for t > 1. `exog` is either empty or a
// row-major n x 9 matrix matching vp.vx.
//   GARCH:  Q^2_t = vc + vx.x_t + va Q^2_{t-1} + vb e^2_{t-1}
//   EGARCH: log Q^2_t = vc + vx.x_t + va log Q^2_{t-1}
//                       + vb |e_{t-1}/Q_{t-1}| + gamma (e_{t-1}/Q_{t-1})
//   GJR:    Q^2_t = vc + vx.x_t + va Q^2_{t-1} + vb e^2_{t-1}
//                       + gamma e^2_{t-1} 1{e_{t-1} < 0}
// GARCH/GJR throw NonPositiveVariance if exogenous terms drive the variance
// to <= 0. The EGARCH log-variance state is clamped to +-700 so the path
// stays positive and finite for any real parameter values.
std::vector<double> filter_garch(const VarianceParams& vp, std::span<const double> e,
                                 std::span<const double> exog, double q0);
std::vector<double> filter_egarch(const VarianceParams& vp, std::span<const double> e,
                                  std::span<const double> exog, double q0);
std::vector<double> filter_gjr(const VarianceParams& vp, std::span<const double> e,
                               std::span<const double> exog, double q0);

std::vector<double> filter_variance(Family family, const VarianceParams& vp,
                                    std::span<const double> e, std::span<const double> exog,
                                    double q0);

// Gaussian log-likelihood sum_t -0.5 (log 2pi + log Q^2_t + e^2_t / Q^2_t).
// Compensated block summation, deterministic for any thread count.
// Throws NonPositiveVariance if any q2 <= 0, DimensionMismatch on length skew.
double gaussian_loglik(std::span<const double> e, std::span<const double> q2);

// Variance response to a shock grid holding the lagged variance at q_bar;
// the standard asymmetry diagnostic.
std::vector<double> news_impact(const VarianceParams& vp, Family family,
                                std::span<const double> shock_grid, double q_bar);

// Joint evaluation of the mean and variance equations. When the
// mean-variance term is off, residuals vectorize and the filter runs after;
// with it on, residual and variance updates interleave because e_t needs
// Q^2_{t-1}. Returns residuals, the variance path, and the log-likelihood.
struct ModelEvaluation {
    std::vector<double> residuals;
    std::vector<double> q2;
    double loglik = 0.0;
};

ModelEvaluation evaluate_model(const ModelSpec& spec, const MeanParams& mp,
                               const VarianceParams& vp, const ReturnPanel& panel, double q0);

}  // namespace volalab
