#pragma once

#include <string>
#include <vector>

#include "volalab/models.hpp"
#include "volalab/optimize.hpp"
#include "volalab/panel.hpp"

namespace volalab {

struct ParamEntry {
    std::string name;
    double estimate = 0.0;
    double std_err = 0.0;
    double t_stat = 0.0;
    double p_value = 1.0;
    std::string stars;
};

struct FitResult {
    ModelSpec spec;
    bool ols = false;
    MeanParams mean;
    VarianceParams variance;
    std::vector<ParamEntry> params;  // mean block then variance block
    double loglik = 0.0;
    double q0 = 0.0;
    std::vector<double> q2_path;
    long n_obs = 0;
    bool converged = true;
    bool se_ok = true;
    int iterations = 0;
    double gradient_norm = 0.0;

    const ParamEntry& entry(const std::string& name) const;
};

// Ordinary least squares on arbitrary regressor columns: normal-equation
// solution, classical standard errors on n-k degrees of freedom.
// Throws RankDeficient when the columns are not linearly independent.
struct OlsSolution {
    std::vector<double> coef;
    std::vector<double> std_err;
    std::vector<double> residuals;
    double s2 = 0.0;          // RSS / (n - k)
    double sigma2_mle = 0.0;  // RSS / n
    double loglik = 0.0;      // Gaussian, at sigma2_mle
    double df = 0.0;
};
OlsSolution ols_solve(const std::vector<std::vector<double>>& columns,
                      const std::vector<double>& y);

// Ordinary least squares of y on [const, dummies, factors, lags] with
// classical (homoskedastic) standard errors, Student-t p-values on n-k df,
// and the Gaussian log-likelihood at the MLE variance RSS/n.
// Throws RankDeficient when the regressor matrix loses full column rank.
FitResult ols_fit(const ReturnPanel& panel, MeanDesign design = MeanDesign::full);

// Quasi-maximum-likelihood fit of the mean equation with the family variance
// recursion. Estimation runs in the unconstrained space of transform.hpp
// (multistart BFGS with a simplex fallback), then a Newton polish in the
// constrained space tightens the optimum. Standard errors come from the
// inverse negative finite-difference Hessian in the constrained space;
// p-values use the normal approximation. Non-convergence is reported through
// converged=false on the best candidate, never an exception.
// Throws TooFewRows when rows < 10 x parameter count.
FitResult fit(const ReturnPanel& panel, const ModelSpec& spec,
              const OptimizerOptions& opts = {});

// Square roots of the diagonal of the inverse negative Hessian of `loglik`
// at theta, with per-coordinate central-difference steps. Throws
// SingularHessian when the observed information is not positive definite.
std::vector<double> hessian_standard_errors(const Objective& loglik,
                                            const std::vector<double>& theta,
                                            const std::vector<double>& steps);

// Names for the packed parameter vector of a spec, mean block then variance
// block: const, tue, wed, thu, fri, rf, mkt_rf, smb, hml, umd, ylag<i>,
// [qlag], vc, va, vb, [gamma], [vx_*...].
std::vector<std::string> param_names(const ModelSpec& spec);

}  // namespace volalab
