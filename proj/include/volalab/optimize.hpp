#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace volalab {

using Objective = std::function<double(const std::vector<double>&)>;

struct OptimizerOptions {
    int max_iterations = 400;
    double objective_tol = 1e-11;  // relative change of the objective
    double param_tol = 1e-9;       // relative change of the parameter vector
    // Convergence test on the scale-weighted gradient norm
    // sqrt(sum_i (g_i * scale_i)^2): roughly the distance from the optimum
    // in standard-error units, so 0.05 means "within 5% of one SE".
    double gradient_tol = 0.05;
    double fd_step_rel = 1e-5;     // finite-difference step, relative
    double fd_step_abs = 1e-7;     // and its absolute floor
    int restarts = 2;              // jittered multistart count beyond the base run
    std::uint64_t seed = 20150107; // jitter RNG seed
    // Per-coordinate magnitude guesses; seeds the inverse-Hessian estimate
    // with diag(scale^2) and weights the gradient test. Empty = unit.
    std::vector<double> scales;
};

struct MaximizeResult {
    std::vector<double> x;
    double value = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Central finite-difference gradient with step max(rel*|x_i|, abs).
// Components are independent and evaluate in parallel.
std::vector<double> fd_gradient(const Objective& f, const std::vector<double>& x,
                                double step_rel, double step_abs);

// Maximizes f by BFGS with backtracking line search on -f; if the gradient
// has not collapsed when progress stalls, a Nelder-Mead sweep restarts the
// ascent from its best vertex. The accepted objective value never decreases.
MaximizeResult maximize(const Objective& f, const std::vector<double>& x0,
                        const OptimizerOptions& opts);

// Standard Nelder-Mead simplex search (maximization), used as the
// derivative-free fallback. step sets the initial simplex spread per axis.
MaximizeResult nelder_mead_maximize(const Objective& f, const std::vector<double>& x0,
                                    const std::vector<double>& step, int max_iterations,
                                    double tol);

}  // namespace volalab
