#include "volalab/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace volalab {

namespace {

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

std::vector<double> fd_gradient(const Objective& f, const std::vector<double>& x,
                                double step_rel, double step_abs) {
    const std::size_t k = x.size();
    std::vector<double> grad(k);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < k; ++i) {
        const double h = std::max(step_rel * std::fabs(x[i]), step_abs);
        std::vector<double> xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        grad[i] = (f(xp) - f(xm)) / (2.0 * h);
    }
    return grad;
}

MaximizeResult nelder_mead_maximize(const Objective& f, const std::vector<double>& x0,
                                    const std::vector<double>& step, int max_iterations,
                                    double tol) {
    const std::size_t k = x0.size();
    std::vector<std::vector<double>> simplex(k + 1, x0);
    for (std::size_t i = 0; i < k; ++i) simplex[i + 1][i] += step[i];
    std::vector<double> value(k + 1);
    for (std::size_t i = 0; i <= k; ++i) value[i] = f(simplex[i]);

    std::vector<std::size_t> order(k + 1);
    int iter = 0;
    for (; iter < max_iterations; ++iter) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return value[a] > value[b]; });
        const std::size_t best = order[0], worst = order[k], second_worst = order[k - 1];
        if (std::fabs(value[best] - value[worst]) <=
            tol * (std::fabs(value[best]) + std::fabs(value[worst]) + 1e-300)) {
            break;
        }

        std::vector<double> centroid(k, 0.0);
        for (std::size_t i = 0; i <= k; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < k; ++j) centroid[j] += simplex[i][j];
        }
        for (double& c : centroid) c /= static_cast<double>(k);

        auto blend = [&](double coef) {
            std::vector<double> p(k);
            for (std::size_t j = 0; j < k; ++j) {
                p[j] = centroid[j] + coef * (simplex[worst][j] - centroid[j]);
            }
            return p;
        };

        std::vector<double> reflected = blend(-1.0);
        const double f_reflected = f(reflected);
        if (f_reflected > value[best]) {
            std::vector<double> expanded = blend(-2.0);
            const double f_expanded = f(expanded);
            if (f_expanded > f_reflected) {
                simplex[worst] = std::move(expanded);
                value[worst] = f_expanded;
            } else {
                simplex[worst] = std::move(reflected);
                value[worst] = f_reflected;
            }
            continue;
        }
        if (f_reflected > value[second_worst]) {
            simplex[worst] = std::move(reflected);
            value[worst] = f_reflected;
            continue;
        }
        std::vector<double> contracted = blend(0.5);
        const double f_contracted = f(contracted);
        if (f_contracted > value[worst]) {
            simplex[worst] = std::move(contracted);
            value[worst] = f_contracted;
            continue;
        }
        // Shrink toward the best vertex.
        for (std::size_t i = 0; i <= k; ++i) {
            if (i == best) continue;
            for (std::size_t j = 0; j < k; ++j) {
                simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
            }
            value[i] = f(simplex[i]);
        }
    }

    const std::size_t best =
        static_cast<std::size_t>(std::max_element(value.begin(), value.end()) - value.begin());
    MaximizeResult res;
    res.x = simplex[best];
    res.value = value[best];
    res.iterations = iter;
    return res;
}

namespace {

// One BFGS ascent pass. Returns when the gradient test passes or progress
// stalls under the objective/parameter tolerances.
MaximizeResult bfgs_pass(const Objective& f, const std::vector<double>& x0,
                         const OptimizerOptions& opts, int max_iterations) {
    const std::size_t k = x0.size();
    MaximizeResult res;
    res.x = x0;
    res.value = f(x0);

    std::vector<double> scale2(k, 1.0);
    if (opts.scales.size() == k) {
        for (std::size_t i = 0; i < k; ++i) {
            scale2[i] = std::max(opts.scales[i] * opts.scales[i], 1e-16);
        }
    }
    auto reset_hinv = [&](std::vector<double>& h) {
        std::fill(h.begin(), h.end(), 0.0);
        for (std::size_t i = 0; i < k; ++i) h[i * k + i] = scale2[i];
    };

    auto scaled_norm = [&](const std::vector<double>& g) {
        double s = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double w = g[i] * std::sqrt(scale2[i]);
            s += w * w;
        }
        return std::sqrt(s);
    };

    std::vector<double> grad = fd_gradient(f, res.x, opts.fd_step_rel, opts.fd_step_abs);
    // Inverse-Hessian estimate, scaled-diagonal start.
    std::vector<double> hinv(k * k, 0.0);
    reset_hinv(hinv);

    for (int iter = 0; iter < max_iterations; ++iter) {
        res.iterations = iter;
        res.gradient_norm = scaled_norm(grad);
        if (res.gradient_norm < opts.gradient_tol) {
            res.converged = true;
            return res;
        }

        std::vector<double> dir(k, 0.0);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) dir[i] += hinv[i * k + j] * grad[j];
        }
        double slope = dot(dir, grad);
        if (!(slope > 0.0)) {
            // Curvature estimate lost ascent alignment; reset to the scaled diagonal.
            reset_hinv(hinv);
            dir.assign(k, 0.0);
            for (std::size_t i = 0; i < k; ++i) dir[i] = scale2[i] * grad[i];
            slope = dot(dir, grad);
        }

        // Backtracking Armijo line search.
        double alpha = 1.0;
        std::vector<double> x_next(k);
        double f_next = -std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i < k; ++i) x_next[i] = res.x[i] + alpha * dir[i];
            f_next = f(x_next);
            if (f_next >= res.value + 1e-4 * alpha * slope && std::isfinite(f_next)) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) return res;

        std::vector<double> grad_next = fd_gradient(f, x_next, opts.fd_step_rel, opts.fd_step_abs);

        // BFGS update on the negated problem: s = x+ - x, y = g - g+ (descent
        // convention), requires y.s > 0.
        std::vector<double> s(k), y(k);
        for (std::size_t i = 0; i < k; ++i) {
            s[i] = x_next[i] - res.x[i];
            y[i] = grad[i] - grad_next[i];
        }
        const double ys = dot(y, s);
        if (ys > 1e-12 * norm2(y) * norm2(s)) {
            std::vector<double> hy(k, 0.0);
            for (std::size_t i = 0; i < k; ++i) {
                for (std::size_t j = 0; j < k; ++j) hy[i] += hinv[i * k + j] * y[j];
            }
            const double yhy = dot(y, hy);
            const double c1 = (1.0 + yhy / ys) / ys;
            for (std::size_t i = 0; i < k; ++i) {
                for (std::size_t j = 0; j < k; ++j) {
                    hinv[i * k + j] += c1 * s[i] * s[j] - (hy[i] * s[j] + s[i] * hy[j]) / ys;
                }
            }
        }

        const double df = std::fabs(f_next - res.value);
        const double dx = norm2(s);
        const double f_scale = std::fabs(res.value) + 1e-300;
        const double x_scale = norm2(res.x) + 1e-300;
        res.x = x_next;
        res.value = f_next;
        grad = std::move(grad_next);

        if (df <= opts.objective_tol * f_scale && dx <= opts.param_tol * x_scale) {
            break;  // stalled; caller decides about the fallback
        }
    }
    res.gradient_norm = scaled_norm(grad);
    res.converged = res.gradient_norm < opts.gradient_tol;
    return res;
}

}  // namespace

MaximizeResult maximize(const Objective& f, const std::vector<double>& x0,
                        const OptimizerOptions& opts) {
    MaximizeResult res = bfgs_pass(f, x0, opts, opts.max_iterations);
    if (res.converged) return res;

    // Derivative-free sweep from the stall point, then one more BFGS polish.
    std::vector<double> step(x0.size());
    for (std::size_t i = 0; i < step.size(); ++i) {
        const double scale = opts.scales.size() == x0.size() ? opts.scales[i] : 0.01;
        step[i] = std::max(0.05 * std::fabs(res.x[i]), scale);
    }
    const int nm_iters = 120 * static_cast<int>(x0.size());
    MaximizeResult nm = nelder_mead_maximize(f, res.x, step, nm_iters, 1e-13);
    const int used = res.iterations;
    MaximizeResult polished = bfgs_pass(f, nm.value > res.value ? nm.x : res.x, opts,
                                        opts.max_iterations);
    polished.iterations += used + nm.iterations;
    if (polished.value >= res.value) return polished;
    return res;
}

}  // namespace volalab
