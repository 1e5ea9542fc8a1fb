// Timing comparison: tuned kernels (OpenMP where the loop is data-parallel)
// against the serial reference transcriptions used as test oracles.
//
//   bench_kernels [n]    default n = 2,000,000 rows

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include "volalab/models.hpp"
#include "volalab/panel.hpp"
#include "volalab/reference.hpp"
#include "volalab/simulate.hpp"

using namespace volalab;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

template <typename F>
double time_best_of(F&& body, int reps = 5) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const double t0 = now_ms();
        body();
        best = std::min(best, now_ms() - t0);
    }
    return best;
}

void report(const char* name, double serial_ms, double tuned_ms, double check_serial,
            double check_tuned) {
    std::printf("%-22s serial %9.2f ms   tuned %9.2f ms   speedup %5.2fx   drift %.2e\n", name,
                serial_ms, tuned_ms, serial_ms / tuned_ms,
                std::fabs(check_serial - check_tuned) /
                    std::max(1.0, std::fabs(check_serial)));
}

}  // namespace

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 2000000;
    std::printf("rows: %d   omp threads: %d\n\n", n, omp_get_max_threads());

    SimulationConfig cfg;
    cfg.family = Family::garch;
    cfg.mean.intercept = 2e-4;
    cfg.mean.ylag = {0.05};
    cfg.variance.vc = 5e-7;
    cfg.variance.va = 0.9;
    cfg.variance.vb = 0.05;
    cfg.factors = FactorSimConfig{};
    cfg.n = n;
    cfg.seed = 7;
    const SimulationResult sim = simulate(cfg);
    const ReturnPanel& panel = sim.panel;

    MeanParams mp;
    mp.intercept = 2e-4;
    mp.weekday = {1e-4, -5e-5, 2e-4, 0.0};
    mp.rf = -2.0;
    mp.mkt_rf = 0.7;
    mp.smb = 0.45;
    mp.hml = -0.6;
    mp.umd = 0.07;
    mp.ylag = {0.05};

    std::vector<double> e_serial, e_tuned;
    const double t_res_serial =
        time_best_of([&] { e_serial = reference::mean_residuals(mp, panel); });
    const double t_res_tuned = time_best_of([&] { e_tuned = mean_residuals(mp, panel); });
    double sum_s = 0.0, sum_t = 0.0;
    for (double v : e_serial) sum_s += v * v;
    for (double v : e_tuned) sum_t += v * v;
    report("mean_residuals", t_res_serial, t_res_tuned, sum_s, sum_t);

    VarianceParams vp;
    vp.vc = 5e-7;
    vp.va = 0.9;
    vp.vb = 0.05;
    vp.gamma = 0.03;

    std::vector<double> q2_serial, q2_tuned;
    const double q0 = 1e-5;
    const double t_g_serial =
        time_best_of([&] { q2_serial = reference::filter_garch(vp, e_tuned, {}, q0); });
    const double t_g_tuned = time_best_of([&] { q2_tuned = filter_garch(vp, e_tuned, {}, q0); });
    report("filter_garch", t_g_serial, t_g_tuned, q2_serial.back(), q2_tuned.back());

    const double t_j_serial =
        time_best_of([&] { q2_serial = reference::filter_gjr(vp, e_tuned, {}, q0); });
    const double t_j_tuned = time_best_of([&] { q2_tuned = filter_gjr(vp, e_tuned, {}, q0); });
    report("filter_gjr", t_j_serial, t_j_tuned, q2_serial.back(), q2_tuned.back());

    VarianceParams ep;
    ep.vc = -0.55;
    ep.va = 0.95;
    ep.vb = 0.10;
    ep.gamma = -0.05;
    const double t_e_serial =
        time_best_of([&] { q2_serial = reference::filter_egarch(ep, e_tuned, {}, q0); });
    const double t_e_tuned =
        time_best_of([&] { q2_tuned = filter_egarch(ep, e_tuned, {}, q0); });
    report("filter_egarch", t_e_serial, t_e_tuned, q2_serial.back(), q2_tuned.back());

    q2_tuned = filter_garch(vp, e_tuned, {}, q0);
    double ll_serial = 0.0, ll_tuned = 0.0;
    const double t_ll_serial =
        time_best_of([&] { ll_serial = reference::gaussian_loglik(e_tuned, q2_tuned); });
    const double t_ll_tuned =
        time_best_of([&] { ll_tuned = gaussian_loglik(e_tuned, q2_tuned); });
    report("gaussian_loglik", t_ll_serial, t_ll_tuned, ll_serial, ll_tuned);

    // Composite likelihood evaluation, the optimizer's inner loop.
    ModelSpec spec;
    spec.family = Family::garch;
    spec.lag_order = 1;
    double ll2 = 0.0;
    const double t_eval_serial = time_best_of([&] {
        const auto e = reference::mean_residuals(mp, panel);
        const auto q2 = reference::filter_garch(vp, e, {}, q0);
        ll2 = reference::gaussian_loglik(e, q2);
    });
    double ll3 = 0.0;
    const double t_eval_tuned =
        time_best_of([&] { ll3 = evaluate_model(spec, mp, vp, panel, q0).loglik; });
    report("likelihood_eval", t_eval_serial, t_eval_tuned, ll2, ll3);

    return 0;
}
