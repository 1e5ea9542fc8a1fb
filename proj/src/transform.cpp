#include "volalab/transform.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "volalab/errors.hpp"

namespace volalab {

double sigmoid(double x) {
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double logit(double p) {
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return std::numeric_limits<double>::infinity();
    return std::log(p) - std::log1p(-p);
}

std::size_t unconstrained_size(Family family, int n_exog) {
    const std::size_t core = family == Family::garch ? 3 : 4;
    return core + static_cast<std::size_t>(n_exog);
}

VarianceParams to_constrained(Family family, std::span<const double> x, int n_exog) {
    if (x.size() != unconstrained_size(family, n_exog)) {
        throw DimensionMismatch("unconstrained vector has wrong length");
    }
    VarianceParams vp;
    std::size_t k = 0;
    switch (family) {
        case Family::garch: {
            vp.vc = std::exp(x[0]);
            const double u = sigmoid(x[1]);
            const double v = sigmoid(x[2]);
            vp.va = u * v;
            vp.vb = u * (1.0 - v);
            k = 3;
            break;
        }
        case Family::gjr: {
            vp.vc = std::exp(x[0]);
            const double u = sigmoid(x[1]);
            const double v = sigmoid(x[2]);
            const double w = sigmoid(x[3]);
            const double r = u * (1.0 - v);
            vp.va = u * v;
            vp.vb = 2.0 * r * w;
            vp.gamma = 2.0 * r * (1.0 - 2.0 * w);
            k = 4;
            break;
        }
        case Family::egarch: {
            vp.vc = x[0];
            vp.va = std::tanh(x[1]);
            vp.vb = x[2];
            vp.gamma = x[3];
            k = 4;
            break;
        }
    }
    vp.vx.assign(x.begin() + k, x.end());
    return vp;
}

std::vector<double> to_unconstrained(Family family, const VarianceParams& vp) {
    check_constraints(family, vp);
    std::vector<double> x;
    switch (family) {
        case Family::garch: {
            const double u = vp.va + vp.vb;
            x = {std::log(vp.vc), logit(u), u > 0.0 ? logit(vp.va / u) : 0.0};
            break;
        }
        case Family::gjr: {
            const double u = vp.va + vp.vb + 0.5 * vp.gamma;
            const double v = u > 0.0 ? vp.va / u : 0.0;
            const double r = u * (1.0 - v);
            const double w = r > 0.0 ? vp.vb / (2.0 * r) : 0.5;
            x = {std::log(vp.vc), logit(u), logit(v), logit(w)};
            break;
        }
        case Family::egarch: {
            x = {vp.vc, std::atanh(vp.va), vp.vb, vp.gamma};
            break;
        }
    }
    x.insert(x.end(), vp.vx.begin(), vp.vx.end());
    return x;
}

}  // namespace volalab
