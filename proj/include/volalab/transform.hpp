#pragma once

#include <span>
#include <vector>

#include "volalab/models.hpp"

namespace volalab {

// Numerically stable logistic map and its inverse.
double sigmoid(double x);
double logit(double p);

// Bijection between an unconstrained coordinate vector and VarianceParams
// satisfying the family constraint set for every real input:
//
//   GARCH  x = [log vc, logit u, logit v]           u = va+vb in (0,1), va = u v
//   GJR    x = [log vc, logit u, logit v, logit w]  u = va+vb+gamma/2,  va = u v,
//            r = u (1-v), vb = 2 r w, gamma = 2 r (1 - 2 w)  (so vb+gamma >= 0)
//   EGARCH x = [vc, atanh va, vb, gamma]            only |va| < 1 is enforced
//
// Exogenous loadings, when n_exog > 0, pass through unchanged at the tail of
// the vector. The round trip is exact to 1e-12 on interior points; boundary
// parameter values map to infinite coordinates.
std::size_t unconstrained_size(Family family, int n_exog);
VarianceParams to_constrained(Family family, std::span<const double> x, int n_exog);
std::vector<double> to_unconstrained(Family family, const VarianceParams& vp);

}  // namespace volalab
