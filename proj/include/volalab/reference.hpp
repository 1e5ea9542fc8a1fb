#pragma once

#include <span>
#include <vector>

#include "volalab/models.hpp"
#include "volalab/panel.hpp"

// Deliberately naive serial transcriptions of the model equations. Tests use
// them as independent oracles for the tuned kernels and the benchmark uses
// them as the serial baseline. Nothing in the estimation path calls them.
namespace volalab::reference {

std::vector<double> mean_residuals(const MeanParams& params, const ReturnPanel& panel,
                                   const std::vector<double>* q_lagged = nullptr);

std::vector<double> filter_garch(const VarianceParams& vp, std::span<const double> e,
                                 std::span<const double> exog, double q0);
std::vector<double> filter_egarch(const VarianceParams& vp, std::span<const double> e,
                                  std::span<const double> exog, double q0);
std::vector<double> filter_gjr(const VarianceParams& vp, std::span<const double> e,
                               std::span<const double> exog, double q0);

double gaussian_loglik(std::span<const double> e, std::span<const double> q2);

}  // namespace volalab::reference
