#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "volalab/csv.hpp"
#include "volalab/models.hpp"
#include "volalab/panel.hpp"

namespace volalab {

// Generation settings for the factor columns: the market factor is drawn
// first, the style factors load on its centered shock plus their own noise,
// and the risk-free rate wobbles around a level.
struct FactorSimConfig {
    double mkt_mean = 0.0;
    double mkt_sd = 0.010;
    double smb_sd = 0.005;
    double hml_sd = 0.005;
    double umd_sd = 0.005;
    double smb_on_mkt = 0.0;
    double hml_on_mkt = 0.0;
    double umd_on_mkt = 0.0;
    double rf_level = 1.0e-4;
    double rf_sd = 1.0e-5;
};

struct SimulationConfig {
    Family family = Family::garch;
    MeanParams mean;
    VarianceParams variance;
    int n = 5000;
    int burn_in = 1000;
    std::uint64_t seed = 1;
    std::optional<std::array<double, 5>> weekday_effect;  // Mon..Fri mean offsets
    std::optional<FactorSimConfig> factors;
    bool variance_regressors = false;
    Date start_date = Date(2002, 1, 2);  // date of the first kept observation
};

struct SimulationResult {
    ReturnPanel panel;
    std::vector<double> true_q2;   // conditional variances of the kept window
    std::string rng_algorithm;     // recorded so frozen oracle values are traceable
};

// Generates e_t = sqrt(Q^2_t) z_t with z_t standard normal (Box-Muller over
// mt19937_64), assembles y_t from the mean equation, and drops the burn-in
// prefix. Dates are consecutive business days; the burn-in extends backward
// from start_date so the kept window starts exactly there. Lag history for
// the first kept rows comes from the tail of the burn-in.
// Throws ConstraintViolation for parameters outside the family constraint set.
SimulationResult simulate(const SimulationConfig& config);

// Adds offsets[weekday] to y on every row. Lag columns are left untouched;
// pair with lag order 0 when exact consistency matters.
ReturnPanel inject_weekday_effect(const ReturnPanel& panel,
                                  const std::array<double, 5>& offsets);

// Reconstructs price levels whose log returns reproduce panel.y, plus the
// market price path implied by rf + mkt_rf, and the factor table. The files
// reload through the ingestion API (factor units: decimal).
struct EmittedPanel {
    PriceSeries prices;         // dependent index
    PriceSeries market_prices;  // market index
    FactorTable factors;
};

EmittedPanel emit_panel(const ReturnPanel& panel, double base_price = 100.0);

}  // namespace volalab
