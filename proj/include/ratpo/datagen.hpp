#pragma once

#include "ratpo/instrument.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ratpo {

struct MarketGenConfig {
    double stock_spot_min = 20.0;
    double stock_spot_max = 400.0;
    double index_spot_min = 2'000.0;
    double index_spot_max = 25'000.0;
    double vol_min = 0.10;
    double vol_max = 0.40;
    double rate_min = -0.005;
    double rate_max = 0.03;
    double div_min = 0.0;
    double div_max = 0.04;
    double spot_spread_min = 0.0005;  // relative
    double spot_spread_max = 0.002;
    double futures_spread_min = 0.5;  // per unit, local currency
    double futures_spread_max = 2.5;
    double fx_jitter = 0.02;
};

/// One-factor Student-t model for daily returns. Return scale multiplies each
/// underlying's daily vol (flat vol / sqrt(252)).
struct ScenarioGenConfig {
    std::size_t count = 250;
    double dof = 5.0;
    double correlation = 0.5;
    double return_scale = 1.0;
    // Annual drift per underlying, drawn uniformly from [drift_min, drift_max]
    // and added to the daily returns (scaled by return_scale).
    double drift_min = 0.0;
    double drift_max = 0.6;
    double vol_shift_scale = 0.005;
    double rate_shift_scale = 0.0002;
};

/// Numbers of initial-portfolio legs by instrument type.
struct PortfolioProfile {
    std::size_t stocks = 75;
    std::size_t futures = 14;
    std::size_t european = 10;
    std::size_t american = 28;

    std::size_t legs() const { return stocks + futures + european + american; }
};

/// "table1" (75/14/10/28), "small" (8/3/2/4) or "empty".
PortfolioProfile portfolio_profile(const std::string& name);

/// Settlement currency inferred from the ticker suffix (.PA, .N, .L, ...).
std::string currency_for_ticker(const std::string& ticker);

/// Deterministic names for stocks outside the universe spec.
std::vector<std::string> synthetic_stock_tickers(std::size_t n);

/// Market for the spec underlyings plus `extra_stocks`.
MarketData gen_market(std::uint64_t seed, const std::vector<UnderlyingSpec>& specs,
                      const std::vector<std::string>& extra_stocks = {}, const MarketGenConfig& cfg = {});

/// Scenarios for every underlying and currency in `market`.
ScenarioSet gen_scenarios(std::uint64_t seed, const MarketData& market, const ScenarioGenConfig& cfg = {});

/// Random initial portfolio. Stock legs use the spec stocks first, then
/// synthetic tickers present in `market`; futures go on indexes.
Portfolio gen_portfolio(std::uint64_t seed, const std::vector<UnderlyingSpec>& specs, const MarketData& market,
                        const PortfolioProfile& profile = {});

struct Dataset {
    std::vector<UnderlyingSpec> specs;
    MarketData market;
    ScenarioSet scenarios;
    Portfolio portfolio;
};

struct DatasetConfig {
    PortfolioProfile profile;
    MarketGenConfig market;
    ScenarioGenConfig scenarios;
    bool derived_bounds = true;  // drop the spec notional bounds
    // Redraw the portfolio until the objective of the empty strategy (default
    // VaR settings) is at most this value. Unset keeps the first draw.
    std::optional<double> max_initial_objective = -0.02;
    std::size_t max_portfolio_draws = 200;
};

/// Objective of the portfolio on its own under default problem settings
/// (β = 0.01, λ = 0.99, EUR rate, 360 days); nullopt when degenerate.
std::optional<double> initial_objective(const Portfolio& portfolio, const std::vector<UnderlyingSpec>& specs,
                                        const MarketData& market, const ScenarioSet& scenarios);

/// Market, scenarios and portfolio from independent sub-seeds of `seed`.
Dataset gen_dataset(std::uint64_t seed, std::vector<UnderlyingSpec> specs, const DatasetConfig& cfg = {});

}  // namespace ratpo
