#pragma once

#include "ratpo/instrument.hpp"
#include "ratpo/pricing.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace ratpo {

class WorkerPool;

/// Per-unit-notional features of one instrument, in EUR.
struct InstrumentFeatures {
    double value = 0.0;
    std::vector<double> pnl;  // one entry per scenario
    double delta = 0.0;
    double vega = 0.0;
    double gamma = 0.0;
    double unit_cost = 0.0;
};

/// Portfolio-level features; cost uses absolute notionals.
struct PortfolioFeatures {
    double value = 0.0;
    std::vector<double> pnl;
    double delta = 0.0;
    double vega = 0.0;
    double gamma = 0.0;
    double cost = 0.0;
};

struct FeatureConfig {
    int daycount = 360;       // tenor in years = days / daycount
    double min_vol = 1e-4;    // floor applied to shocked vols
};

/// Maps instrument ids (UEI descriptor ids and static ids) to pricing setups.
class InstrumentResolver {
public:
    InstrumentResolver(std::vector<UnderlyingSpec> ordered_specs, const MarketData& market, FeatureConfig cfg = {});

    struct Setup {
        std::string ticker;
        InstrumentKind kind = InstrumentKind::Stock;
        double strike = 0.0;  // absolute, options only
        double tenor = 0.0;   // years
        Exercise exercise = Exercise::European;
        std::optional<double> strike_delta;  // UEIs only
        std::optional<int> tenor_days;
    };

    Setup resolve(const std::string& id) const;
    const FeatureConfig& config() const { return cfg_; }
    const MarketData& market() const { return *market_; }
    const std::vector<UnderlyingSpec>& specs() const { return specs_; }

private:
    std::vector<UnderlyingSpec> specs_;
    const MarketData* market_;
    FeatureConfig cfg_;
};

/// Base pricing inputs (local currency) for a resolved instrument.
PricingInputs base_inputs(const InstrumentResolver::Setup& setup, const MarketData& market);

/// Unit trading cost in EUR:
///   stock/call/put: ½ (100 |Δ|) δ       futures: ½ δ^q
///   calls/puts add: ½ (100 |𝒱|) δ^K
/// Δ and 𝒱 are the 1% bump sensitivities in EUR, so 100·Δ is the full exposure.
double unit_cost(InstrumentKind kind, const Greeks& eur_greeks, const UnderlyingMarket& um, double fx_eur,
                 std::optional<double> strike_delta);

InstrumentFeatures compute_features(const std::string& id, const InstrumentResolver& resolver,
                                    const ScenarioSet& scenarios);

class FeatureTable {
public:
    FeatureTable() = default;
    FeatureTable(std::vector<std::string> ids, std::vector<InstrumentFeatures> features);

    std::size_t size() const { return ids_.size(); }
    std::size_t scenario_count() const { return scenarios_; }
    const std::vector<std::string>& ids() const { return ids_; }
    const InstrumentFeatures& at(std::size_t i) const { return features_[i]; }
    const InstrumentFeatures& at(const std::string& id) const;
    bool contains(const std::string& id) const { return index_.count(id) > 0; }
    std::size_t index_of(const std::string& id) const;

private:
    std::vector<std::string> ids_;
    std::vector<InstrumentFeatures> features_;
    std::unordered_map<std::string, std::size_t> index_;
    std::size_t scenarios_ = 0;
};

/// Computes features for every distinct id, in parallel when a pool is given.
FeatureTable build_feature_table(const std::vector<std::string>& ids, const InstrumentResolver& resolver,
                                 const ScenarioSet& scenarios, WorkerPool* pool = nullptr);

PortfolioFeatures aggregate(const FeatureTable& table, const Portfolio& portfolio);
PortfolioFeatures zero_features(std::size_t scenarios);
PortfolioFeatures operator+(const PortfolioFeatures& a, const PortfolioFeatures& b);

}  // namespace ratpo
