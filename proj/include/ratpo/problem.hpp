#pragma once

#include "ratpo/features.hpp"
#include "ratpo/instrument.hpp"
#include "ratpo/risk.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ratpo {

using BigInt = boost::multiprecision::cpp_int;

/// Rounds to one significant "half digit": ceil(½ floor(2x / 10^e)) · 10^e with
/// e = floor(log10 x). 75 -> 80, 740 -> 700, 149 -> 100.
std::int64_t round_magnitude(double x);

/// `points` evenly spaced integers over [-half_width, half_width], always
/// containing 0. Duplicates from rounding are removed.
std::vector<std::int64_t> notional_grid(std::int64_t half_width, int points = 21);

/// One position slot: a UEI index range (1-based, inclusive) and the notional
/// grid its amount is drawn from.
struct Slot {
    std::size_t underlying = 0;  // 0-based position in the ordered spec list
    int role = 0;                // 1, 2: options; 3: stock or futures
    std::int64_t lo = 1;
    std::int64_t hi = 1;
    std::vector<std::int64_t> grid;
    std::size_t zero_index = 0;  // grid position holding 0

    std::int64_t index_count() const { return hi - lo + 1; }
};

/// Slot layout of a strategy: three slots per underlying. A position has 2m
/// integer entries: m UEI indices, then m grid indices.
struct EosStructure {
    std::size_t underlyings = 0;
    std::vector<Slot> slots;

    std::size_t slot_count() const { return slots.size(); }
    std::size_t dimension() const { return 2 * slots.size(); }
    /// Inclusive bounds of position entry j.
    std::pair<std::int64_t, std::int64_t> bounds(std::size_t j) const;
    /// Position whose notional entries all select 0 (index entries at lo).
    std::vector<std::int64_t> zero_position() const;
};

struct NotionalBounds {
    std::int64_t option = 0;
    std::int64_t linear = 0;
};

/// Notional half-widths for an underlying: taken from the spec when given,
/// otherwise |𝒱^P| / |𝒱 of the ATM longest call| and
/// |Δ^P| / max(|Δ ATM call|, |Δ ATM put|), both rounded with round_magnitude.
NotionalBounds derive_notional_bounds(const UnderlyingSpec& spec, std::size_t underlying_pos,
                                      const FeatureTable& universe_features, double base_delta, double base_vega);

EosStructure build_structure(const std::vector<UnderlyingSpec>& ordered_specs,
                             const std::vector<UeiDescriptor>& universe, const FeatureTable& universe_features,
                             double base_delta, double base_vega, int grid_points = 21);

BigInt search_space_size(const EosStructure& structure);

struct EosLeg {
    std::size_t universe_index = 0;  // 0-based
    std::int64_t notional = 0;

    friend bool operator==(const EosLeg&, const EosLeg&) = default;
};

/// Legs selected by a position; repeated UEIs are merged and zero legs dropped.
/// Sorted by universe index.
std::vector<EosLeg> decode(std::span<const std::int64_t> position, const EosStructure& structure);

/// Cost-adjusted P&L/VaR ratio. Returns nullopt when var - cost >= -epsilon.
std::optional<double> objective(double mean_pnl, double var, double pnl_rf, double cost, double epsilon = 1e-9);
std::optional<double> objective(const PortfolioFeatures& total, double pnl_rf, double cost_eos,
                                const VarConfig& var_cfg, double epsilon = 1e-9);

struct ConstraintSpec {
    double tau_delta = 1.0;
    double tau_vega = 1.0;
    double tau_gamma = 1.0;
    double base_delta = 0.0;
    double base_vega = 0.0;
    double base_gamma = 0.0;
    double penalty_delta = 10.0;
    double penalty_vega = 10.0;
    double penalty_gamma = 10.0;
};

/// Sensitivity-limit excesses, normalized by the limit τ|base|.
struct Violations {
    double delta = 0.0;
    double vega = 0.0;
    double gamma = 0.0;

    bool feasible() const { return delta == 0.0 && vega == 0.0 && gamma == 0.0; }
    double total() const { return delta + vega + gamma; }
};

Violations violations(double eos_delta, double eos_vega, double eos_gamma, const ConstraintSpec& spec);
Violations violations(const PortfolioFeatures& eos, const ConstraintSpec& spec);
double penalty(const Violations& v, const ConstraintSpec& spec);

/// One day of interest on the portfolio value.
double riskfree_pnl(double value, double rate, int daycount);

/// Run configuration of the optimization problem (problem.json).
struct ProblemConfig {
    double beta = 0.01;
    double decay = 0.99;
    double tau_delta = 1.0;
    double tau_vega = 1.0;
    double tau_gamma = 1.0;
    double penalty_delta = 10.0;
    double penalty_vega = 10.0;
    double penalty_gamma = 10.0;
    int daycount = 360;
    double epsilon = 1e-9;
    std::string riskfree_currency = "EUR";
    int grid_points = 21;

    void set_tau(double tau_g) { tau_delta = tau_vega = tau_gamma = tau_g; }
    void validate() const;
};

/// Full breakdown of a position's fitness.
struct Evaluation {
    double fitness = 0.0;
    std::optional<double> objective;  // nullopt on a degenerate denominator
    double mean_pnl = 0.0;            // of the total portfolio
    double var = 0.0;                 // of the total portfolio
    double cost = 0.0;                // of the strategy
    double eos_delta = 0.0;
    double eos_vega = 0.0;
    double eos_gamma = 0.0;
    Violations violations;

    bool feasible() const { return violations.feasible(); }
};

/// Immutable optimization instance: precomputed UEI features, the initial
/// portfolio, the slot structure and the constraint set. evaluate() and
/// fitness() are safe to call concurrently.
class ProblemInstance {
public:
    ProblemInstance(std::vector<UeiDescriptor> universe, FeatureTable universe_features,
                    PortfolioFeatures initial, double pnl_rf, VarConfig var_cfg, EosStructure structure,
                    ConstraintSpec constraints, double epsilon = 1e-9);

    double fitness(std::span<const std::int64_t> position) const;
    Evaluation evaluate(std::span<const std::int64_t> position) const;
    /// Evaluation of an explicit strategy (universe indices, notionals).
    Evaluation evaluate_legs(std::span<const EosLeg> legs) const;

    std::vector<EosLeg> decode(std::span<const std::int64_t> position) const;
    Portfolio decoded_portfolio(std::span<const std::int64_t> position) const;
    /// Scenario P&L of initial portfolio plus strategy.
    std::vector<double> total_pnl(std::span<const EosLeg> legs) const;

    const std::vector<UeiDescriptor>& universe() const { return universe_; }
    const FeatureTable& universe_features() const { return features_; }
    const PortfolioFeatures& initial() const { return initial_; }
    double pnl_rf() const { return pnl_rf_; }
    const VarConfig& var_config() const { return var_cfg_; }
    std::size_t var_index() const { return var_idx_; }
    const EosStructure& structure() const { return structure_; }
    const ConstraintSpec& constraints() const { return constraints_; }
    double epsilon() const { return epsilon_; }
    std::size_t scenario_count() const { return scenarios_; }

private:
    void evaluate_into(std::span<const EosLeg> legs, Evaluation& out, std::vector<double>& pnl,
                       std::vector<double>& scratch) const;

    std::vector<UeiDescriptor> universe_;
    FeatureTable features_;
    PortfolioFeatures initial_;
    double pnl_rf_;
    VarConfig var_cfg_;
    std::size_t var_idx_;
    EosStructure structure_;
    ConstraintSpec constraints_;
    double epsilon_;
    std::size_t scenarios_;
    // Dense copies for the hot loop.
    std::vector<double> pnl_matrix_;  // [uei][scenario]
    std::vector<double> delta_, vega_, gamma_, cost_;
};

struct ProblemData {
    std::vector<UnderlyingSpec> specs;  // any order
    MarketData market;
    ScenarioSet scenarios;
    Portfolio portfolio;
};

/// Prices everything once and assembles the instance.
ProblemInstance build_problem(const ProblemData& data, const ProblemConfig& cfg, WorkerPool* pool = nullptr);
/// Same, reusing a table from build_all_features.
ProblemInstance build_problem(const ProblemData& data, const ProblemConfig& cfg, FeatureTable table);

/// Feature table over the universe and the initial-portfolio instruments.
FeatureTable build_all_features(const ProblemData& data, const ProblemConfig& cfg, WorkerPool* pool = nullptr);

}  // namespace ratpo
