#include "ratpo/problem.hpp"

#include "ratpo/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ratpo {

std::int64_t round_magnitude(double x)
{
    if (!(x > 0) || !std::isfinite(x))
        throw Error("round_magnitude: input must be positive and finite");
    int e = static_cast<int>(std::floor(std::log10(x)));
    // log10 can land one off next to exact powers of ten.
    if (std::pow(10.0, e) > x)
        --e;
    else if (std::pow(10.0, e + 1) <= x)
        ++e;
    const double scale = std::pow(10.0, e);
    const double mantissa2 = std::floor(2.0 * x / scale);
    const double rounded = std::ceil(0.5 * mantissa2) * scale;
    return static_cast<std::int64_t>(std::llround(rounded));
}

std::vector<std::int64_t> notional_grid(std::int64_t half_width, int points)
{
    if (half_width < 0)
        throw Error("notional_grid: negative half width");
    if (points < 1 || points % 2 == 0)
        throw Error("notional_grid: point count must be odd and positive");
    std::vector<std::int64_t> grid;
    if (points == 1 || half_width == 0)
        return {0};
    const std::int64_t span = points - 1;
    for (std::int64_t k = 0; k < points; ++k) {
        const double v = static_cast<double>(half_width * (2 * k - span)) / static_cast<double>(span);
        const std::int64_t r = std::llround(v);
        if (grid.empty() || grid.back() != r)
            grid.push_back(r);
    }
    return grid;
}

std::pair<std::int64_t, std::int64_t> EosStructure::bounds(std::size_t j) const
{
    const std::size_t m = slots.size();
    if (j < m)
        return {slots[j].lo, slots[j].hi};
    const auto& s = slots.at(j - m);
    return {0, static_cast<std::int64_t>(s.grid.size()) - 1};
}

std::vector<std::int64_t> EosStructure::zero_position() const
{
    const std::size_t m = slots.size();
    std::vector<std::int64_t> x(2 * m);
    for (std::size_t j = 0; j < m; ++j) {
        x[j] = slots[j].lo;
        x[m + j] = static_cast<std::int64_t>(slots[j].zero_index);
    }
    return x;
}

namespace {

std::size_t find_uei(const FeatureTable& table, const UeiDescriptor& d)
{
    return table.index_of(descriptor_id(d));
}

}  // namespace

NotionalBounds derive_notional_bounds(const UnderlyingSpec& spec, std::size_t underlying_pos,
                                      const FeatureTable& universe_features, double base_delta, double base_vega)
{
    NotionalBounds out;
    const int pos = static_cast<int>(underlying_pos) + 1;
    const int longest = spec.tenor_domain.back();
    const UeiDescriptor atm_call{pos, InstrumentKind::Call, 0.50, longest};
    const UeiDescriptor atm_put{pos, InstrumentKind::Put, 0.50, longest};

    if (spec.option_notional_bound) {
        out.option = *spec.option_notional_bound;
    } else {
        const double vega = std::abs(universe_features.at(find_uei(universe_features, atm_call)).vega);
        if (!(vega > 0))
            throw ConfigError("zero ATM vega for underlying '" + spec.ticker + "'");
        const double eta = std::abs(base_vega) / vega;
        if (!(eta > 0))
            throw ConfigError("initial portfolio has zero vega; cannot size option notionals for '" +
                              spec.ticker + "'");
        out.option = round_magnitude(eta);
    }

    if (spec.linear_notional_bound) {
        out.linear = *spec.linear_notional_bound;
    } else {
        const double dc = std::abs(universe_features.at(find_uei(universe_features, atm_call)).delta);
        const double dp = std::abs(universe_features.at(find_uei(universe_features, atm_put)).delta);
        const double denom = std::max(dc, dp);
        if (!(denom > 0))
            throw ConfigError("zero ATM delta for underlying '" + spec.ticker + "'");
        const double eta = std::abs(base_delta) / denom;
        if (!(eta > 0))
            throw ConfigError("initial portfolio has zero delta; cannot size linear notionals for '" +
                              spec.ticker + "'");
        out.linear = round_magnitude(eta);
    }
    return out;
}

EosStructure build_structure(const std::vector<UnderlyingSpec>& ordered_specs,
                             const std::vector<UeiDescriptor>& universe, const FeatureTable& universe_features,
                             double base_delta, double base_vega, int grid_points)
{
    EosStructure out;
    out.underlyings = ordered_specs.size();
    for (std::size_t l = 0; l < ordered_specs.size(); ++l) {
        const int pos = static_cast<int>(l) + 1;
        std::int64_t opt_lo = 0, opt_hi = -1, lin_lo = 0, lin_hi = -1;
        for (std::size_t j = 0; j < universe.size(); ++j) {
            const auto& d = universe[j];
            if (d.underlying_pos != pos)
                continue;
            const auto idx = static_cast<std::int64_t>(j) + 1;
            if (is_option(d.kind)) {
                if (opt_hi < 0)
                    opt_lo = idx;
                opt_hi = idx;
            } else {
                if (lin_hi < 0)
                    lin_lo = idx;
                lin_hi = idx;
            }
        }
        if (opt_hi < 0 || lin_hi < 0)
            throw ConfigError("universe has no instruments for underlying '" + ordered_specs[l].ticker + "'");

        const auto bounds =
            derive_notional_bounds(ordered_specs[l], l, universe_features, base_delta, base_vega);
        auto make_slot = [&](int role, std::int64_t lo, std::int64_t hi, std::int64_t half_width) {
            Slot s;
            s.underlying = l;
            s.role = role;
            s.lo = lo;
            s.hi = hi;
            s.grid = notional_grid(half_width, grid_points);
            s.zero_index = static_cast<std::size_t>(std::find(s.grid.begin(), s.grid.end(), 0) - s.grid.begin());
            return s;
        };
        out.slots.push_back(make_slot(1, opt_lo, opt_hi, bounds.option));
        out.slots.push_back(make_slot(2, opt_lo, opt_hi, bounds.option));
        out.slots.push_back(make_slot(3, lin_lo, lin_hi, bounds.linear));
    }
    return out;
}

BigInt search_space_size(const EosStructure& structure)
{
    BigInt size = 1;
    for (const auto& s : structure.slots)
        size *= BigInt(s.index_count()) * BigInt(s.grid.size());
    return size;
}

namespace {

// Writes merged, non-zero legs into `legs` (sorted by universe index).
void decode_into(std::span<const std::int64_t> position, const EosStructure& structure, std::vector<EosLeg>& legs)
{
    const std::size_t m = structure.slots.size();
    if (position.size() != 2 * m)
        throw Error("decode: position has wrong dimension");
    legs.clear();
    for (std::size_t j = 0; j < m; ++j) {
        const auto& slot = structure.slots[j];
        const std::int64_t idx = position[j];
        const std::int64_t g = position[m + j];
        if (idx < slot.lo || idx > slot.hi || g < 0 || g >= static_cast<std::int64_t>(slot.grid.size()))
            throw Error("decode: position entry out of range (slot " + std::to_string(j) + ")");
        const std::int64_t notional = slot.grid[static_cast<std::size_t>(g)];
        if (notional == 0)
            continue;
        legs.push_back({static_cast<std::size_t>(idx - 1), notional});
    }
    // Insertion sort: m is small and usually nearly sorted already.
    for (std::size_t i = 1; i < legs.size(); ++i) {
        EosLeg cur = legs[i];
        std::size_t k = i;
        while (k > 0 && legs[k - 1].universe_index > cur.universe_index) {
            legs[k] = legs[k - 1];
            --k;
        }
        legs[k] = cur;
    }
    std::size_t out = 0;
    for (std::size_t i = 0; i < legs.size(); ++i) {
        if (out > 0 && legs[out - 1].universe_index == legs[i].universe_index)
            legs[out - 1].notional += legs[i].notional;
        else
            legs[out++] = legs[i];
    }
    legs.resize(out);
    legs.erase(std::remove_if(legs.begin(), legs.end(), [](const EosLeg& l) { return l.notional == 0; }),
               legs.end());
}

}  // namespace

std::vector<EosLeg> decode(std::span<const std::int64_t> position, const EosStructure& structure)
{
    std::vector<EosLeg> legs;
    decode_into(position, structure, legs);
    return legs;
}

std::optional<double> objective(double mean_pnl, double var, double pnl_rf, double cost, double epsilon)
{
    const double denom = var - cost;
    if (!(denom < -epsilon))
        return std::nullopt;
    return (mean_pnl - pnl_rf - cost) / denom;
}

std::optional<double> objective(const PortfolioFeatures& total, double pnl_rf, double cost_eos,
                                const VarConfig& var_cfg, double epsilon)
{
    return objective(sample_pnl(total.pnl), beta_var(total.pnl, var_cfg), pnl_rf, cost_eos, epsilon);
}

namespace {

double normalized_excess(double value, double tau, double base)
{
    const double limit = tau * std::abs(base);
    const double excess = std::abs(value) - limit;
    if (limit == 0.0)
        return std::abs(value) > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return excess > 0.0 ? excess / limit : 0.0;
}

}  // namespace

Violations violations(double eos_delta, double eos_vega, double eos_gamma, const ConstraintSpec& spec)
{
    return {normalized_excess(eos_delta, spec.tau_delta, spec.base_delta),
            normalized_excess(eos_vega, spec.tau_vega, spec.base_vega),
            normalized_excess(eos_gamma, spec.tau_gamma, spec.base_gamma)};
}

Violations violations(const PortfolioFeatures& eos, const ConstraintSpec& spec)
{
    return violations(eos.delta, eos.vega, eos.gamma, spec);
}

double penalty(const Violations& v, const ConstraintSpec& spec)
{
    double p = 0.0;
    auto add = [&p](double weight, double psi) {
        if (weight != 0.0 && psi != 0.0)
            p += weight * psi;
    };
    add(spec.penalty_delta, v.delta);
    add(spec.penalty_vega, v.vega);
    add(spec.penalty_gamma, v.gamma);
    return p;
}

double riskfree_pnl(double value, double rate, int daycount)
{
    if (daycount != 252 && daycount != 360 && daycount != 365)
        throw ConfigError("daycount must be 252, 360 or 365");
    return value * rate / daycount;
}

void ProblemConfig::validate() const
{
    VarConfig{beta, decay, 1}.validate();
    for (double t : {tau_delta, tau_vega, tau_gamma})
        if (!(t >= 0) || !std::isfinite(t))
            throw ConfigError("constraint thresholds must be non-negative");
    for (double p : {penalty_delta, penalty_vega, penalty_gamma})
        if (!(p >= 0) || !std::isfinite(p))
            throw ConfigError("penalty weights must be non-negative and finite");
    if (daycount != 252 && daycount != 360 && daycount != 365)
        throw ConfigError("daycount must be 252, 360 or 365");
    if (!(epsilon >= 0))
        throw ConfigError("epsilon must be non-negative");
    if (grid_points < 1 || grid_points % 2 == 0)
        throw ConfigError("grid_points must be odd and positive");
}

ProblemInstance::ProblemInstance(std::vector<UeiDescriptor> universe, FeatureTable universe_features,
                                 PortfolioFeatures initial, double pnl_rf, VarConfig var_cfg,
                                 EosStructure structure, ConstraintSpec constraints, double epsilon)
    : universe_(std::move(universe)),
      features_(std::move(universe_features)),
      initial_(std::move(initial)),
      pnl_rf_(pnl_rf),
      var_cfg_(var_cfg),
      var_idx_(0),
      structure_(std::move(structure)),
      constraints_(constraints),
      epsilon_(epsilon),
      scenarios_(initial_.pnl.size())
{
    if (var_cfg_.scenario_count != scenarios_)
        throw Error("problem: VaR scenario count does not match the P&L length");
    var_idx_ = ratpo::var_index(var_cfg_).index;

    const std::size_t n = universe_.size();
    pnl_matrix_.resize(n * scenarios_);
    delta_.resize(n);
    vega_.resize(n);
    gamma_.resize(n);
    cost_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto& f = features_.at(descriptor_id(universe_[j]));
        if (f.pnl.size() != scenarios_)
            throw Error("problem: UEI P&L length mismatch");
        std::copy(f.pnl.begin(), f.pnl.end(), pnl_matrix_.begin() + static_cast<std::ptrdiff_t>(j * scenarios_));
        delta_[j] = f.delta;
        vega_[j] = f.vega;
        gamma_[j] = f.gamma;
        cost_[j] = f.unit_cost;
    }
    for (const auto& s : structure_.slots)
        if (s.lo < 1 || s.hi > static_cast<std::int64_t>(n) || s.lo > s.hi)
            throw Error("problem: slot bounds outside the universe");
}

void ProblemInstance::evaluate_into(std::span<const EosLeg> legs, Evaluation& out, std::vector<double>& pnl,
                                    std::vector<double>& scratch) const
{
    pnl.assign(initial_.pnl.begin(), initial_.pnl.end());
    out = Evaluation{};
    for (const auto& leg : legs) {
        const std::size_t j = leg.universe_index;
        const double h = static_cast<double>(leg.notional);
        const double* row = pnl_matrix_.data() + j * scenarios_;
        for (std::size_t i = 0; i < scenarios_; ++i)
            pnl[i] += h * row[i];
        out.eos_delta += h * delta_[j];
        out.eos_vega += h * vega_[j];
        out.eos_gamma += h * gamma_[j];
        out.cost += std::abs(h) * cost_[j];
    }
    double sum = 0.0;
    for (double v : pnl)
        sum += v;
    out.mean_pnl = sum / static_cast<double>(scenarios_);
    out.var = beta_var_at(pnl, var_idx_, scratch);
    out.objective = ratpo::objective(out.mean_pnl, out.var, pnl_rf_, out.cost, epsilon_);
    out.violations = violations(out.eos_delta, out.eos_vega, out.eos_gamma, constraints_);
    out.fitness = out.objective ? *out.objective + penalty(out.violations, constraints_)
                                : std::numeric_limits<double>::infinity();
}

namespace {

struct Scratch {
    std::vector<EosLeg> legs;
    std::vector<double> pnl;
    std::vector<double> sort;
};

Scratch& thread_scratch()
{
    thread_local Scratch s;
    return s;
}

}  // namespace

double ProblemInstance::fitness(std::span<const std::int64_t> position) const
{
    return evaluate(position).fitness;
}

Evaluation ProblemInstance::evaluate(std::span<const std::int64_t> position) const
{
    auto& s = thread_scratch();
    decode_into(position, structure_, s.legs);
    Evaluation e;
    evaluate_into(s.legs, e, s.pnl, s.sort);
    return e;
}

Evaluation ProblemInstance::evaluate_legs(std::span<const EosLeg> legs) const
{
    for (const auto& l : legs)
        if (l.universe_index >= universe_.size())
            throw Error("evaluate_legs: universe index out of range");
    auto& s = thread_scratch();
    Evaluation e;
    evaluate_into(legs, e, s.pnl, s.sort);
    return e;
}

std::vector<EosLeg> ProblemInstance::decode(std::span<const std::int64_t> position) const
{
    return ratpo::decode(position, structure_);
}

Portfolio ProblemInstance::decoded_portfolio(std::span<const std::int64_t> position) const
{
    Portfolio p;
    for (const auto& leg : decode(position))
        p.legs.push_back({descriptor_id(universe_[leg.universe_index]), leg.notional});
    return p;
}

std::vector<double> ProblemInstance::total_pnl(std::span<const EosLeg> legs) const
{
    std::vector<double> pnl(initial_.pnl);
    for (const auto& leg : legs) {
        const double h = static_cast<double>(leg.notional);
        const double* row = pnl_matrix_.data() + leg.universe_index * scenarios_;
        for (std::size_t i = 0; i < scenarios_; ++i)
            pnl[i] += h * row[i];
    }
    return pnl;
}

FeatureTable build_all_features(const ProblemData& data, const ProblemConfig& cfg, WorkerPool* pool)
{
    data.market.validate();
    const auto specs = order_underlyings(data.specs);
    const auto universe = build_universe(specs);
    std::vector<std::string> ids;
    ids.reserve(universe.size() + data.portfolio.legs.size());
    for (const auto& d : universe)
        ids.push_back(descriptor_id(d));
    for (const auto& leg : data.portfolio.legs)
        ids.push_back(leg.instrument_id);
    InstrumentResolver resolver(specs, data.market, FeatureConfig{cfg.daycount});
    return build_feature_table(ids, resolver, data.scenarios, pool);
}

ProblemInstance build_problem(const ProblemData& data, const ProblemConfig& cfg, WorkerPool* pool)
{
    cfg.validate();
    return build_problem(data, cfg, build_all_features(data, cfg, pool));
}

ProblemInstance build_problem(const ProblemData& data, const ProblemConfig& cfg, FeatureTable table)
{
    cfg.validate();
    if (data.scenarios.count < 1)
        throw ConfigError("scenario set is empty");
    const auto specs = order_underlyings(data.specs);
    auto universe = build_universe(specs);

    PortfolioFeatures initial = aggregate(table, data.portfolio);
    const double rate = data.market.currency(cfg.riskfree_currency).rate;
    const double pnl_rf = riskfree_pnl(initial.value, rate, cfg.daycount);

    auto structure = build_structure(specs, universe, table, initial.delta, initial.vega, cfg.grid_points);

    ConstraintSpec constraints;
    constraints.tau_delta = cfg.tau_delta;
    constraints.tau_vega = cfg.tau_vega;
    constraints.tau_gamma = cfg.tau_gamma;
    constraints.base_delta = initial.delta;
    constraints.base_vega = initial.vega;
    constraints.base_gamma = initial.gamma;
    constraints.penalty_delta = cfg.penalty_delta;
    constraints.penalty_vega = cfg.penalty_vega;
    constraints.penalty_gamma = cfg.penalty_gamma;

    VarConfig var_cfg{cfg.beta, cfg.decay, data.scenarios.count};
    return ProblemInstance(std::move(universe), std::move(table), std::move(initial), pnl_rf, var_cfg,
                           std::move(structure), constraints, cfg.epsilon);
}

}  // namespace ratpo
