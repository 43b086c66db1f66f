#include "ratpo/features.hpp"

#include "ratpo/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace ratpo {

InstrumentResolver::InstrumentResolver(std::vector<UnderlyingSpec> ordered_specs, const MarketData& market,
                                       FeatureConfig cfg)
    : specs_(std::move(ordered_specs)), market_(&market), cfg_(cfg)
{
    if (cfg_.daycount <= 0)
        throw ConfigError("daycount must be positive");
}

InstrumentResolver::Setup InstrumentResolver::resolve(const std::string& id) const
{
    Setup setup;
    if (looks_like_descriptor_id(id)) {
        const auto d = parse_descriptor_id(id);
        if (d.underlying_pos > static_cast<int>(specs_.size()))
            throw SchemaError("UEI '" + id + "' refers to an unknown underlying position");
        const auto& spec = specs_[d.underlying_pos - 1];
        setup.ticker = spec.ticker;
        setup.kind = d.kind;
        setup.strike_delta = d.strike_delta;
        setup.tenor_days = d.tenor_days;
        if (d.tenor_days) {
            if (std::find(spec.tenor_domain.begin(), spec.tenor_domain.end(), *d.tenor_days) ==
                spec.tenor_domain.end())
                throw SchemaError("UEI '" + id + "' tenor not in the tenor domain of " + spec.ticker);
            setup.tenor = static_cast<double>(*d.tenor_days) / cfg_.daycount;
        }
        if (d.kind == InstrumentKind::Stock && spec.category != UnderlyingCategory::Stock)
            throw SchemaError("UEI '" + id + "': stock UEI on an index");
        if (d.kind == InstrumentKind::Futures && spec.category != UnderlyingCategory::StockIndex)
            throw SchemaError("UEI '" + id + "': futures UEI on a single stock");
        if (is_option(d.kind)) {
            const auto& um = market_->underlying(spec.ticker);
            const auto& ccy = market_->currency(um.currency);
            const double vol = market_->vol_for(spec.ticker, d.strike_delta, d.tenor_days);
            setup.strike =
                strike_from_delta(um.spot, setup.tenor, ccy.rate, um.div_yield, vol, *d.strike_delta, d.kind);
        }
        return setup;
    }

    const auto inst = parse_static_id(id);
    setup.ticker = inst.ticker;
    setup.kind = inst.kind;
    setup.exercise = inst.exercise;
    setup.strike = inst.strike.value_or(0.0);
    setup.tenor_days = inst.tenor_days;
    if (inst.tenor_days)
        setup.tenor = static_cast<double>(*inst.tenor_days) / cfg_.daycount;
    return setup;
}

PricingInputs base_inputs(const InstrumentResolver::Setup& setup, const MarketData& market)
{
    const auto& um = market.underlying(setup.ticker);
    const auto& ccy = market.currency(um.currency);
    PricingInputs in;
    in.spot = um.spot;
    in.strike = setup.strike;
    in.tenor = setup.tenor;
    in.rate = ccy.rate;
    in.div_yield = um.div_yield;
    in.vol = market.vol_for(setup.ticker, setup.strike_delta, setup.tenor_days);
    in.kind = setup.kind;
    in.exercise = setup.exercise;
    if (setup.kind == InstrumentKind::Futures)
        in.futures_reference = forward_price(in);
    return in;
}

double unit_cost(InstrumentKind kind, const Greeks& eur_greeks, const UnderlyingMarket& um, double fx_eur,
                 std::optional<double> strike_delta)
{
    if (kind == InstrumentKind::Futures)
        return 0.5 * um.futures_spread * fx_eur;

    double cost = 0.5 * (100.0 * std::abs(eur_greeks.delta)) * um.spot_spread;
    if (is_option(kind)) {
        double vol_spread = 0.0;
        if (strike_delta) {
            auto it = um.vol_spread.find(strike_key(*strike_delta));
            if (it == um.vol_spread.end())
                throw SchemaError("missing vol spread for strike " + strike_key(*strike_delta));
            vol_spread = it->second;
        } else if (auto it = um.vol_spread.find("0.50"); it != um.vol_spread.end()) {
            vol_spread = it->second;
        }
        cost += 0.5 * (100.0 * std::abs(eur_greeks.vega)) * vol_spread;
    }
    return cost;
}

InstrumentFeatures compute_features(const std::string& id, const InstrumentResolver& resolver,
                                    const ScenarioSet& scenarios)
{
    const auto& market = resolver.market();
    const auto setup = resolver.resolve(id);
    const auto& um = market.underlying(setup.ticker);
    const double fx = market.currency(um.currency).fx_eur;
    const PricingInputs base = base_inputs(setup, market);

    const std::size_t ti = scenarios.ticker_index(setup.ticker);
    const std::size_t ci = scenarios.currency_index(um.currency);
    const double min_vol = resolver.config().min_vol;

    InstrumentFeatures f;
    const double v0 = price(base);
    f.value = v0 * fx;
    f.pnl.resize(scenarios.count);
    for (std::size_t i = 0; i < scenarios.count; ++i) {
        PricingInputs shocked = base;
        shocked.spot = base.spot * (1.0 + scenarios.spot_return(i, ti));
        shocked.vol = std::max(base.vol + scenarios.vol_shift(i, ti), min_vol);
        shocked.rate = base.rate + scenarios.rate_shift(i, ci);
        f.pnl[i] = (price(shocked) - v0) * fx;
    }

    Greeks g = bump_greeks(base);
    g.delta *= fx;
    g.vega *= fx;
    g.gamma *= fx;
    f.delta = g.delta;
    f.vega = g.vega;
    f.gamma = g.gamma;
    f.unit_cost = unit_cost(setup.kind, g, um, fx, setup.strike_delta);
    return f;
}

FeatureTable::FeatureTable(std::vector<std::string> ids, std::vector<InstrumentFeatures> features)
    : ids_(std::move(ids)), features_(std::move(features))
{
    if (ids_.size() != features_.size())
        throw Error("feature table: id/feature count mismatch");
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (!index_.emplace(ids_[i], i).second)
            throw Error("feature table: duplicate id '" + ids_[i] + "'");
        if (i == 0)
            scenarios_ = features_[i].pnl.size();
        else if (features_[i].pnl.size() != scenarios_)
            throw Error("feature table: inconsistent scenario count");
    }
}

const InstrumentFeatures& FeatureTable::at(const std::string& id) const
{
    return features_[index_of(id)];
}

std::size_t FeatureTable::index_of(const std::string& id) const
{
    auto it = index_.find(id);
    if (it == index_.end())
        throw SchemaError("instrument '" + id + "' not in feature table");
    return it->second;
}

FeatureTable build_feature_table(const std::vector<std::string>& ids, const InstrumentResolver& resolver,
                                 const ScenarioSet& scenarios, WorkerPool* pool)
{
    std::vector<std::string> unique;
    {
        std::unordered_map<std::string, bool> seen;
        for (const auto& id : ids)
            if (seen.emplace(id, true).second)
                unique.push_back(id);
    }
    std::vector<InstrumentFeatures> features(unique.size());
    auto work = [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i)
            features[i] = compute_features(unique[i], resolver, scenarios);
    };
    if (pool)
        pool->parallel_for(unique.size(), work);
    else
        work(0, unique.size());
    return FeatureTable(std::move(unique), std::move(features));
}

PortfolioFeatures zero_features(std::size_t scenarios)
{
    PortfolioFeatures f;
    f.pnl.assign(scenarios, 0.0);
    return f;
}

PortfolioFeatures aggregate(const FeatureTable& table, const Portfolio& portfolio)
{
    PortfolioFeatures out = zero_features(table.scenario_count());
    for (const auto& leg : portfolio.legs) {
        const auto& f = table.at(leg.instrument_id);
        const double g = static_cast<double>(leg.notional);
        out.value += g * f.value;
        for (std::size_t i = 0; i < out.pnl.size(); ++i)
            out.pnl[i] += g * f.pnl[i];
        out.delta += g * f.delta;
        out.vega += g * f.vega;
        out.gamma += g * f.gamma;
        out.cost += std::abs(g) * f.unit_cost;
    }
    return out;
}

PortfolioFeatures operator+(const PortfolioFeatures& a, const PortfolioFeatures& b)
{
    if (a.pnl.size() != b.pnl.size())
        throw Error("portfolio features: scenario count mismatch");
    PortfolioFeatures out = a;
    out.value += b.value;
    for (std::size_t i = 0; i < out.pnl.size(); ++i)
        out.pnl[i] += b.pnl[i];
    out.delta += b.delta;
    out.vega += b.vega;
    out.gamma += b.gamma;
    out.cost += b.cost;
    return out;
}

}  // namespace ratpo
