#include "ratpo/datagen.hpp"

#include "ratpo/features.hpp"
#include "ratpo/problem.hpp"
#include "ratpo/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace ratpo {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t stream)
{
    return splitmix64(splitmix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL));
}

double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double log_uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

double round_to(double x, double step)
{
    return std::round(x / step) * step;
}

const std::vector<int> kPortfolioTenors = {30, 60, 91, 182, 273, 365, 547, 730};

}  // namespace

PortfolioProfile portfolio_profile(const std::string& name)
{
    if (name == "table1")
        return {};
    if (name == "small")
        return {8, 3, 2, 4};
    if (name == "empty")
        return {0, 0, 0, 0};
    throw ConfigError("unknown portfolio profile '" + name + "' (expected table1, small or empty)");
}

std::string currency_for_ticker(const std::string& ticker)
{
    static const std::vector<std::pair<std::string, std::string>> table = {
        {".STOXX50E", "EUR"}, {".FTMIB", "EUR"}, {".FTSE", "GBP"}, {".GSPC", "USD"}, {".NDX", "USD"},
    };
    for (const auto& [t, ccy] : table)
        if (ticker == t)
            return ccy;
    const auto dot = ticker.rfind('.');
    if (dot != std::string::npos && dot > 0) {
        const std::string suffix = ticker.substr(dot + 1);
        if (suffix == "N" || suffix == "O")
            return "USD";
        if (suffix == "L")
            return "GBP";
    }
    return "EUR";
}

std::vector<std::string> synthetic_stock_tickers(std::size_t n)
{
    static const char* suffixes[] = {"PA", "N", "L", "DE", "MI"};
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::string num = std::to_string(i + 1);
        num.insert(0, 3 - std::min<std::size_t>(3, num.size()), '0');
        out.push_back("ZS" + num + "." + suffixes[i % 5]);
    }
    return out;
}

MarketData gen_market(std::uint64_t seed, const std::vector<UnderlyingSpec>& specs,
                      const std::vector<std::string>& extra_stocks, const MarketGenConfig& cfg)
{
    std::mt19937_64 rng(sub_seed(seed, 1));
    MarketData m;

    auto add = [&](const std::string& ticker, bool index, const std::vector<int>& tenors) {
        UnderlyingMarket um;
        um.spot = round_to(index ? log_uniform(rng, cfg.index_spot_min, cfg.index_spot_max)
                                 : log_uniform(rng, cfg.stock_spot_min, cfg.stock_spot_max),
                           0.01);
        um.vol = uniform(rng, cfg.vol_min, cfg.vol_max);
        um.div_yield = uniform(rng, cfg.div_min, cfg.div_max);
        um.currency = currency_for_ticker(ticker);
        um.spot_spread = uniform(rng, cfg.spot_spread_min, cfg.spot_spread_max);
        um.futures_spread = index ? uniform(rng, cfg.futures_spread_min, cfg.futures_spread_max) : 0.0;
        // Vol spreads widen away from the money.
        const double base_spread = uniform(rng, 0.002, 0.004);
        um.vol_spread[strike_key(0.50)] = base_spread;
        um.vol_spread[strike_key(0.25)] = base_spread * 1.5;
        um.vol_spread[strike_key(0.10)] = base_spread * 2.5;
        // Mild put skew and term structure around the flat vol.
        const double skew = uniform(rng, 0.0, 0.04);
        const double term = uniform(rng, -0.02, 0.02);
        for (int t : tenors) {
            const double tf = std::sqrt(static_cast<double>(t) / 360.0);
            for (double k : kDeltaStrikes) {
                const double v = um.vol + term * (tf - 1.0) + skew * (0.5 - k);
                um.vol_surface[surface_key(k, t)] = std::max(0.05, v);
            }
        }
        m.underlyings[ticker] = std::move(um);
    };

    auto sorted = specs;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.ticker < b.ticker; });
    for (const auto& s : sorted)
        add(s.ticker, s.category == UnderlyingCategory::StockIndex, s.tenor_domain);
    for (const auto& t : extra_stocks)
        add(t, false, {});

    const std::vector<std::pair<std::string, double>> fx_base = {{"EUR", 1.0}, {"GBP", 1.12}, {"USD", 0.86}};
    for (const auto& [ccy, fx] : fx_base) {
        CurrencyMarket cm;
        cm.rate = uniform(rng, cfg.rate_min, cfg.rate_max);
        cm.fx_eur = ccy == "EUR" ? 1.0 : fx * (1.0 + uniform(rng, -cfg.fx_jitter, cfg.fx_jitter));
        m.currencies[ccy] = cm;
    }
    m.validate();
    return m;
}

ScenarioSet gen_scenarios(std::uint64_t seed, const MarketData& market, const ScenarioGenConfig& cfg)
{
    if (cfg.count < 1)
        throw ConfigError("scenario count must be at least 1");
    if (!(cfg.dof > 2.0))
        throw ConfigError("Student-t degrees of freedom must exceed 2");
    if (!(cfg.correlation >= 0.0 && cfg.correlation <= 1.0))
        throw ConfigError("scenario correlation must lie in [0, 1]");
    std::mt19937_64 rng(sub_seed(seed, 2));
    std::student_t_distribution<double> t(cfg.dof);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double t_sd = std::sqrt(cfg.dof / (cfg.dof - 2.0));
    const double a = std::sqrt(cfg.correlation);
    const double b = std::sqrt(1.0 - cfg.correlation);

    ScenarioSet s;
    s.count = cfg.count;
    std::vector<double> daily_vol, daily_drift;
    for (const auto& [ticker, um] : market.underlyings) {
        s.tickers.push_back(ticker);
        daily_vol.push_back(um.vol / std::sqrt(252.0));
        daily_drift.push_back(uniform(rng, cfg.drift_min, cfg.drift_max) / 252.0);
    }
    for (const auto& [ccy, cm] : market.currencies)
        s.currencies.push_back(ccy);
    const std::size_t u = s.tickers.size();
    s.spot_returns.resize(cfg.count * u);
    s.vol_shifts.resize(cfg.count * u);
    s.rate_shifts.resize(cfg.count * s.currencies.size());

    for (std::size_t i = 0; i < cfg.count; ++i) {
        const double market_factor = t(rng) / t_sd;
        const double vol_factor = normal(rng);
        for (std::size_t l = 0; l < u; ++l) {
            const double z = a * market_factor + b * (t(rng) / t_sd);
            const double ret = std::max(-0.95, cfg.return_scale * (daily_drift[l] + daily_vol[l] * z));
            s.spot_returns[i * u + l] = ret;
            // Vols move against the market factor.
            const double vz = -0.6 * vol_factor + 0.8 * normal(rng);
            s.vol_shifts[i * u + l] = cfg.vol_shift_scale * vz;
        }
        for (std::size_t c = 0; c < s.currencies.size(); ++c)
            s.rate_shifts[i * s.currencies.size() + c] = cfg.rate_shift_scale * normal(rng);
    }
    return s;
}

Portfolio gen_portfolio(std::uint64_t seed, const std::vector<UnderlyingSpec>& specs, const MarketData& market,
                        const PortfolioProfile& profile)
{
    std::mt19937_64 rng(sub_seed(seed, 3));
    Portfolio p;
    if (profile.legs() == 0)
        return p;

    std::vector<std::string> stocks, indexes;
    {
        auto sorted = specs;
        std::sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) { return x.ticker < y.ticker; });
        for (const auto& s : sorted)
            (s.category == UnderlyingCategory::Stock ? stocks : indexes).push_back(s.ticker);
    }
    for (const auto& [ticker, um] : market.underlyings) {
        const bool in_spec = std::any_of(specs.begin(), specs.end(), [&](const auto& s) { return s.ticker == ticker; });
        if (!in_spec)
            stocks.push_back(ticker);
    }
    if (stocks.empty() && (profile.stocks + profile.american) > 0)
        throw ConfigError("portfolio profile needs stock underlyings");
    if (indexes.empty() && profile.futures > 0)
        throw ConfigError("portfolio profile needs index underlyings");
    std::vector<std::string> all = stocks;
    all.insert(all.end(), indexes.begin(), indexes.end());

    auto pick = [&](const std::vector<std::string>& v) -> const std::string& {
        return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
    };
    auto eur_spot = [&](const std::string& t) {
        const auto& um = market.underlying(t);
        return um.spot * market.currency(um.currency).fx_eur;
    };
    auto sign = [&](double p_long) { return uniform(rng, 0.0, 1.0) < p_long ? 1 : -1; };
    auto tenor = [&] { return kPortfolioTenors[std::uniform_int_distribution<std::size_t>(0, kPortfolioTenors.size() - 1)(rng)]; };

    for (std::size_t i = 0; i < profile.stocks; ++i) {
        const std::string& t = i < stocks.size() ? stocks[i] : pick(stocks);
        const double target = 180'000.0 * uniform(rng, 0.3, 1.7);
        const auto n = std::max<std::int64_t>(1, std::llround(target / eur_spot(t)));
        p.legs.push_back({static_id({t, InstrumentKind::Stock, std::nullopt, std::nullopt, Exercise::European}),
                          sign(0.85) * n});
    }
    for (std::size_t i = 0; i < profile.futures; ++i) {
        const std::string& t = indexes[i % indexes.size()];
        // Roughly 30k EUR of delta per leg, mostly short to hedge the stocks.
        const double unit_delta = 0.01 * eur_spot(t);
        const auto n = std::max<std::int64_t>(1, std::llround(30'000.0 * uniform(rng, 0.3, 1.7) / unit_delta));
        p.legs.push_back(
            {static_id({t, InstrumentKind::Futures, std::nullopt, tenor(), Exercise::European}), sign(0.2) * n});
    }
    auto add_option = [&](const std::string& t, Exercise ex) {
        const auto& um = market.underlying(t);
        const auto kind = uniform(rng, 0.0, 1.0) < 0.5 ? InstrumentKind::Call : InstrumentKind::Put;
        const double strike = round_to(um.spot * uniform(rng, 0.8, 1.2), 0.01);
        const double target = 150'000.0 * uniform(rng, 0.3, 1.7);
        const auto n = std::max<std::int64_t>(1, std::llround(target / eur_spot(t)));
        p.legs.push_back({static_id({t, kind, strike, tenor(), ex}), sign(0.5) * n});
    };
    for (std::size_t i = 0; i < profile.european; ++i)
        add_option(pick(all), Exercise::European);
    for (std::size_t i = 0; i < profile.american; ++i)
        add_option(pick(stocks), Exercise::American);
    return p;
}

std::optional<double> initial_objective(const Portfolio& portfolio, const std::vector<UnderlyingSpec>& specs,
                                        const MarketData& market, const ScenarioSet& scenarios)
{
    if (portfolio.legs.empty())
        return std::nullopt;
    const ProblemConfig defaults;
    InstrumentResolver resolver(order_underlyings(specs), market);
    std::vector<std::string> ids;
    for (const auto& leg : portfolio.legs)
        ids.push_back(leg.instrument_id);
    const auto f = aggregate(build_feature_table(ids, resolver, scenarios), portfolio);
    const double pnl_rf = riskfree_pnl(f.value, market.currency(defaults.riskfree_currency).rate, defaults.daycount);
    return objective(f, pnl_rf, 0.0, VarConfig{defaults.beta, defaults.decay, scenarios.count}, defaults.epsilon);
}

Dataset gen_dataset(std::uint64_t seed, std::vector<UnderlyingSpec> specs, const DatasetConfig& cfg)
{
    Dataset d;
    if (cfg.derived_bounds)
        for (auto& s : specs) {
            s.option_notional_bound.reset();
            s.linear_notional_bound.reset();
        }
    const auto ordered = order_underlyings(specs);
    std::size_t spec_stocks = 0;
    for (const auto& s : ordered)
        spec_stocks += s.category == UnderlyingCategory::Stock ? 1 : 0;
    const std::size_t extra = cfg.profile.stocks > spec_stocks ? cfg.profile.stocks - spec_stocks : 0;

    d.specs = ordered;
    d.market = gen_market(seed, ordered, synthetic_stock_tickers(extra), cfg.market);
    d.scenarios = gen_scenarios(seed, d.market, cfg.scenarios);
    d.portfolio = gen_portfolio(seed, ordered, d.market, cfg.profile);
    if (cfg.max_initial_objective && cfg.profile.legs() > 0) {
        // Falls back to the draw with the lowest objective when none reaches the target.
        Portfolio best = d.portfolio;
        double best_f = std::numeric_limits<double>::infinity();
        for (std::size_t draw = 0; draw < cfg.max_portfolio_draws; ++draw) {
            if (draw > 0)
                d.portfolio = gen_portfolio(sub_seed(seed, 100 + draw), ordered, d.market, cfg.profile);
            const auto f = initial_objective(d.portfolio, ordered, d.market, d.scenarios);
            if (f && *f < best_f) {
                best_f = *f;
                best = d.portfolio;
            }
            if (f && *f <= *cfg.max_initial_objective)
                break;
        }
        d.portfolio = std::move(best);
    }
    return d;
}

}  // namespace ratpo
