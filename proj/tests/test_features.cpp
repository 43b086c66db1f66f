#include "catch_amalgamated.hpp"

#include "ratpo/datagen.hpp"
#include "ratpo/features.hpp"
#include "ratpo/parallel.hpp"
#include "test_support.hpp"

#include <random>

using namespace ratpo;

namespace {

struct Fixture {
    std::vector<UnderlyingSpec> specs = order_underlyings(reference_universe_specs());
    MarketData market;
    ScenarioSet scenarios;
    std::vector<std::string> ueis;

    Fixture()
    {
        market = gen_market(5, specs, synthetic_stock_tickers(4));
        ScenarioGenConfig sc;
        sc.count = 60;
        scenarios = gen_scenarios(6, market, sc);
        for (const auto& d : build_universe(specs))
            ueis.push_back(descriptor_id(d));
    }
};

double rel_err(double a, double b)
{
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
}

}  // namespace

TEST_CASE("aggregated features equal direct repricing of the book")
{
    Fixture fx;
    InstrumentResolver resolver(fx.specs, fx.market);
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        Portfolio p = gen_portfolio(1000 + trial, fx.specs, fx.market, portfolio_profile("small"));
        for (int k = 0; k < 5; ++k) {
            const auto& id = fx.ueis[std::uniform_int_distribution<std::size_t>(0, fx.ueis.size() - 1)(rng)];
            p.legs.push_back({id, std::uniform_int_distribution<std::int64_t>(-500, 500)(rng)});
        }
        std::vector<std::string> ids;
        for (const auto& l : p.legs)
            ids.push_back(l.instrument_id);
        auto table = build_feature_table(ids, resolver, fx.scenarios);
        auto agg = aggregate(table, p);
        auto direct = testing::direct_features(resolver, fx.scenarios, p);
        CHECK(rel_err(agg.value, direct.value) <= 1e-9);
        CHECK(rel_err(agg.delta, direct.delta) <= 1e-9);
        CHECK(rel_err(agg.vega, direct.vega) <= 1e-9);
        CHECK(rel_err(agg.gamma, direct.gamma) <= 1e-9);
        for (std::size_t i = 0; i < agg.pnl.size(); ++i)
            CHECK(rel_err(agg.pnl[i], direct.pnl[i]) <= 1e-9);
    }
}

TEST_CASE("cost is symmetric in the sign of the notional")
{
    Fixture fx;
    InstrumentResolver resolver(fx.specs, fx.market);
    auto table = build_feature_table(fx.ueis, resolver, fx.scenarios);
    for (std::size_t i = 0; i < table.size(); i += 7) {
        Portfolio a{{{table.ids()[i], 37}}};
        Portfolio b{{{table.ids()[i], -37}}};
        CHECK(aggregate(table, a).cost == aggregate(table, b).cost);
        CHECK(aggregate(table, a).delta == -aggregate(table, b).delta);
        CHECK(table.at(i).unit_cost >= 0.0);
    }
}

TEST_CASE("unit cost formulas")
{
    UnderlyingMarket um;
    um.spot_spread = 0.001;
    um.futures_spread = 2.0;
    um.vol_spread["0.25"] = 0.004;
    Greeks g{3.0, 1.5, 0.2};
    CHECK(unit_cost(InstrumentKind::Futures, g, um, 0.9, 0.25) == Catch::Approx(0.5 * 2.0 * 0.9));
    CHECK(unit_cost(InstrumentKind::Stock, g, um, 1.0, std::nullopt) == Catch::Approx(0.5 * 300 * 0.001));
    CHECK(unit_cost(InstrumentKind::Call, g, um, 1.0, 0.25) ==
          Catch::Approx(0.5 * 300 * 0.001 + 0.5 * 150 * 0.004));
    Greeks neg{-3.0, 1.5, 0.2};
    CHECK(unit_cost(InstrumentKind::Put, neg, um, 1.0, 0.25) == unit_cost(InstrumentKind::Call, g, um, 1.0, 0.25));
    CHECK_THROWS_AS(unit_cost(InstrumentKind::Call, g, um, 1.0, 0.10), SchemaError);
}

TEST_CASE("feature structure of single instruments")
{
    Fixture fx;
    InstrumentResolver resolver(fx.specs, fx.market);
    auto stock = compute_features("01|s|-|-", resolver, fx.scenarios);
    const auto& um = fx.market.underlying(fx.specs[0].ticker);
    const double eur = fx.market.currency(um.currency).fx_eur;
    CHECK(stock.value == Catch::Approx(um.spot * eur));
    CHECK(stock.delta == Catch::Approx(0.01 * stock.value).epsilon(1e-12));
    CHECK(stock.vega == 0.0);
    CHECK(stock.pnl.size() == fx.scenarios.count);

    auto fut = compute_features("13|q|0.25|021", resolver, fx.scenarios);
    CHECK(fut.value == Catch::Approx(0.0).margin(1e-9));
    CHECK(fut.vega == 0.0);

    auto call = compute_features("13|c|0.50|630", resolver, fx.scenarios);
    CHECK(call.delta > 0);
    CHECK(call.vega > 0);
    CHECK(call.gamma > 0);
}

TEST_CASE("resolver rejects inconsistent ids")
{
    Fixture fx;
    InstrumentResolver resolver(fx.specs, fx.market);
    CHECK_THROWS_AS(resolver.resolve("13|s|-|-"), SchemaError);
    CHECK_THROWS_AS(resolver.resolve("01|q|0.25|021"), SchemaError);
    CHECK_THROWS_AS(resolver.resolve("13|c|0.25|022"), SchemaError);
    CHECK_THROWS_AS(resolver.resolve("14|c|0.25|021"), SchemaError);
    CHECK_THROWS_AS(compute_features("NOPE|s|-|-|E", resolver, fx.scenarios), SchemaError);
    CHECK_NOTHROW(resolver.resolve("ZS001.PA|s|-|-|E"));
}

TEST_CASE("parallel feature table matches the serial one")
{
    Fixture fx;
    InstrumentResolver resolver(fx.specs, fx.market);
    std::vector<std::string> ids(fx.ueis.begin(), fx.ueis.begin() + 80);
    ids.push_back(ids.front());
    auto serial = build_feature_table(ids, resolver, fx.scenarios);
    WorkerPool pool(4);
    auto par = build_feature_table(ids, resolver, fx.scenarios, &pool);
    REQUIRE(serial.size() == 80);
    REQUIRE(par.ids() == serial.ids());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(par.at(i).pnl == serial.at(i).pnl);
        CHECK(par.at(i).value == serial.at(i).value);
    }
    CHECK(serial.index_of(ids[5]) == 5);
    CHECK_THROWS_AS(serial.at("missing"), SchemaError);
}
