#include "catch_amalgamated.hpp"

#include "ratpo/datagen.hpp"

#include <cmath>
#include <map>

using namespace ratpo;

TEST_CASE("ticker helpers")
{
    CHECK(currency_for_ticker(".GSPC") == "USD");
    CHECK(currency_for_ticker(".FTSE") == "GBP");
    CHECK(currency_for_ticker("KO.N") == "USD");
    CHECK(currency_for_ticker("FB.O") == "USD");
    CHECK(currency_for_ticker("AXAF.PA") == "EUR");
    CHECK(currency_for_ticker("VOD.L") == "GBP");
    auto t = synthetic_stock_tickers(6);
    CHECK(t[0] == "ZS001.PA");
    CHECK(t[1] == "ZS002.N");
    CHECK(t[5] == "ZS006.PA");
    CHECK(portfolio_profile("table1").legs() == 127);
    CHECK(portfolio_profile("small").legs() == 17);
    CHECK(portfolio_profile("empty").legs() == 0);
    CHECK_THROWS_AS(portfolio_profile("huge"), ConfigError);
}

TEST_CASE("generation is deterministic in the seed")
{
    auto specs = reference_universe_specs();
    auto a = gen_dataset(42, specs);
    auto b = gen_dataset(42, specs);
    auto c = gen_dataset(43, specs);
    CHECK(a.market == b.market);
    CHECK(a.scenarios == b.scenarios);
    CHECK(a.portfolio.legs == b.portfolio.legs);
    CHECK_FALSE(a.market == c.market);
    CHECK_FALSE(a.scenarios == c.scenarios);
}

TEST_CASE("market covers spec and synthetic underlyings")
{
    auto specs = reference_universe_specs();
    auto m = gen_market(1, specs, synthetic_stock_tickers(3));
    CHECK(m.underlyings.size() == 16);
    CHECK(m.currencies.size() == 3);
    CHECK(m.currencies.at("EUR").fx_eur == 1.0);
    CHECK_NOTHROW(m.validate());
    const auto& sx = m.underlying(".STOXX50E");
    CHECK(sx.futures_spread > 0);
    CHECK(sx.vol_spread.size() == 3);
    CHECK(sx.vol_surface.size() == 18);
    CHECK(m.underlying("ZS001.PA").vol_surface.empty());
}

TEST_CASE("portfolio follows the profile")
{
    auto specs = reference_universe_specs();
    DatasetConfig cfg;
    cfg.max_initial_objective.reset();
    auto d = gen_dataset(7, specs, cfg);
    std::map<std::string, int> counts;
    for (const auto& leg : d.portfolio.legs) {
        auto inst = parse_static_id(leg.instrument_id);
        CHECK(leg.notional != 0);
        CHECK(d.market.underlyings.count(inst.ticker) == 1);
        if (inst.kind == InstrumentKind::Stock)
            counts["stock"]++;
        else if (inst.kind == InstrumentKind::Futures)
            counts["futures"]++;
        else
            counts[inst.exercise == Exercise::American ? "american" : "european"]++;
    }
    CHECK(counts["stock"] == 75);
    CHECK(counts["futures"] == 14);
    CHECK(counts["european"] == 10);
    CHECK(counts["american"] == 28);
    // 75 stock legs on 8 spec stocks: the rest are synthetic.
    CHECK(d.market.underlyings.size() == 13 + 67);
    CHECK(d.specs.front().ticker == "AXAF.PA");
    CHECK_FALSE(d.specs.front().option_notional_bound.has_value());
}

TEST_CASE("redraw targets a negative initial objective")
{
    auto specs = single_index_specs();
    for (std::uint64_t seed : {1, 2, 3}) {
        auto d = gen_dataset(seed, specs);
        auto f = initial_objective(d.portfolio, d.specs, d.market, d.scenarios);
        REQUIRE(f);
        CHECK(*f < 0);
    }
    DatasetConfig empty;
    empty.profile = portfolio_profile("empty");
    CHECK(gen_dataset(1, specs, empty).portfolio.legs.empty());
}

TEST_CASE("scenario returns are heavy tailed and correlated")
{
    auto m = gen_market(3, reference_universe_specs());
    ScenarioGenConfig cfg;
    cfg.count = 20000;
    cfg.drift_max = 0.0;
    auto s = gen_scenarios(3, m, cfg);
    REQUIRE(s.tickers.size() == 13);
    REQUIRE(s.currencies.size() == 3);
    const std::size_t n = s.count;
    auto moments = [&](std::size_t l) {
        double m1 = 0, m2 = 0, m4 = 0;
        for (std::size_t i = 0; i < n; ++i)
            m1 += s.spot_return(i, l);
        m1 /= n;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = s.spot_return(i, l) - m1;
            m2 += d * d;
            m4 += d * d * d * d;
        }
        m2 /= n;
        m4 /= n;
        return std::pair{m2, m4 / (m2 * m2)};
    };
    const auto [var0, kurt0] = moments(0);
    CHECK(kurt0 > 3.5);
    const double daily = m.underlying(s.tickers[0]).vol / std::sqrt(252.0);
    CHECK(std::sqrt(var0) == Catch::Approx(daily).epsilon(0.05));

    double cov = 0, m0 = 0, m1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        m0 += s.spot_return(i, 0);
        m1 += s.spot_return(i, 1);
    }
    m0 /= n;
    m1 /= n;
    for (std::size_t i = 0; i < n; ++i)
        cov += (s.spot_return(i, 0) - m0) * (s.spot_return(i, 1) - m1);
    cov /= n;
    const double corr = cov / std::sqrt(var0 * moments(1).first);
    CHECK(corr == Catch::Approx(0.5).margin(0.05));

    CHECK_THROWS_AS(gen_scenarios(1, m, ScenarioGenConfig{0}), ConfigError);
}
