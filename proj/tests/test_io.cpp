#include "catch_amalgamated.hpp"

#include "ratpo/io.hpp"
#include "ratpo/text.hpp"
#include "test_support.hpp"

#include <json.hpp>

using namespace ratpo;

namespace {

Dataset small_dataset()
{
    DatasetConfig cfg;
    cfg.profile = portfolio_profile("small");
    cfg.scenarios.count = 20;
    return gen_dataset(9, reference_universe_specs(), cfg);
}

}  // namespace

TEST_CASE("number formatting round-trips")
{
    for (double v : {0.1, -1e-300, 1.0 / 3.0, 123456789.125, 0.0, 5e-324})
        CHECK(text::parse_double(text::format_double(v), "v") == v);
    CHECK(text::format_fixed(0.30000000000000004, 10) == "0.3000000000");
    CHECK(text::parse_int(" 42 ", "n") == 42);
    CHECK_THROWS_AS(text::parse_double("abc", "field x"), SchemaError);
    CHECK_THROWS_AS(text::parse_int("4.5", "n"), SchemaError);
    auto parts = text::split("a,b,,c", ',');
    CHECK(parts.size() == 4);
    CHECK(parts[2].empty());
}

TEST_CASE("data files round-trip byte for byte")
{
    const auto d = small_dataset();

    const auto u = io::universe_to_json(d.specs);
    CHECK(io::universe_from_json(u) == d.specs);
    CHECK(io::universe_to_json(io::universe_from_json(u)) == u);

    const auto p = io::portfolio_to_csv(d.portfolio);
    CHECK(io::portfolio_from_csv(p).legs == d.portfolio.legs);
    CHECK(io::portfolio_to_csv(io::portfolio_from_csv(p)) == p);

    const auto m = io::market_to_json(d.market);
    CHECK(io::market_from_json(m) == d.market);
    CHECK(io::market_to_json(io::market_from_json(m)) == m);

    const auto s = io::scenarios_to_csv(d.scenarios);
    CHECK(io::scenarios_from_csv(s) == d.scenarios);
    CHECK(io::scenarios_to_csv(io::scenarios_from_csv(s)) == s);
}

TEST_CASE("config files round-trip")
{
    ProblemConfig pc;
    pc.set_tau(0.25);
    pc.daycount = 365;
    pc.grid_points = 11;
    const auto pj = io::problem_config_to_json(pc);
    CHECK(io::problem_config_to_json(io::problem_config_from_json(pj)) == pj);

    auto shortcut = io::problem_config_from_json(R"({"tau_g": 0.5, "penalty": 3})");
    CHECK(shortcut.tau_delta == 0.5);
    CHECK(shortcut.tau_gamma == 0.5);
    CHECK(shortcut.penalty_vega == 3);
    CHECK(shortcut.beta == 0.01);

    RatsConfig rc;
    rc.particles = 17;
    rc.random_mode = RandomMode::PerParticle;
    rc.concentration_mode = ConcentrationMode::Fitness;
    rc.inject_zero = false;
    rc.seed = 123456789012345ULL;
    const auto rj = io::rats_config_to_json(rc);
    const auto back = io::rats_config_from_json(rj);
    CHECK(back.particles == 17);
    CHECK(back.random_mode == RandomMode::PerParticle);
    CHECK(back.concentration_mode == ConcentrationMode::Fitness);
    CHECK_FALSE(back.inject_zero);
    CHECK(back.seed == rc.seed);
    CHECK(io::rats_config_to_json(back) == rj);
}

TEST_CASE("schema errors name the offending field")
{
    auto message = [](auto&& fn) {
        try {
            fn();
        } catch (const SchemaError& e) {
            return std::string(e.what());
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message([] { io::portfolio_from_csv("instrument_id,notional\nKO.N|s|-|-|E,abc\n"); })
              .find("notional") != std::string::npos);
    CHECK(message([] { io::portfolio_from_csv("id,amount\n"); }) != "");
    CHECK(message([] { io::scenarios_from_csv("X_ret,EUR_rateshift\n0.1,0\n"); }).find("X_volshift") !=
          std::string::npos);
    CHECK(message([] { io::market_from_json(R"({"underlyings": {"X": {"vol": 0.2}}, "currencies": {}})"); })
              .find("spot") != std::string::npos);
    CHECK(message([] { io::universe_from_json(R"([{"ticker": "A", "category": "bond", "tenors": [21]}])"); })
              .find("category") != std::string::npos);
    CHECK(message([] { io::rats_config_from_json(R"({"particles": -3})"); }).find("particles") !=
          std::string::npos);
    CHECK(message([] { io::problem_config_from_json("{not json"); }) != "");
}

TEST_CASE("data directory save and load")
{
    const auto d = small_dataset();
    const auto dir = testing::temp_dir("io_dir");
    io::save_data_dir(dir, d);
    const auto back = io::load_data_dir(dir);
    CHECK(back.specs == d.specs);
    CHECK(back.market == d.market);
    CHECK(back.scenarios == d.scenarios);
    CHECK(back.portfolio.legs == d.portfolio.legs);
    CHECK_THROWS(io::load_data_dir(dir / "missing"));
}

TEST_CASE("report writers")
{
    auto problem = testing::reduced_problem(3, 0.5, 3);
    RatsConfig rc;
    rc.particles = 20;
    rc.k_max = 5;
    auto r = run_rats(rc, problem);

    const auto traj = io::trajectory_to_csv(r.trajectory);
    CHECK(traj.rfind("iteration,", 0) == 0);
    CHECK(std::count(traj.begin(), traj.end(), '\n') == static_cast<long>(r.trajectory.size() + 1));

    io::ResultReport rep;
    rep.seed = 1;
    rep.rats = r;
    rep.empty = problem.evaluate(problem.structure().zero_position());
    rep.legs = problem.decoded_portfolio(r.position).legs;
    auto j = nlohmann::json::parse(io::result_to_json(rep));
    CHECK(j["result"]["fitness"].get<double>() == r.fitness);
    CHECK(j["strategy"].size() == rep.legs.size());
    CHECK(j["iterations"].get<std::size_t>() == r.iterations);

    auto oracle = enumerate(problem);
    const auto csv = io::oracle_to_csv(oracle, problem);
    CHECK(csv.find("status") != std::string::npos);
    CHECK(csv.find("optimal") != std::string::npos);

    const auto hist = io::pnl_hist_to_csv(problem.initial().pnl, problem.total_pnl(r.legs));
    CHECK(std::count(hist.begin(), hist.end(), '\n') == static_cast<long>(problem.scenario_count() + 1));

    const auto feat = io::features_to_csv(problem.universe_features());
    CHECK(feat.rfind("instrument_id,value,delta,vega,gamma,unit_cost,pnl_1", 0) == 0);
}
