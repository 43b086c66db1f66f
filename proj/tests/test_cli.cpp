#include "catch_amalgamated.hpp"

#include "ratpo/cli.hpp"
#include "ratpo/io.hpp"
#include "ratpo/text.hpp"
#include "test_support.hpp"

#include <json.hpp>

#include <cstdlib>
#include <sstream>

using namespace ratpo;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run ratpo_cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "ratpo");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);)
        out.push_back(l);
    return out;
}

// Single index with two tenors, small portfolio, 7-point grids.
std::filesystem::path small_data(const std::string& name)
{
    const auto dir = testing::temp_dir(name);
    const auto uni = dir / "universe_in.json";
    io::write_file(uni, io::universe_to_json(testing::reduced_index_specs()));
    auto r = ratpo_cli({"gen", "--seed", "3", "--out-dir", (dir / "data").string(), "--universe", uni.string(),
                        "--scenarios", "100"});
    REQUIRE(r.code == 0);
    io::write_file(dir / "problem.json", R"({"tau_g": 0.5, "grid_points": 5})");
    return dir;
}

}  // namespace

TEST_CASE("range and list parsing")
{
    std::string name;
    auto v = cli::parse_range("c_pers=0.1:1.9:0.1", &name);
    CHECK(name == "c_pers");
    REQUIRE(v.size() == 19);
    CHECK(v.front() == 0.1);
    CHECK(v[2] == 0.3);
    CHECK(v.back() == 1.9);
    CHECK(cli::parse_range("x=0.5:0.5:0.1").size() == 1);
    CHECK_THROWS_AS(cli::parse_range("x=1:0:0.1"), ConfigError);
    CHECK_THROWS_AS(cli::parse_range("x=0:1:0"), ConfigError);
    CHECK_THROWS_AS(cli::parse_range("nonsense"), ConfigError);
    CHECK(cli::parse_list("0.1,0.5,1.0") == std::vector<double>{0.1, 0.5, 1.0});
    CHECK_THROWS(cli::parse_list("0.1,,x"));
}

TEST_CASE("cell seeds depend on every coordinate")
{
    const auto s = cli::cell_seed(1, 0.5, 0.5, 0.1);
    CHECK(s == cli::cell_seed(1, 0.5, 0.5, 0.1));
    CHECK(s != cli::cell_seed(2, 0.5, 0.5, 0.1));
    CHECK(s != cli::cell_seed(1, 0.6, 0.5, 0.1));
    CHECK(s != cli::cell_seed(1, 0.5, 0.6, 0.1));
    CHECK(s != cli::cell_seed(1, 0.5, 0.5, 0.5));
    CHECK(cli::cell_seed(1, 0.5, 0.6, 0.1) != cli::cell_seed(1, 0.6, 0.5, 0.1));
}

TEST_CASE("usage errors exit with the config code")
{
    CHECK(ratpo_cli({}).code == cli::kConfigError);
    CHECK(ratpo_cli({"frobnicate"}).code == cli::kConfigError);
    CHECK(ratpo_cli({"gen"}).code == cli::kConfigError);
    CHECK(ratpo_cli({"--help"}).code == cli::kOk);
    auto r = ratpo_cli({"gen", "--out-dir", testing::temp_dir("cli_bad").string(), "--profile", "nope"});
    CHECK(r.code == cli::kConfigError);
    CHECK(r.err.find("nope") != std::string::npos);
    CHECK(ratpo_cli({"optimize", "--data-dir", "/nonexistent/dir"}).code == cli::kConfigError);
}

TEST_CASE("gen, features, optimize and oracle end to end")
{
    const auto dir = small_data("cli_e2e");
    const auto data = (dir / "data").string();
    const auto problem = (dir / "problem.json").string();
    for (const char* f : {"universe.json", "portfolio.csv", "market.json", "scenarios.csv"})
        CHECK(std::filesystem::exists(dir / "data" / f));

    auto f = ratpo_cli({"features", "--data-dir", data, "--problem", problem, "--out", (dir / "f.csv").string()});
    REQUIRE(f.code == 0);
    CHECK(lines(io::read_file(dir / "f.csv")).size() > 18);

    auto o = ratpo_cli({"optimize", "--data-dir", data, "--problem", problem, "--out", (dir / "opt").string(),
                        "--particles", "40", "--k-max", "20", "--seed", "5", "--threads", "2"});
    REQUIRE(o.code == 0);
    auto j = nlohmann::json::parse(io::read_file(dir / "opt" / "result.json"));
    CHECK(j["seed"].get<int>() == 5);
    CHECK(j["result"]["fitness"].get<double>() <= j["empty_strategy"]["fitness"].get<double>());
    CHECK(std::filesystem::exists(dir / "opt" / "trajectory.csv"));
    CHECK(lines(io::read_file(dir / "opt" / "pnl_hist.csv")).size() == 101);

    auto b = ratpo_cli({"oracle", "--data-dir", data, "--problem", problem, "--out", (dir / "o.csv").string()});
    REQUIRE(b.code == 0);
    auto rows = lines(io::read_file(dir / "o.csv"));
    REQUIRE(rows.size() >= 2);
    CHECK(rows[1].rfind("optimal,", 0) == 0);

    auto tight = ratpo_cli({"oracle", "--data-dir", data, "--problem", problem, "--budget", "10"});
    CHECK(tight.code == cli::kBudgetExceeded);
}

TEST_CASE("environment variables supply defaults")
{
    const auto dir = small_data("cli_env");
    ::setenv("RATPO_DATA_DIR", (dir / "data").c_str(), 1);
    ::setenv("RATPO_PROBLEM", (dir / "problem.json").c_str(), 1);
    io::write_file(dir / "rats.json", R"({"particles": 10, "k_max": 3})");
    ::setenv("RATPO_RATS", (dir / "rats.json").c_str(), 1);
    auto o = ratpo_cli({"optimize", "--out", (dir / "opt").string()});
    ::unsetenv("RATPO_DATA_DIR");
    ::unsetenv("RATPO_PROBLEM");
    ::unsetenv("RATPO_RATS");
    REQUIRE(o.code == 0);
    auto j = nlohmann::json::parse(io::read_file(dir / "opt" / "result.json"));
    CHECK(j["iterations"].get<int>() <= 3);
}

TEST_CASE("sweep rows are reproducible cell by cell")
{
    const auto dir = small_data("cli_sweep");
    const auto data = (dir / "data").string();
    const auto problem = (dir / "problem.json").string();
    auto full = ratpo_cli({"sweep", "--data-dir", data, "--problem", problem, "--grid", "c_pers=0.5:1.5:0.5",
                           "c_soc=0.5:1.0:0.5", "--tau-g", "0.1,1.0", "--seed", "9", "--particles", "20",
                           "--k-max", "10", "--out", (dir / "sweep.csv").string(), "--cell-workers", "2",
                           "--threads", "2"});
    REQUIRE(full.code == 0);
    auto rows = lines(io::read_file(dir / "sweep.csv"));
    REQUIRE(rows.size() == 1 + 3 * 2 * 2);
    CHECK(rows[0] == "c_pers,c_soc,tau_g,seed,fitness,objective,feasible,iterations,stop_reason,wall_s,status");

    auto single = ratpo_cli({"sweep", "--data-dir", data, "--problem", problem, "--grid", "c_pers=1.5:1.5:0.5",
                             "c_soc=0.5:0.5:0.5", "--tau-g", "1.0", "--seed", "9", "--particles", "20", "--k-max",
                             "10", "--out", (dir / "one.csv").string()});
    REQUIRE(single.code == 0);
    auto one = lines(io::read_file(dir / "one.csv"));
    REQUIRE(one.size() == 2);
    auto strip_wall = [](const std::string& row) {
        auto parts = text::split(row, ',');
        std::string out;
        for (std::size_t i = 0; i < parts.size(); ++i)
            if (i != 9)
                out += std::string(parts[i]) + ",";
        return out;
    };
    bool found = false;
    for (const auto& r : rows)
        found = found || strip_wall(r) == strip_wall(one[1]);
    CHECK(found);
}
