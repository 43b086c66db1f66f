#include "ratpo/cli.hpp"

#include "ratpo/datagen.hpp"
#include "ratpo/io.hpp"
#include "ratpo/oracle.hpp"
#include "ratpo/parallel.hpp"
#include "ratpo/rats.hpp"
#include "ratpo/text.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>

namespace ratpo::cli {

namespace fs = std::filesystem;

namespace {

std::uint64_t mix(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string env_or(const char* name, const std::string& fallback)
{
    if (const char* v = std::getenv(name); v && *v)
        return v;
    return fallback;
}

// Resolves an optional config path: flag, then environment, then nothing.
std::optional<fs::path> config_path(const std::string& flag, const char* env)
{
    const std::string p = flag.empty() ? env_or(env, "") : flag;
    if (p.empty())
        return std::nullopt;
    return fs::path(p);
}

ProblemConfig load_problem_config(const std::string& flag)
{
    if (auto p = config_path(flag, "RATPO_PROBLEM"))
        return io::problem_config_from_json(io::read_file(*p));
    return {};
}

RatsConfig load_rats_config(const std::string& flag)
{
    if (auto p = config_path(flag, "RATPO_RATS"))
        return io::rats_config_from_json(io::read_file(*p));
    return {};
}

fs::path data_dir(const std::string& flag)
{
    const std::string p = flag.empty() ? env_or("RATPO_DATA_DIR", "") : flag;
    if (p.empty())
        throw ConfigError("no data directory given (use --data-dir or RATPO_DATA_DIR)");
    return p;
}

std::size_t thread_count(int flag)
{
    if (flag < 0)
        throw ConfigError("--threads must be non-negative");
    return flag == 0 ? default_thread_count() : static_cast<std::size_t>(flag);
}

std::vector<UnderlyingSpec> universe_by_name(const std::string& name)
{
    if (name == "reference")
        return reference_universe_specs();
    if (name == "single-index")
        return single_index_specs();
    return io::universe_from_json(io::read_file(name));
}

struct Overrides {
    std::optional<double> c_pers, c_soc, tau_g;
    std::optional<std::size_t> particles, k_max;
    std::optional<std::uint64_t> seed;

    void apply(ProblemConfig& p, RatsConfig& r) const
    {
        if (tau_g)
            p.set_tau(*tau_g);
        if (c_pers)
            r.c_pers = *c_pers;
        if (c_soc)
            r.c_soc = *c_soc;
        if (particles)
            r.particles = *particles;
        if (k_max)
            r.k_max = *k_max;
        if (seed)
            r.seed = *seed;
        p.validate();
        r.validate();
    }
};

// ---------------------------------------------------------------- gen

struct GenArgs {
    std::uint64_t seed = 1;
    std::string out_dir;
    std::string profile = "table1";
    std::string universe = "reference";
    std::string bounds = "derived";
    std::size_t scenarios = 250;
};

int cmd_gen(const GenArgs& a, std::ostream& out)
{
    DatasetConfig cfg;
    cfg.profile = portfolio_profile(a.profile);
    cfg.scenarios.count = a.scenarios;
    if (a.bounds == "derived")
        cfg.derived_bounds = true;
    else if (a.bounds == "fixed")
        cfg.derived_bounds = false;
    else
        throw ConfigError("--bounds must be 'derived' or 'fixed'");
    const auto d = gen_dataset(a.seed, universe_by_name(a.universe), cfg);
    io::save_data_dir(a.out_dir, d);
    out << "wrote " << d.specs.size() << " underlyings, " << d.portfolio.legs.size() << " legs, "
        << d.scenarios.count << " scenarios to " << a.out_dir << "\n";
    return kOk;
}

// ---------------------------------------------------------------- features

struct FeaturesArgs {
    std::string data_dir;
    std::string problem;
    std::string out = "features.csv";
    int threads = 0;
};

int cmd_features(const FeaturesArgs& a, std::ostream& out)
{
    const auto data = io::load_data_dir(data_dir(a.data_dir));
    const auto cfg = load_problem_config(a.problem);
    WorkerPool pool(thread_count(a.threads));
    const auto table = build_all_features(data, cfg, &pool);
    io::write_file(a.out, io::features_to_csv(table));
    out << "wrote features for " << table.size() << " instruments to " << a.out << "\n";
    return kOk;
}

// ---------------------------------------------------------------- optimize

struct OptimizeArgs {
    std::string data_dir;
    std::string problem;
    std::string rats;
    std::string out = "out";
    int threads = 0;
    Overrides overrides;
};

int cmd_optimize(const OptimizeArgs& a, std::ostream& out, std::ostream& err)
{
    const auto data = io::load_data_dir(data_dir(a.data_dir));
    auto pcfg = load_problem_config(a.problem);
    auto rcfg = load_rats_config(a.rats);
    a.overrides.apply(pcfg, rcfg);

    WorkerPool pool(thread_count(a.threads));
    const auto problem = build_problem(data, pcfg, &pool);
    const Evaluation empty = problem.evaluate(problem.structure().zero_position());
    if (!empty.objective) {
        err << "error: degenerate problem: the initial portfolio has VaR - cost >= -epsilon\n";
        return kDegenerate;
    }
    const auto result = run_rats(rcfg, problem, &pool);

    io::ResultReport report;
    report.seed = rcfg.seed;
    report.rats = result;
    report.empty = empty;
    report.pnl_rf = problem.pnl_rf();
    report.legs = problem.decoded_portfolio(result.position).legs;
    const fs::path dir = a.out;
    io::write_file(dir / "result.json", io::result_to_json(report));
    io::write_file(dir / "trajectory.csv", io::trajectory_to_csv(result.trajectory));
    io::write_file(dir / "pnl_hist.csv",
                   io::pnl_hist_to_csv(problem.initial().pnl, problem.total_pnl(result.legs)));

    out << "fitness " << text::format_double(result.fitness) << " after " << result.iterations
        << " iterations (" << to_string(result.stop_reason) << "), " << report.legs.size() << " legs, "
        << (result.evaluation.feasible() ? "feasible" : "infeasible") << "\n";
    if (!result.evaluation.objective) {
        err << "error: no non-degenerate strategy found\n";
        return kDegenerate;
    }
    return kOk;
}

// ---------------------------------------------------------------- oracle

struct OracleArgs {
    std::string data_dir;
    std::string problem;
    std::string out = "oracle.csv";
    std::uint64_t budget = 10'000'000;
    double tau_eq = 1e-12;
    std::size_t max_positions = 100;
    bool progress = false;
    int threads = 0;
    std::optional<double> tau_g;
};

int cmd_oracle(const OracleArgs& a, std::ostream& out, std::ostream& err)
{
    const auto data = io::load_data_dir(data_dir(a.data_dir));
    auto pcfg = load_problem_config(a.problem);
    if (a.tau_g)
        pcfg.set_tau(*a.tau_g);
    WorkerPool pool(thread_count(a.threads));
    const auto problem = build_problem(data, pcfg, &pool);

    OracleOptions opt;
    opt.budget = a.budget;
    opt.tau_eq = a.tau_eq;
    opt.max_positions = a.max_positions;
    if (a.progress)
        opt.progress = [&err](std::uint64_t done, std::uint64_t total) {
            err << "\r" << done << " / " << total << std::flush;
            if (done == total)
                err << "\n";
        };
    OracleResult r;
    try {
        r = enumerate(problem, opt, &pool);
    } catch (const BudgetExceeded& e) {
        err << "error: " << e.what() << "\n";
        return kBudgetExceeded;
    }
    io::write_file(a.out, io::oracle_to_csv(r, problem));
    if (r.status == OracleStatus::Optimal)
        out << "optimal fitness " << text::format_double(r.optimal_fitness) << " (" << r.optimal_count
            << " optimal positions of " << r.enumerated << ")\n";
    else
        out << "no feasible position among " << r.enumerated << "\n";
    return kOk;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
    std::string data_dir;
    std::string problem;
    std::string rats;
    std::vector<std::string> grid = {"c_pers=0.1:1.9:0.1", "c_soc=0.1:1.9:0.1"};
    std::string tau_g = "0.1,0.5,1.0";
    std::string out = "sweep.csv";
    std::uint64_t seed = 1;
    int threads = 0;
    std::size_t cell_workers = 1;
    Overrides overrides;
};

struct Cell {
    double c_pers = 0, c_soc = 0, tau_g = 0;
    std::uint64_t seed = 0;
    std::string row;
    bool failed = false;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err)
{
    std::vector<double> c_pers, c_soc;
    for (const auto& g : a.grid) {
        std::string name;
        auto values = parse_range(g, &name);
        if (name == "c_pers")
            c_pers = std::move(values);
        else if (name == "c_soc")
            c_soc = std::move(values);
        else
            throw ConfigError("unknown grid parameter '" + name + "' (expected c_pers or c_soc)");
    }
    if (c_pers.empty() || c_soc.empty())
        throw ConfigError("--grid needs both c_pers and c_soc ranges");
    const auto taus = parse_list(a.tau_g);
    if (a.cell_workers < 1)
        throw ConfigError("--cell-workers must be at least 1");

    const auto data = io::load_data_dir(data_dir(a.data_dir));
    auto base_p = load_problem_config(a.problem);
    auto base_r = load_rats_config(a.rats);
    a.overrides.apply(base_p, base_r);

    const std::size_t threads = thread_count(a.threads);
    const std::size_t workers = std::min(a.cell_workers, threads);
    std::vector<std::unique_ptr<ProblemInstance>> problems;
    {
        WorkerPool pool(threads);
        const auto table = build_all_features(data, base_p, &pool);
        for (double t : taus) {
            auto p = base_p;
            p.set_tau(t);
            problems.push_back(std::make_unique<ProblemInstance>(build_problem(data, p, table)));
        }
    }

    std::vector<Cell> cells;
    std::vector<std::size_t> cell_problem;
    for (std::size_t ti = 0; ti < taus.size(); ++ti)
        for (double cp : c_pers)
            for (double cs : c_soc) {
                cells.push_back({cp, cs, taus[ti], cell_seed(a.seed, cp, cs, taus[ti]), {}, false});
                cell_problem.push_back(ti);
            }

    std::atomic<std::size_t> next{0};
    auto worker = [&](std::size_t pool_threads) {
        WorkerPool pool(pool_threads);
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            Cell& c = cells[i];
            std::string prefix = text::format_double(c.c_pers) + "," + text::format_double(c.c_soc) + "," +
                                 text::format_double(c.tau_g) + "," + std::to_string(c.seed) + ",";
            try {
                auto r = base_r;
                r.c_pers = c.c_pers;
                r.c_soc = c.c_soc;
                r.seed = c.seed;
                const auto res = run_rats(r, *problems[cell_problem[i]], &pool);
                const auto& e = res.evaluation;
                c.row = prefix + text::format_double(res.fitness) + "," +
                        (e.objective ? text::format_double(*e.objective) : std::string("nan")) + "," +
                        (e.feasible() ? "1" : "0") + "," + std::to_string(res.iterations) + "," +
                        to_string(res.stop_reason) + "," + text::format_fixed(res.total_s, 6) + ",ok";
            } catch (const std::exception& ex) {
                c.failed = true;
                c.row = prefix + "nan,nan,0,0,none,0,failed";
                std::string msg = ex.what();
                std::replace(msg.begin(), msg.end(), ',', ';');
                c.row += ":" + msg;
            }
        }
    };
    const std::size_t per = std::max<std::size_t>(1, threads / workers);
    std::vector<std::thread> pool_threads;
    for (std::size_t w = 1; w < workers; ++w)
        pool_threads.emplace_back(worker, per);
    worker(per);
    for (auto& t : pool_threads)
        t.join();

    std::string csv = "c_pers,c_soc,tau_g,seed,fitness,objective,feasible,iterations,stop_reason,wall_s,status\n";
    std::size_t failed = 0;
    for (const auto& c : cells) {
        csv += c.row + "\n";
        failed += c.failed ? 1 : 0;
    }
    io::write_file(a.out, csv);
    out << "wrote " << cells.size() << " cells to " << a.out << "\n";
    if (failed) {
        err << "error: " << failed << " sweep cells failed\n";
        return kSweepCellFailed;
    }
    return kOk;
}

void add_overrides(CLI::App* sub, Overrides& o)
{
    sub->add_option("--c-pers", o.c_pers, "Personal acceleration coefficient");
    sub->add_option("--c-soc", o.c_soc, "Social acceleration coefficient");
    sub->add_option("--particles", o.particles, "Swarm size");
    sub->add_option("--k-max", o.k_max, "Maximum number of iterations");
}

}  // namespace

std::uint64_t cell_seed(std::uint64_t master, double c_pers, double c_soc, double tau_g)
{
    std::uint64_t h = mix(master);
    for (double v : {c_pers, c_soc, tau_g})
        h = mix(h ^ std::bit_cast<std::uint64_t>(v + 0.0));
    return h;
}

std::vector<double> parse_range(const std::string& spec, std::string* name)
{
    const auto eq = spec.find('=');
    const std::string body = eq == std::string::npos ? spec : spec.substr(eq + 1);
    if (name)
        *name = eq == std::string::npos ? std::string() : spec.substr(0, eq);
    const auto parts = text::split(body, ':');
    if (parts.size() != 3)
        throw ConfigError("range '" + spec + "' must look like name=lo:hi:step");
    const double lo = text::parse_double(parts[0], "range start");
    const double hi = text::parse_double(parts[1], "range end");
    const double step = text::parse_double(parts[2], "range step");
    if (!(step > 0) || hi < lo)
        throw ConfigError("range '" + spec + "' needs step > 0 and hi >= lo");
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> out;
    for (std::size_t k = 0; k < n; ++k)
        // Round through a decimal string so 0.1 + 2*0.1 comes out as 0.3.
        out.push_back(text::parse_double(text::format_fixed(lo + static_cast<double>(k) * step, 10), "range value"));
    return out;
}

std::vector<double> parse_list(const std::string& spec)
{
    std::vector<double> out;
    for (auto p : text::split(spec, ','))
        out.push_back(text::parse_double(text::trim(p), "list value"));
    if (out.empty())
        throw ConfigError("empty value list");
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Risk-aware trading portfolio optimization"};
    app.name("ratpo");
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    GenArgs gen;
    auto* g = app.add_subcommand("gen", "Generate a synthetic data directory");
    g->add_option("--seed", gen.seed, "Master seed");
    g->add_option("--out-dir", gen.out_dir, "Output directory")->required();
    g->add_option("--profile", gen.profile, "Portfolio profile: table1, small or empty");
    g->add_option("--universe", gen.universe, "reference, single-index or a universe.json path");
    g->add_option("--bounds", gen.bounds, "Notional bounds: derived, or fixed from the universe spec");
    g->add_option("--scenarios", gen.scenarios, "Number of scenarios");

    FeaturesArgs feat;
    auto* f = app.add_subcommand("features", "Export the feature table");
    f->add_option("--data-dir", feat.data_dir, "Data directory");
    f->add_option("--problem", feat.problem, "problem.json");
    f->add_option("--out", feat.out, "Output CSV");
    f->add_option("--threads", feat.threads, "Worker threads (0 = all cores)");

    OptimizeArgs opt;
    auto* o = app.add_subcommand("optimize", "Run the swarm optimizer");
    o->add_option("--data-dir", opt.data_dir, "Data directory");
    o->add_option("--problem", opt.problem, "problem.json");
    o->add_option("--rats", opt.rats, "rats.json");
    o->add_option("--seed", opt.overrides.seed, "Swarm seed");
    o->add_option("--out", opt.out, "Output directory");
    o->add_option("--threads", opt.threads, "Worker threads (0 = all cores)");
    o->add_option("--tau-g", opt.overrides.tau_g, "Common constraint threshold");
    add_overrides(o, opt.overrides);

    OracleArgs orc;
    auto* b = app.add_subcommand("oracle", "Enumerate the whole search space");
    b->add_option("--data-dir", orc.data_dir, "Data directory");
    b->add_option("--problem", orc.problem, "problem.json");
    b->add_option("--budget", orc.budget, "Maximum number of candidates");
    b->add_option("--out", orc.out, "Output CSV");
    b->add_option("--tau-eq", orc.tau_eq, "Optimal-set tolerance");
    b->add_option("--tau-g", orc.tau_g, "Common constraint threshold");
    b->add_option("--max-positions", orc.max_positions, "Optimal positions to list");
    b->add_flag("--progress", orc.progress, "Report progress on stderr");
    b->add_option("--threads", orc.threads, "Worker threads (0 = all cores)");

    SweepArgs sw;
    auto* s = app.add_subcommand("sweep", "Grid sweep over c_pers, c_soc and tau_g");
    s->add_option("--data-dir", sw.data_dir, "Data directory");
    s->add_option("--problem", sw.problem, "problem.json");
    s->add_option("--rats", sw.rats, "rats.json");
    s->add_option("--grid", sw.grid, "Ranges such as c_pers=0.1:1.9:0.1")->expected(1, 2);
    s->add_option("--tau-g", sw.tau_g, "Comma-separated tau_g values");
    s->add_option("--seed", sw.seed, "Master seed");
    s->add_option("--out", sw.out, "Output CSV");
    s->add_option("--threads", sw.threads, "Worker thread cap (0 = all cores)");
    s->add_option("--cell-workers", sw.cell_workers, "Cells run concurrently");
    s->add_option("--particles", sw.overrides.particles, "Swarm size");
    s->add_option("--k-max", sw.overrides.k_max, "Maximum number of iterations");

    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*g)
            return cmd_gen(gen, out);
        if (*f)
            return cmd_features(feat, out);
        if (*o)
            return cmd_optimize(opt, out, err);
        if (*b)
            return cmd_oracle(orc, out, err);
        if (*s)
            return cmd_sweep(sw, out, err);
    } catch (const BudgetExceeded& e) {
        err << "error: " << e.what() << "\n";
        return kBudgetExceeded;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }
    return kConfigError;
}

}  // namespace ratpo::cli
