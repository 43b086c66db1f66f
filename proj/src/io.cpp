#include "ratpo/io.hpp"

#include "ratpo/text.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace ratpo::io {

using nlohmann::json;

namespace {

json parse_json(const std::string& text, const std::string& what)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(what + ": " + e.what());
    }
}

std::string dump(const json& j)
{
    return j.dump(2) + "\n";
}

const json& field(const json& obj, const std::string& key, const std::string& where)
{
    if (!obj.is_object())
        throw SchemaError(where + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end())
        throw SchemaError(where + ": missing field '" + key + "'");
    return *it;
}

double number(const json& obj, const std::string& key, const std::string& where)
{
    const auto& v = field(obj, key, where);
    if (!v.is_number())
        throw SchemaError(where + ": field '" + key + "' must be a number");
    return v.get<double>();
}

std::int64_t integer(const json& obj, const std::string& key, const std::string& where)
{
    const auto& v = field(obj, key, where);
    if (!v.is_number_integer())
        throw SchemaError(where + ": field '" + key + "' must be an integer");
    return v.get<std::int64_t>();
}

std::string string_field(const json& obj, const std::string& key, const std::string& where)
{
    const auto& v = field(obj, key, where);
    if (!v.is_string())
        throw SchemaError(where + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

template <typename T>
void optional_number(const json& obj, const std::string& key, const std::string& where, T& out)
{
    if (obj.contains(key)) {
        if constexpr (std::is_integral_v<T>)
            out = static_cast<T>(integer(obj, key, where));
        else
            out = number(obj, key, where);
    }
}

std::map<std::string, double> number_map(const json& v, const std::string& where)
{
    if (!v.is_object())
        throw SchemaError(where + ": expected an object");
    std::map<std::string, double> out;
    for (const auto& [k, x] : v.items()) {
        if (!x.is_number())
            throw SchemaError(where + ": entry '" + k + "' must be a number");
        out[k] = x.get<double>();
    }
    return out;
}

json number_or_null(double x)
{
    return std::isfinite(x) ? json(x) : json(nullptr);
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;
};

CsvTable read_csv(const std::string& text, const std::string& what)
{
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (text::trim(line).empty())
            continue;
        std::vector<std::string> cells;
        for (auto c : text::split(line, ','))
            cells.emplace_back(text::trim(c));
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size())
            throw SchemaError(what + " line " + std::to_string(line_no) + ": expected " +
                              std::to_string(t.header.size()) + " fields, found " + std::to_string(cells.size()));
        t.rows.push_back(std::move(cells));
        t.line_numbers.push_back(line_no);
    }
    if (t.header.empty())
        throw SchemaError(what + ": missing header");
    return t;
}

std::string where_line(const std::string& what, std::size_t line, const std::string& column)
{
    return what + " line " + std::to_string(line) + ", column '" + column + "'";
}

bool ends_with(const std::string& s, const std::string& suffix)
{
    return s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string join_csv(const std::vector<std::string>& cells)
{
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i)
            out += ',';
        out += cells[i];
    }
    out += '\n';
    return out;
}

}  // namespace

std::string universe_to_json(const std::vector<UnderlyingSpec>& specs)
{
    json arr = json::array();
    for (const auto& s : specs) {
        json o;
        o["ticker"] = s.ticker;
        o["category"] = s.category == UnderlyingCategory::Stock ? "stock" : "index";
        o["tenors"] = s.tenor_domain;
        if (s.option_notional_bound)
            o["option_notional_bound"] = *s.option_notional_bound;
        if (s.linear_notional_bound)
            o["linear_notional_bound"] = *s.linear_notional_bound;
        arr.push_back(std::move(o));
    }
    return dump(arr);
}

std::vector<UnderlyingSpec> universe_from_json(const std::string& text)
{
    const json j = parse_json(text, "universe.json");
    if (!j.is_array())
        throw SchemaError("universe.json: expected a list of underlyings");
    std::vector<UnderlyingSpec> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string where = "universe.json[" + std::to_string(i) + "]";
        UnderlyingSpec s;
        s.ticker = string_field(j[i], "ticker", where);
        const auto cat = string_field(j[i], "category", where);
        if (cat == "stock")
            s.category = UnderlyingCategory::Stock;
        else if (cat == "index")
            s.category = UnderlyingCategory::StockIndex;
        else
            throw SchemaError(where + ": category must be 'stock' or 'index'");
        const auto& tenors = field(j[i], "tenors", where);
        if (!tenors.is_array())
            throw SchemaError(where + ": field 'tenors' must be a list");
        for (const auto& t : tenors) {
            if (!t.is_number_integer())
                throw SchemaError(where + ": tenors must be integers");
            s.tenor_domain.push_back(t.get<int>());
        }
        if (j[i].contains("option_notional_bound"))
            s.option_notional_bound = integer(j[i], "option_notional_bound", where);
        if (j[i].contains("linear_notional_bound"))
            s.linear_notional_bound = integer(j[i], "linear_notional_bound", where);
        out.push_back(std::move(s));
    }
    return out;
}

std::string portfolio_to_csv(const Portfolio& p)
{
    std::string out = "instrument_id,notional\n";
    for (const auto& leg : p.legs)
        out += leg.instrument_id + "," + std::to_string(leg.notional) + "\n";
    return out;
}

Portfolio portfolio_from_csv(const std::string& text)
{
    const auto t = read_csv(text, "portfolio.csv");
    if (t.header != std::vector<std::string>{"instrument_id", "notional"})
        throw SchemaError("portfolio.csv: header must be 'instrument_id,notional'");
    Portfolio p;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        if (row[0].empty())
            throw SchemaError(where_line("portfolio.csv", t.line_numbers[r], "instrument_id") + ": empty id");
        p.legs.push_back({row[0], text::parse_int(row[1], where_line("portfolio.csv", t.line_numbers[r], "notional"))});
    }
    return p;
}

std::string market_to_json(const MarketData& m)
{
    json j;
    json u = json::object();
    for (const auto& [ticker, um] : m.underlyings) {
        json o;
        o["spot"] = um.spot;
        o["vol"] = um.vol;
        if (!um.vol_surface.empty())
            o["vol_surface"] = um.vol_surface;
        o["div_yield"] = um.div_yield;
        o["currency"] = um.currency;
        o["spot_spread"] = um.spot_spread;
        o["futures_spread"] = um.futures_spread;
        o["vol_spread"] = um.vol_spread;
        u[ticker] = std::move(o);
    }
    json c = json::object();
    for (const auto& [ccy, cm] : m.currencies)
        c[ccy] = {{"rate", cm.rate}, {"fx_eur", cm.fx_eur}};
    j["underlyings"] = std::move(u);
    j["currencies"] = std::move(c);
    return dump(j);
}

MarketData market_from_json(const std::string& text)
{
    const json j = parse_json(text, "market.json");
    MarketData m;
    const auto& u = field(j, "underlyings", "market.json");
    if (!u.is_object())
        throw SchemaError("market.json: 'underlyings' must be an object");
    for (const auto& [ticker, o] : u.items()) {
        const std::string where = "market.json underlying '" + ticker + "'";
        UnderlyingMarket um;
        um.spot = number(o, "spot", where);
        um.vol = number(o, "vol", where);
        if (o.contains("vol_surface"))
            um.vol_surface = number_map(o["vol_surface"], where + " vol_surface");
        um.div_yield = number(o, "div_yield", where);
        um.currency = string_field(o, "currency", where);
        um.spot_spread = number(o, "spot_spread", where);
        um.futures_spread = number(o, "futures_spread", where);
        um.vol_spread = number_map(field(o, "vol_spread", where), where + " vol_spread");
        m.underlyings[ticker] = std::move(um);
    }
    const auto& c = field(j, "currencies", "market.json");
    if (!c.is_object())
        throw SchemaError("market.json: 'currencies' must be an object");
    for (const auto& [ccy, o] : c.items()) {
        const std::string where = "market.json currency '" + ccy + "'";
        m.currencies[ccy] = {number(o, "rate", where), number(o, "fx_eur", where)};
    }
    m.validate();
    return m;
}

std::string scenarios_to_csv(const ScenarioSet& s)
{
    std::vector<std::string> header;
    for (const auto& t : s.tickers) {
        header.push_back(t + "_ret");
        header.push_back(t + "_volshift");
    }
    for (const auto& c : s.currencies)
        header.push_back(c + "_rateshift");
    std::string out = join_csv(header);
    std::vector<std::string> cells;
    for (std::size_t i = 0; i < s.count; ++i) {
        cells.clear();
        for (std::size_t l = 0; l < s.tickers.size(); ++l) {
            cells.push_back(text::format_double(s.spot_return(i, l)));
            cells.push_back(text::format_double(s.vol_shift(i, l)));
        }
        for (std::size_t c = 0; c < s.currencies.size(); ++c)
            cells.push_back(text::format_double(s.rate_shift(i, c)));
        out += join_csv(cells);
    }
    return out;
}

ScenarioSet scenarios_from_csv(const std::string& text)
{
    const auto t = read_csv(text, "scenarios.csv");
    ScenarioSet s;
    std::map<std::string, std::size_t> col;
    for (std::size_t k = 0; k < t.header.size(); ++k) {
        const auto& h = t.header[k];
        if (!col.emplace(h, k).second)
            throw SchemaError("scenarios.csv: duplicate column '" + h + "'");
        std::string name;
        if (ends_with(h, "_ret"))
            name = h.substr(0, h.size() - 4);
        else if (ends_with(h, "_volshift"))
            name = h.substr(0, h.size() - 9);
        else if (ends_with(h, "_rateshift")) {
            s.currencies.push_back(h.substr(0, h.size() - 10));
            continue;
        } else {
            throw SchemaError("scenarios.csv: unrecognized column '" + h + "'");
        }
        if (std::find(s.tickers.begin(), s.tickers.end(), name) == s.tickers.end())
            s.tickers.push_back(name);
    }
    for (const auto& ticker : s.tickers)
        for (const char* suffix : {"_ret", "_volshift"})
            if (!col.count(ticker + suffix))
                throw SchemaError("scenarios.csv: missing column '" + ticker + suffix + "'");
    if (t.rows.empty())
        throw SchemaError("scenarios.csv: no scenario rows");

    s.count = t.rows.size();
    s.spot_returns.resize(s.count * s.tickers.size());
    s.vol_shifts.resize(s.count * s.tickers.size());
    s.rate_shifts.resize(s.count * s.currencies.size());
    for (std::size_t i = 0; i < s.count; ++i) {
        const auto& row = t.rows[i];
        const std::size_t line = t.line_numbers[i];
        for (std::size_t l = 0; l < s.tickers.size(); ++l) {
            const auto ret = s.tickers[l] + "_ret";
            const auto vs = s.tickers[l] + "_volshift";
            s.spot_returns[i * s.tickers.size() + l] =
                text::parse_double(row[col[ret]], where_line("scenarios.csv", line, ret));
            s.vol_shifts[i * s.tickers.size() + l] =
                text::parse_double(row[col[vs]], where_line("scenarios.csv", line, vs));
        }
        for (std::size_t c = 0; c < s.currencies.size(); ++c) {
            const auto rs = s.currencies[c] + "_rateshift";
            s.rate_shifts[i * s.currencies.size() + c] =
                text::parse_double(row[col[rs]], where_line("scenarios.csv", line, rs));
        }
    }
    return s;
}

std::string problem_config_to_json(const ProblemConfig& cfg)
{
    json j;
    j["beta"] = cfg.beta;
    j["decay"] = cfg.decay;
    j["tau_delta"] = cfg.tau_delta;
    j["tau_vega"] = cfg.tau_vega;
    j["tau_gamma"] = cfg.tau_gamma;
    j["penalty_delta"] = cfg.penalty_delta;
    j["penalty_vega"] = cfg.penalty_vega;
    j["penalty_gamma"] = cfg.penalty_gamma;
    j["daycount"] = cfg.daycount;
    j["epsilon"] = cfg.epsilon;
    j["riskfree_currency"] = cfg.riskfree_currency;
    j["grid_points"] = cfg.grid_points;
    return dump(j);
}

ProblemConfig problem_config_from_json(const std::string& text)
{
    const json j = parse_json(text, "problem.json");
    if (!j.is_object())
        throw ConfigError("problem.json: expected an object");
    const std::string w = "problem.json";
    ProblemConfig cfg;
    optional_number(j, "beta", w, cfg.beta);
    optional_number(j, "decay", w, cfg.decay);
    if (j.contains("tau_g"))
        cfg.set_tau(number(j, "tau_g", w));
    optional_number(j, "tau_delta", w, cfg.tau_delta);
    optional_number(j, "tau_vega", w, cfg.tau_vega);
    optional_number(j, "tau_gamma", w, cfg.tau_gamma);
    if (j.contains("penalty")) {
        const double p = number(j, "penalty", w);
        cfg.penalty_delta = cfg.penalty_vega = cfg.penalty_gamma = p;
    }
    optional_number(j, "penalty_delta", w, cfg.penalty_delta);
    optional_number(j, "penalty_vega", w, cfg.penalty_vega);
    optional_number(j, "penalty_gamma", w, cfg.penalty_gamma);
    optional_number(j, "daycount", w, cfg.daycount);
    optional_number(j, "epsilon", w, cfg.epsilon);
    if (j.contains("riskfree_currency"))
        cfg.riskfree_currency = string_field(j, "riskfree_currency", w);
    optional_number(j, "grid_points", w, cfg.grid_points);
    cfg.validate();
    return cfg;
}

std::string rats_config_to_json(const RatsConfig& cfg)
{
    json j;
    j["particles"] = cfg.particles;
    j["c_pers"] = cfg.c_pers;
    j["c_soc"] = cfg.c_soc;
    j["v_min"] = cfg.v_min;
    j["v_max"] = cfg.v_max;
    j["w_min"] = cfg.w_min;
    j["w_max"] = cfg.w_max;
    j["tau_f"] = cfg.tau_f;
    j["tau_p"] = cfg.tau_p;
    j["k_max"] = cfg.k_max;
    j["k_max_stall"] = cfg.k_max_stall;
    j["seed"] = cfg.seed;
    j["random_mode"] = to_string(cfg.random_mode);
    j["concentration_mode"] = to_string(cfg.concentration_mode);
    j["inject_zero"] = cfg.inject_zero;
    return dump(j);
}

RatsConfig rats_config_from_json(const std::string& text)
{
    const json j = parse_json(text, "rats.json");
    if (!j.is_object())
        throw ConfigError("rats.json: expected an object");
    const std::string w = "rats.json";
    RatsConfig cfg;
    auto count = [&](const char* key, std::size_t& out) {
        if (j.contains(key)) {
            const auto v = integer(j, key, w);
            if (v < 0)
                throw ConfigError(w + ": '" + key + "' must be non-negative");
            out = static_cast<std::size_t>(v);
        }
    };
    count("particles", cfg.particles);
    optional_number(j, "c_pers", w, cfg.c_pers);
    optional_number(j, "c_soc", w, cfg.c_soc);
    optional_number(j, "v_min", w, cfg.v_min);
    optional_number(j, "v_max", w, cfg.v_max);
    optional_number(j, "w_min", w, cfg.w_min);
    optional_number(j, "w_max", w, cfg.w_max);
    optional_number(j, "tau_f", w, cfg.tau_f);
    optional_number(j, "tau_p", w, cfg.tau_p);
    count("k_max", cfg.k_max);
    count("k_max_stall", cfg.k_max_stall);
    if (j.contains("seed")) {
        const auto& v = j["seed"];
        if (!v.is_number_integer())
            throw ConfigError(w + ": 'seed' must be an integer");
        cfg.seed = v.get<std::uint64_t>();
    }
    if (j.contains("random_mode"))
        cfg.random_mode = random_mode_from_string(string_field(j, "random_mode", w));
    if (j.contains("concentration_mode"))
        cfg.concentration_mode = concentration_mode_from_string(string_field(j, "concentration_mode", w));
    if (j.contains("inject_zero")) {
        if (!j["inject_zero"].is_boolean())
            throw ConfigError(w + ": 'inject_zero' must be a boolean");
        cfg.inject_zero = j["inject_zero"].get<bool>();
    }
    cfg.validate();
    return cfg;
}

std::string features_to_csv(const FeatureTable& table)
{
    std::vector<std::string> header = {"instrument_id", "value", "delta", "vega", "gamma", "unit_cost"};
    for (std::size_t i = 0; i < table.scenario_count(); ++i)
        header.push_back("pnl_" + std::to_string(i + 1));
    std::string out = join_csv(header);
    std::vector<std::string> cells;
    for (const auto& id : table.ids()) {
        const auto& f = table.at(id);
        cells = {id,
                 text::format_double(f.value),
                 text::format_double(f.delta),
                 text::format_double(f.vega),
                 text::format_double(f.gamma),
                 text::format_double(f.unit_cost)};
        for (double p : f.pnl)
            cells.push_back(text::format_double(p));
        out += join_csv(cells);
    }
    return out;
}

std::string trajectory_to_csv(const std::vector<TrajectoryPoint>& t)
{
    std::string out = "iteration,best_fitness,concentration,stall,wall_s\n";
    for (const auto& p : t)
        out += join_csv({std::to_string(p.iteration), text::format_double(p.best_fitness),
                         text::format_double(p.concentration), std::to_string(p.stall),
                         text::format_fixed(p.wall_s, 6)});
    return out;
}

std::string pnl_hist_to_csv(const std::vector<double>& initial, const std::vector<double>& total)
{
    if (initial.size() != total.size())
        throw Error("pnl_hist: vector lengths differ");
    std::string out = "scenario,initial_pnl,total_pnl\n";
    for (std::size_t i = 0; i < initial.size(); ++i)
        out += join_csv({std::to_string(i + 1), text::format_double(initial[i]), text::format_double(total[i])});
    return out;
}

namespace {

std::string strategy_string(const ProblemInstance& problem, const std::vector<std::int64_t>& x)
{
    std::string out;
    for (const auto& leg : problem.decoded_portfolio(x).legs) {
        if (!out.empty())
            out += ';';
        out += leg.instrument_id + "=" + std::to_string(leg.notional);
    }
    return out;
}

std::string position_string(const std::vector<std::int64_t>& x)
{
    std::string out;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i)
            out += ' ';
        out += std::to_string(x[i]);
    }
    return out;
}

}  // namespace

std::string oracle_to_csv(const OracleResult& r, const ProblemInstance& problem)
{
    std::string out = "status,optimal_fitness,optimal_count,enumerated,rank,fitness,position,strategy\n";
    const std::string status = r.status == OracleStatus::Optimal ? "optimal" : "no_feasible";
    const std::string head = status + "," + text::format_double(r.optimal_fitness) + "," +
                             std::to_string(r.optimal_count) + "," + std::to_string(r.enumerated) + ",";
    if (r.status == OracleStatus::Optimal) {
        for (std::size_t i = 0; i < r.optimal_positions.size(); ++i) {
            const auto& x = r.optimal_positions[i];
            out += head + std::to_string(i + 1) + "," + text::format_double(problem.fitness(x)) + "," +
                   position_string(x) + "," + strategy_string(problem, x) + "\n";
        }
    } else {
        const auto& x = r.min_violation_position;
        out += head + "0," + text::format_double(problem.fitness(x)) + "," + position_string(x) + "," +
               strategy_string(problem, x) + "\n";
    }
    return out;
}

namespace {

json evaluation_json(const Evaluation& e)
{
    json j;
    j["fitness"] = number_or_null(e.fitness);
    j["objective"] = e.objective ? json(*e.objective) : json(nullptr);
    j["mean_pnl"] = e.mean_pnl;
    j["var"] = e.var;
    j["cost"] = e.cost;
    j["eos_delta"] = e.eos_delta;
    j["eos_vega"] = e.eos_vega;
    j["eos_gamma"] = e.eos_gamma;
    j["violations"] = {{"delta", number_or_null(e.violations.delta)},
                       {"vega", number_or_null(e.violations.vega)},
                       {"gamma", number_or_null(e.violations.gamma)}};
    j["feasible"] = e.feasible();
    return j;
}

}  // namespace

std::string result_to_json(const ResultReport& r)
{
    json j;
    j["seed"] = r.seed;
    j["pnl_rf"] = r.pnl_rf;
    j["result"] = evaluation_json(r.rats.evaluation);
    j["empty_strategy"] = evaluation_json(r.empty);
    json legs = json::array();
    for (const auto& leg : r.legs)
        legs.push_back({{"instrument_id", leg.instrument_id}, {"notional", leg.notional}});
    j["strategy"] = std::move(legs);
    j["position"] = r.rats.position;
    j["stop_reason"] = to_string(r.rats.stop_reason);
    j["iterations"] = r.rats.iterations;
    j["global_best_updates"] = r.rats.updates;
    j["init_s"] = r.rats.init_s;
    j["total_s"] = r.rats.total_s;
    return dump(j);
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ConfigError("cannot write '" + path.string() + "'");
    out << content;
    if (!out)
        throw ConfigError("write failed for '" + path.string() + "'");
}

ProblemData load_data_dir(const fs::path& dir)
{
    ProblemData d;
    d.specs = universe_from_json(read_file(dir / kUniverseFile));
    d.market = market_from_json(read_file(dir / kMarketFile));
    d.scenarios = scenarios_from_csv(read_file(dir / kScenariosFile));
    d.portfolio = portfolio_from_csv(read_file(dir / kPortfolioFile));
    return d;
}

void save_data_dir(const fs::path& dir, const Dataset& d)
{
    write_file(dir / kUniverseFile, universe_to_json(d.specs));
    write_file(dir / kMarketFile, market_to_json(d.market));
    write_file(dir / kScenariosFile, scenarios_to_csv(d.scenarios));
    write_file(dir / kPortfolioFile, portfolio_to_csv(d.portfolio));
}

}  // namespace ratpo::io
