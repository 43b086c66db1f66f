#pragma once

#include "ratpo/datagen.hpp"
#include "ratpo/features.hpp"
#include "ratpo/instrument.hpp"
#include "ratpo/oracle.hpp"
#include "ratpo/problem.hpp"
#include "ratpo/rats.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace ratpo::io {

namespace fs = std::filesystem;

// Text (de)serialization. Every `to_*` output parses back to an equal object
// and re-serializes to the same bytes.
std::string universe_to_json(const std::vector<UnderlyingSpec>& specs);
std::vector<UnderlyingSpec> universe_from_json(const std::string& text);

std::string portfolio_to_csv(const Portfolio& p);
Portfolio portfolio_from_csv(const std::string& text);

std::string market_to_json(const MarketData& m);
MarketData market_from_json(const std::string& text);

std::string scenarios_to_csv(const ScenarioSet& s);
ScenarioSet scenarios_from_csv(const std::string& text);

std::string problem_config_to_json(const ProblemConfig& cfg);
ProblemConfig problem_config_from_json(const std::string& text);

std::string rats_config_to_json(const RatsConfig& cfg);
RatsConfig rats_config_from_json(const std::string& text);

std::string features_to_csv(const FeatureTable& table);
std::string trajectory_to_csv(const std::vector<TrajectoryPoint>& t);
std::string pnl_hist_to_csv(const std::vector<double>& initial, const std::vector<double>& total);
std::string oracle_to_csv(const OracleResult& r, const ProblemInstance& problem);

struct ResultReport {
    std::uint64_t seed = 0;
    RatsResult rats;
    Evaluation empty;  // evaluation of the empty strategy
    double pnl_rf = 0.0;
    std::vector<PortfolioLeg> legs;  // decoded strategy with descriptor ids
};
std::string result_to_json(const ResultReport& r);

std::string read_file(const fs::path& path);
void write_file(const fs::path& path, const std::string& content);

/// File names inside a data directory.
inline constexpr const char* kUniverseFile = "universe.json";
inline constexpr const char* kPortfolioFile = "portfolio.csv";
inline constexpr const char* kMarketFile = "market.json";
inline constexpr const char* kScenariosFile = "scenarios.csv";

ProblemData load_data_dir(const fs::path& dir);
void save_data_dir(const fs::path& dir, const Dataset& d);

}  // namespace ratpo::io
