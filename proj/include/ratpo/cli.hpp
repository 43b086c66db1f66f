#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ratpo::cli {

enum ExitCode : int {
    kOk = 0,
    kDegenerate = 1,
    kConfigError = 2,
    kSweepCellFailed = 3,
    kBudgetExceeded = 4,
};

/// Runs the `ratpo` command line. argv[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Seed of one sweep cell, derived from the master seed and the cell values.
std::uint64_t cell_seed(std::uint64_t master, double c_pers, double c_soc, double tau_g);

/// "name=lo:hi:step" -> inclusive list of values.
std::vector<double> parse_range(const std::string& spec, std::string* name = nullptr);
/// "0.1,0.5,1.0" -> values.
std::vector<double> parse_list(const std::string& spec);

}  // namespace ratpo::cli
