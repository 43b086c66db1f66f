#pragma once

#include "ratpo/problem.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace ratpo {

class WorkerPool;

/// Raised when the search space is larger than the enumeration budget.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

enum class OracleStatus { Optimal, NoFeasible };

struct OracleOptions {
    double tau_eq = 1e-12;          // optimal-set membership tolerance
    std::uint64_t budget = 10'000'000;
    std::size_t max_positions = 100;  // optimal positions kept in the result
    bool reverse = false;             // enumerate from the last candidate down
    std::function<void(std::uint64_t done, std::uint64_t total)> progress;
};

struct OracleResult {
    OracleStatus status = OracleStatus::Optimal;
    double optimal_fitness = 0.0;  // best feasible fitness (Optimal status)
    /// Feasible positions within tau_eq of the optimum, in enumeration order,
    /// truncated to max_positions; optimal_count is the untruncated count.
    std::vector<std::vector<std::int64_t>> optimal_positions;
    std::uint64_t optimal_count = 0;
    /// Lowest penalized fitness over the whole space, feasible or not.
    double penalized_minimum = 0.0;
    std::vector<std::int64_t> penalized_position;
    /// Position with the smallest total violation (reported for NoFeasible).
    std::vector<std::int64_t> min_violation_position;
    double min_violation = 0.0;
    std::uint64_t enumerated = 0;
    double wall_s = 0.0;
};

/// Position number `index` in the mixed-radix product order (first entry
/// varies slowest).
std::vector<std::int64_t> position_at(const EosStructure& structure, std::uint64_t index);

/// Evaluates every position of the problem's structure.
OracleResult enumerate(const ProblemInstance& problem, const OracleOptions& options = {},
                       WorkerPool* pool = nullptr);

}  // namespace ratpo
