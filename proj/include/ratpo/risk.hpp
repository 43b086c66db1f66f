#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ratpo {

/// Decay-weighted historical VaR settings.
struct VarConfig {
    double beta = 0.01;
    double decay = 0.99;  // λ
    std::size_t scenario_count = 250;

    void validate() const;
};

/// Arithmetic mean of the scenario P&L vector.
double sample_pnl(std::span<const double> pnl);

struct VarIndex {
    double alpha = 0.0;       // 1 - β (1 - λ^s)
    std::size_t index = 1;    // i*, 1-based, clamped to [1, s]
    bool clamped = false;
};

/// i* = ceil(ln α / ln λ). Clamping to [1, s] is reported and logged.
VarIndex var_index(const VarConfig& cfg);

/// i*-th smallest entry of the P&L vector (1-based). Losses are negative; no
/// sign flip is applied.
double beta_var(std::span<const double> pnl, const VarConfig& cfg);

/// Same as beta_var with a precomputed index; `scratch` is overwritten.
double beta_var_at(std::span<const double> pnl, std::size_t index, std::vector<double>& scratch);

}  // namespace ratpo
