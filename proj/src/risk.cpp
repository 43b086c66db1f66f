#include "ratpo/risk.hpp"

#include "ratpo/instrument.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

namespace ratpo {

void VarConfig::validate() const
{
    if (!(beta > 0.0 && beta <= 1.0))
        throw ConfigError("VaR beta must lie in (0, 1]");
    if (!(decay > 0.0 && decay < 1.0))
        throw ConfigError("VaR decay must lie in (0, 1)");
    if (scenario_count < 1)
        throw ConfigError("VaR needs at least one scenario");
}

double sample_pnl(std::span<const double> pnl)
{
    if (pnl.empty())
        throw Error("sample_pnl: empty P&L vector");
    return std::accumulate(pnl.begin(), pnl.end(), 0.0) / static_cast<double>(pnl.size());
}

VarIndex var_index(const VarConfig& cfg)
{
    cfg.validate();
    VarIndex out;
    const double s = static_cast<double>(cfg.scenario_count);
    out.alpha = 1.0 - cfg.beta * (1.0 - std::pow(cfg.decay, s));
    const double raw = std::ceil(std::log(out.alpha) / std::log(cfg.decay));
    if (raw < 1.0) {
        out.index = 1;
        out.clamped = true;
    } else if (raw > s) {
        out.index = cfg.scenario_count;
        out.clamped = true;
    } else {
        out.index = static_cast<std::size_t>(raw);
    }
    if (out.clamped)
        std::clog << "warning: VaR index " << raw << " clamped to " << out.index << '\n';
    return out;
}

double beta_var_at(std::span<const double> pnl, std::size_t index, std::vector<double>& scratch)
{
    if (index < 1 || index > pnl.size())
        throw Error("beta_var: index outside the P&L vector");
    if (index == 1)
        return *std::min_element(pnl.begin(), pnl.end());
    scratch.assign(pnl.begin(), pnl.end());
    auto nth = scratch.begin() + static_cast<std::ptrdiff_t>(index - 1);
    std::nth_element(scratch.begin(), nth, scratch.end());
    return *nth;
}

double beta_var(std::span<const double> pnl, const VarConfig& cfg)
{
    if (pnl.size() != cfg.scenario_count)
        throw Error("beta_var: P&L length does not match the scenario count");
    std::vector<double> scratch;
    return beta_var_at(pnl, var_index(cfg).index, scratch);
}

}  // namespace ratpo
