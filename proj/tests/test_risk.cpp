#include "catch_amalgamated.hpp"

#include "oracles.hpp"
#include "ratpo/instrument.hpp"
#include "ratpo/risk.hpp"

#include <algorithm>
#include <random>

using namespace ratpo;

TEST_CASE("VaR index for the reference settings")
{
    CHECK(var_index({0.01, 0.99, 250}).index == 1);
    CHECK(var_index({0.01, 0.999, 250}).index == 3);
    CHECK_FALSE(var_index({0.01, 0.999, 250}).clamped);
    const auto v = var_index({0.01, 0.99, 250});
    CHECK(v.alpha == Catch::Approx(1 - 0.01 * (1 - std::pow(0.99, 250))));
}

TEST_CASE("VaR index matches a direct power search")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 2000; ++i) {
        const double beta = 0.001 + 0.3 * u(rng);
        const double lambda = 0.9 + 0.0999 * u(rng);
        const std::size_t s = 10 + static_cast<std::size_t>(500 * u(rng));
        CHECK(var_index({beta, lambda, s}).index == oracle_ref::var_index_search(beta, lambda, s));
    }
}

TEST_CASE("VaR index clamps and validates")
{
    auto big = var_index({1.0, 0.5, 3});
    CHECK(big.index <= 3);
    CHECK(big.index >= 1);
    CHECK_THROWS_AS(var_index({0.0, 0.99, 250}), ConfigError);
    CHECK_THROWS_AS(var_index({0.01, 1.0, 250}), ConfigError);
    CHECK_THROWS_AS(var_index({0.01, 0.99, 0}), ConfigError);
}

TEST_CASE("beta VaR is the i*-th smallest P&L")
{
    std::vector<double> pnl = {5, -3, 2, -7, 0, 1};
    CHECK(beta_var(pnl, {0.01, 0.99, 6}) == -7);
    std::vector<double> scratch;
    CHECK(beta_var_at(pnl, 3, scratch) == 0);
    CHECK(beta_var_at(pnl, 6, scratch) == 5);
    CHECK_THROWS(beta_var_at(pnl, 7, scratch));
    CHECK_THROWS(beta_var_at(pnl, 0, scratch));
}

TEST_CASE("VaR translation, homogeneity and permutation invariance")
{
    std::mt19937_64 rng(21);
    std::normal_distribution<double> n(0, 1000);
    const VarConfig cfg{0.01, 0.999, 250};
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<double> pnl(250);
        for (auto& x : pnl)
            x = std::round(n(rng));  // integers keep the shifted sums exact
        const double var = beta_var(pnl, cfg);

        const double c = std::round(n(rng));
        auto shifted = pnl;
        for (auto& x : shifted)
            x += c;
        CHECK(beta_var(shifted, cfg) == var + c);

        auto scaled = pnl;
        for (auto& x : scaled)
            x *= 4.0;
        CHECK(beta_var(scaled, cfg) == 4.0 * var);

        auto perm = pnl;
        std::shuffle(perm.begin(), perm.end(), rng);
        CHECK(beta_var(perm, cfg) == var);

        auto sorted = pnl;
        std::sort(sorted.begin(), sorted.end());
        CHECK(var == sorted[2]);
    }
}

TEST_CASE("sample P&L is the mean")
{
    std::vector<double> pnl = {1, 2, 3, 6};
    CHECK(sample_pnl(pnl) == 3.0);
    CHECK_THROWS(sample_pnl(std::vector<double>{}));
}
