#include "ratpo/oracle.hpp"

#include "ratpo/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

namespace ratpo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Near-optimal entries buffered per block before falling back to a recount pass.
constexpr std::size_t kBlockNearCap = std::size_t{1} << 20;

struct Radix {
    std::vector<std::int64_t> lo;
    std::vector<std::uint64_t> size;
};

Radix radix_of(const EosStructure& s)
{
    Radix r;
    for (std::size_t j = 0; j < s.dimension(); ++j) {
        const auto [lo, hi] = s.bounds(j);
        r.lo.push_back(lo);
        r.size.push_back(static_cast<std::uint64_t>(hi - lo + 1));
    }
    return r;
}

void fill_position(const Radix& r, std::uint64_t index, std::vector<std::int64_t>& x)
{
    x.resize(r.lo.size());
    for (std::size_t j = r.lo.size(); j-- > 0;) {
        x[j] = r.lo[j] + static_cast<std::int64_t>(index % r.size[j]);
        index /= r.size[j];
    }
}

struct Block {
    double best = kInf;  // best feasible fitness in the block
    std::uint64_t best_index = 0;
    std::vector<std::pair<std::uint64_t, double>> near;  // feasible, within tau of best
    bool overflow = false;
    double pen = kInf;
    std::uint64_t pen_index = 0;
    bool pen_set = false;
    double viol = kInf;
    std::uint64_t viol_index = 0;
    bool viol_set = false;
    std::uint64_t recount = 0;
};

// Candidate number `k` in enumeration order.
std::uint64_t candidate(std::uint64_t k, std::uint64_t total, bool reverse)
{
    return reverse ? total - 1 - k : k;
}

}  // namespace

std::vector<std::int64_t> position_at(const EosStructure& structure, std::uint64_t index)
{
    std::vector<std::int64_t> x;
    fill_position(radix_of(structure), index, x);
    return x;
}

OracleResult enumerate(const ProblemInstance& problem, const OracleOptions& options, WorkerPool* pool)
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto& structure = problem.structure();
    const BigInt space = search_space_size(structure);
    if (space > BigInt(options.budget))
        throw BudgetExceeded("search space of " + space.str() + " candidates exceeds the budget of " +
                             std::to_string(options.budget));
    const auto total = space.convert_to<std::uint64_t>();
    const Radix radix = radix_of(structure);
    const double tau = options.tau_eq;

    const std::uint64_t block_size = std::max<std::uint64_t>(1, std::min<std::uint64_t>(1 << 14, total));
    const std::uint64_t blocks = (total + block_size - 1) / block_size;
    std::vector<Block> results(blocks);

    auto scan = [&](std::uint64_t b) {
        Block& blk = results[b];
        std::vector<std::int64_t> x;
        const std::uint64_t begin = b * block_size;
        const std::uint64_t end = std::min(total, begin + block_size);
        for (std::uint64_t k = begin; k < end; ++k) {
            const std::uint64_t idx = candidate(k, total, options.reverse);
            fill_position(radix, idx, x);
            const Evaluation e = problem.evaluate(x);
            if (!blk.pen_set || e.fitness < blk.pen) {
                blk.pen = e.fitness;
                blk.pen_index = idx;
                blk.pen_set = true;
            }
            const double v = e.violations.total();
            if (!blk.viol_set || v < blk.viol) {
                blk.viol = v;
                blk.viol_index = idx;
                blk.viol_set = true;
            }
            if (!e.feasible() || !e.objective)
                continue;
            const double f = e.fitness;
            if (f < blk.best) {
                blk.best = f;
                blk.best_index = idx;
                std::erase_if(blk.near, [&](const auto& p) { return p.second > f + tau; });
            }
            if (f <= blk.best + tau) {
                if (blk.near.size() < kBlockNearCap)
                    blk.near.emplace_back(idx, f);
                else
                    blk.overflow = true;
            }
        }
    };

    const std::size_t threads = pool ? pool->size() : 1;
    const std::uint64_t round = std::max<std::uint64_t>(1, threads * 4);
    for (std::uint64_t first = 0; first < blocks; first += round) {
        const std::uint64_t count = std::min(round, blocks - first);
        auto work = [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i)
                scan(first + i);
        };
        if (pool)
            pool->parallel_for(count, work);
        else
            work(0, count);
        if (options.progress)
            options.progress(std::min(total, (first + count) * block_size), total);
    }

    // Deterministic merge in block order; ties keep the earlier candidate.
    OracleResult out;
    out.enumerated = total;
    double best = kInf;
    bool overflow = false;
    const Block* pen_blk = nullptr;
    const Block* viol_blk = nullptr;
    for (const auto& blk : results) {
        if (blk.best < best)
            best = blk.best;
        overflow = overflow || blk.overflow;
        if (blk.pen_set && (!pen_blk || blk.pen < pen_blk->pen))
            pen_blk = &blk;
        if (blk.viol_set && (!viol_blk || blk.viol < viol_blk->viol))
            viol_blk = &blk;
    }
    out.penalized_minimum = pen_blk->pen;
    out.penalized_position = position_at(structure, pen_blk->pen_index);
    out.min_violation = viol_blk->viol;
    out.min_violation_position = position_at(structure, viol_blk->viol_index);

    if (best == kInf) {
        out.status = OracleStatus::NoFeasible;
        out.optimal_fitness = kInf;
    } else {
        out.status = OracleStatus::Optimal;
        out.optimal_fitness = best;
        for (const auto& blk : results) {
            for (const auto& [idx, f] : blk.near) {
                if (f > best + tau)
                    continue;
                if (out.optimal_positions.size() < options.max_positions)
                    out.optimal_positions.push_back(position_at(structure, idx));
                if (!overflow)
                    ++out.optimal_count;
            }
        }
        if (overflow) {
            // Too many near-ties to buffer: count them in a second pass.
            auto recount = [&](std::size_t b, std::size_t e) {
                std::vector<std::int64_t> x;
                for (std::size_t blk = b; blk < e; ++blk) {
                    const std::uint64_t begin = blk * block_size;
                    const std::uint64_t end = std::min(total, begin + block_size);
                    std::uint64_t n = 0;
                    for (std::uint64_t k = begin; k < end; ++k) {
                        fill_position(radix, candidate(k, total, options.reverse), x);
                        const Evaluation e = problem.evaluate(x);
                        if (e.feasible() && e.objective && e.fitness <= best + tau)
                            ++n;
                    }
                    results[blk].recount = n;
                }
            };
            if (pool)
                pool->parallel_for(blocks, recount);
            else
                recount(0, blocks);
            for (const auto& blk : results)
                out.optimal_count += blk.recount;
        }
    }
    out.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace ratpo
