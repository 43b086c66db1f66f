#include "ratpo/rats.hpp"

#include "ratpo/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace ratpo {

std::string to_string(RandomMode m)
{
    return m == RandomMode::SharedPerIteration ? "shared" : "per_particle";
}

std::string to_string(ConcentrationMode m)
{
    return m == ConcentrationMode::Position ? "position" : "fitness";
}

std::string to_string(StopReason r)
{
    switch (r) {
    case StopReason::MaxIter:
        return "max_iter";
    case StopReason::Stall:
        return "stall";
    case StopReason::Concentration:
        return "concentration";
    }
    return "unknown";
}

RandomMode random_mode_from_string(const std::string& s)
{
    if (s == "shared")
        return RandomMode::SharedPerIteration;
    if (s == "per_particle")
        return RandomMode::PerParticle;
    throw ConfigError("unknown random_mode '" + s + "' (expected shared or per_particle)");
}

ConcentrationMode concentration_mode_from_string(const std::string& s)
{
    if (s == "position")
        return ConcentrationMode::Position;
    if (s == "fitness")
        return ConcentrationMode::Fitness;
    throw ConfigError("unknown concentration_mode '" + s + "' (expected position or fitness)");
}

void RatsConfig::validate() const
{
    if (particles < 1)
        throw ConfigError("particles must be at least 1");
    if (!(c_pers >= 0) || !(c_soc >= 0) || !std::isfinite(c_pers) || !std::isfinite(c_soc))
        throw ConfigError("c_pers and c_soc must be non-negative");
    if (!(v_min < v_max))
        throw ConfigError("v_min must be below v_max");
    if (!(w_min <= w_max) || !std::isfinite(w_min) || !std::isfinite(w_max))
        throw ConfigError("w_min must not exceed w_max");
    if (!(tau_f > 0))
        throw ConfigError("tau_f must be positive");
    if (!(tau_p > 0 && tau_p <= 1))
        throw ConfigError("tau_p must lie in (0, 1]");
    if (k_max_stall < 1)
        throw ConfigError("k_max_stall must be positive");
}

std::int64_t move_entry(double target, std::int64_t lo, std::int64_t hi)
{
    const double next = std::round(target);
    // NaN and out-of-range values saturate before the integer conversion.
    if (!(next >= static_cast<double>(lo)))
        return lo;
    if (next > static_cast<double>(hi))
        return hi;
    return static_cast<std::int64_t>(next);
}

double concentration_of(const std::vector<Particle>& particles, const std::vector<std::int64_t>& z, double fz,
                        ConcentrationMode mode)
{
    if (particles.empty())
        return 0.0;
    std::size_t hits = 0;
    for (const auto& part : particles)
        if (mode == ConcentrationMode::Position ? part.y == z : part.fy == fz)
            ++hits;
    return static_cast<double>(hits) / static_cast<double>(particles.size());
}

RatsEngine::RatsEngine(RatsConfig cfg, std::vector<std::pair<std::int64_t, std::int64_t>> bounds, FitnessFn fitness,
                       WorkerPool* pool, std::vector<std::int64_t> zero_position)
    : cfg_(cfg), bounds_(std::move(bounds)), fitness_(std::move(fitness)), pool_(pool), zero_(std::move(zero_position)),
      rng_(cfg.seed)
{
    cfg_.validate();
    if (bounds_.empty())
        throw ConfigError("empty search space");
    for (const auto& [lo, hi] : bounds_)
        if (lo > hi)
            throw ConfigError("empty range in position bounds");
    if (!zero_.empty() && zero_.size() != bounds_.size())
        throw ConfigError("zero position has the wrong dimension");
}

double RatsEngine::elapsed() const
{
    const auto now = std::chrono::steady_clock::now().time_since_epoch();
    return static_cast<double>(std::chrono::duration_cast<std::chrono::nanoseconds>(now).count() - start_ns_) * 1e-9;
}

void RatsEngine::evaluate_all()
{
    auto work = [this](std::size_t b, std::size_t e) {
        for (std::size_t p = b; p < e; ++p)
            fx_[p] = fitness_(particles_[p].x);
    };
    if (pool_)
        pool_->parallel_for(particles_.size(), work);
    else
        work(0, particles_.size());
}

void RatsEngine::record()
{
    state_.trajectory.push_back({state_.k, state_.fz, state_.chi, state_.stall, elapsed()});
}

void RatsEngine::init()
{
    start_ns_ = std::chrono::duration_cast<std::chrono::nanoseconds>(
                    std::chrono::steady_clock::now().time_since_epoch())
                    .count();
    const std::size_t dim = bounds_.size();
    particles_.assign(cfg_.particles, Particle{});
    fx_.assign(cfg_.particles, 0.0);
    std::uniform_real_distribution<double> vel(cfg_.v_min, cfg_.v_max);
    for (std::size_t p = 0; p < particles_.size(); ++p) {
        auto& part = particles_[p];
        part.x.resize(dim);
        part.v.resize(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            std::uniform_int_distribution<std::int64_t> pos(bounds_[j].first, bounds_[j].second);
            part.x[j] = pos(rng_);
        }
        for (std::size_t j = 0; j < dim; ++j)
            part.v[j] = vel(rng_);
    }
    if (cfg_.inject_zero && !zero_.empty())
        particles_[0].x = zero_;

    evaluate_all();
    std::size_t best = 0;
    for (std::size_t p = 0; p < particles_.size(); ++p) {
        particles_[p].y = particles_[p].x;
        particles_[p].fy = fx_[p];
        if (fx_[p] < fx_[best])
            best = p;
    }
    state_ = RunState{};
    state_.z = particles_[best].y;
    state_.fz = particles_[best].fy;
    state_.w = cfg_.w_max;
    state_.chi = concentration();
    record();
}

void RatsEngine::step()
{
    const std::size_t dim = bounds_.size();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> r1(dim), r2(dim);
    auto draw = [&] {
        for (auto& r : r1)
            r = unit(rng_);
        for (auto& r : r2)
            r = unit(rng_);
    };
    if (cfg_.random_mode == RandomMode::SharedPerIteration)
        draw();

    for (auto& part : particles_) {
        if (cfg_.random_mode == RandomMode::PerParticle)
            draw();
        for (std::size_t j = 0; j < dim; ++j) {
            const double x = static_cast<double>(part.x[j]);
            part.v[j] = state_.w * part.v[j] + cfg_.c_pers * r1[j] * (static_cast<double>(part.y[j]) - x) +
                        cfg_.c_soc * r2[j] * (static_cast<double>(state_.z[j]) - x);
            part.x[j] = move_entry(x + part.v[j], bounds_[j].first, bounds_[j].second);
        }
    }

    evaluate_all();

    std::size_t best = 0;
    for (std::size_t p = 0; p < particles_.size(); ++p) {
        auto& part = particles_[p];
        if (fx_[p] < part.fy) {
            part.y = part.x;
            part.fy = fx_[p];
        }
        if (part.fy < particles_[best].fy)
            best = p;
    }
    if (state_.fz - particles_[best].fy > cfg_.tau_f) {
        state_.z = particles_[best].y;
        state_.fz = particles_[best].fy;
        state_.stall = 0;
        ++state_.updates;
    } else {
        ++state_.stall;
    }
    ++state_.k;
    if (cfg_.k_max > 0)
        state_.w = cfg_.w_max - static_cast<double>(state_.k) / static_cast<double>(cfg_.k_max) *
                                    (cfg_.w_max - cfg_.w_min);
    state_.chi = concentration();
    record();
}

double RatsEngine::concentration() const
{
    return concentration_of(particles_, state_.z, state_.fz, cfg_.concentration_mode);
}

std::optional<StopReason> RatsEngine::should_stop() const
{
    if (state_.k >= cfg_.k_max)
        return StopReason::MaxIter;
    if (state_.stall >= cfg_.k_max_stall)
        return StopReason::Stall;
    if (state_.chi >= cfg_.tau_p)
        return StopReason::Concentration;
    return std::nullopt;
}

StopReason RatsEngine::run()
{
    init();
    while (true) {
        if (auto reason = should_stop())
            return *reason;
        step();
    }
}

RatsResult run_rats(const RatsConfig& cfg, const ProblemInstance& problem, WorkerPool* pool)
{
    const auto& structure = problem.structure();
    std::vector<std::pair<std::int64_t, std::int64_t>> bounds(structure.dimension());
    for (std::size_t j = 0; j < bounds.size(); ++j)
        bounds[j] = structure.bounds(j);

    RatsEngine engine(cfg, std::move(bounds),
                      [&problem](std::span<const std::int64_t> x) { return problem.fitness(x); }, pool,
                      structure.zero_position());
    RatsResult out;
    out.stop_reason = engine.run();
    const auto& st = engine.state();
    out.position = st.z;
    out.fitness = st.fz;
    out.evaluation = problem.evaluate(st.z);
    out.legs = problem.decode(st.z);
    out.iterations = st.k;
    out.updates = st.updates;
    out.trajectory = st.trajectory;
    out.init_s = st.trajectory.front().wall_s;
    out.total_s = st.trajectory.back().wall_s;
    return out;
}

}  // namespace ratpo
