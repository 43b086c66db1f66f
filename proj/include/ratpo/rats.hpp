#pragma once

#include "ratpo/problem.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ratpo {

class WorkerPool;

enum class RandomMode { SharedPerIteration, PerParticle };
enum class ConcentrationMode { Position, Fitness };
enum class StopReason { MaxIter, Stall, Concentration };

std::string to_string(RandomMode m);
std::string to_string(ConcentrationMode m);
std::string to_string(StopReason r);
RandomMode random_mode_from_string(const std::string& s);
ConcentrationMode concentration_mode_from_string(const std::string& s);

struct RatsConfig {
    std::size_t particles = 1000;
    double c_pers = 1.0;
    double c_soc = 1.0;
    double v_min = -1.0;
    double v_max = 1.0;
    double w_min = 1.0;
    double w_max = 1.0;
    double tau_f = 1e-4;   // significance threshold for global-best updates
    double tau_p = 0.75;   // concentration threshold
    std::size_t k_max = 500;
    std::size_t k_max_stall = 100;
    std::uint64_t seed = 1;
    RandomMode random_mode = RandomMode::SharedPerIteration;
    ConcentrationMode concentration_mode = ConcentrationMode::Position;
    bool inject_zero = true;  // particle 0 starts at the all-zero-notional position

    void validate() const;
};

struct Particle {
    std::vector<std::int64_t> x;
    std::vector<double> v;
    std::vector<std::int64_t> y;  // personal best
    double fy = 0.0;              // fitness(y)
};

struct TrajectoryPoint {
    std::size_t iteration = 0;
    double best_fitness = 0.0;
    double concentration = 0.0;
    std::size_t stall = 0;
    double wall_s = 0.0;
};

struct RunState {
    std::size_t k = 0;
    std::vector<std::int64_t> z;
    double fz = 0.0;
    std::size_t stall = 0;
    double w = 1.0;
    double chi = 0.0;
    std::size_t updates = 0;  // number of global-best replacements after init
    std::vector<TrajectoryPoint> trajectory;
};

/// New integer coordinate from x + v: rounded half away from zero, then
/// saturated to [lo, hi].
std::int64_t move_entry(double target, std::int64_t lo, std::int64_t hi);

/// Share of particles whose personal best matches the global best, by
/// position vector or by fitness value.
double concentration_of(const std::vector<Particle>& particles, const std::vector<std::int64_t>& z, double fz,
                        ConcentrationMode mode);

/// Fitness of one position. Must be safe to call concurrently.
using FitnessFn = std::function<double(std::span<const std::int64_t>)>;

/// Particle swarm over a box of integer positions.
class RatsEngine {
public:
    RatsEngine(RatsConfig cfg, std::vector<std::pair<std::int64_t, std::int64_t>> bounds, FitnessFn fitness,
               WorkerPool* pool = nullptr, std::vector<std::int64_t> zero_position = {});

    void init();
    void step();
    /// Share of particles whose personal best coincides with the global best.
    double concentration() const;
    /// Stop reason if a criterion is met, checked in the order max-iter, stall, concentration.
    std::optional<StopReason> should_stop() const;
    StopReason run();

    const RatsConfig& config() const { return cfg_; }
    const std::vector<Particle>& particles() const { return particles_; }
    const RunState& state() const { return state_; }
    const std::vector<std::pair<std::int64_t, std::int64_t>>& bounds() const { return bounds_; }

private:
    void evaluate_all();
    void record();
    double elapsed() const;

    RatsConfig cfg_;
    std::vector<std::pair<std::int64_t, std::int64_t>> bounds_;
    FitnessFn fitness_;
    WorkerPool* pool_;
    std::vector<std::int64_t> zero_;
    std::mt19937_64 rng_;
    std::vector<Particle> particles_;
    std::vector<double> fx_;  // fitness of the current positions
    RunState state_;
    std::int64_t start_ns_ = 0;
};

struct RatsResult {
    std::vector<std::int64_t> position;
    double fitness = 0.0;
    Evaluation evaluation;
    std::vector<EosLeg> legs;
    StopReason stop_reason = StopReason::MaxIter;
    std::size_t iterations = 0;
    std::size_t updates = 0;
    std::vector<TrajectoryPoint> trajectory;
    double init_s = 0.0;
    double total_s = 0.0;
};

RatsResult run_rats(const RatsConfig& cfg, const ProblemInstance& problem, WorkerPool* pool = nullptr);

}  // namespace ratpo
