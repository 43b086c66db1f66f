#include "catch_amalgamated.hpp"

#include "ratpo/parallel.hpp"
#include "ratpo/rats.hpp"
#include "test_support.hpp"

#include <cmath>
#include <limits>

using namespace ratpo;

namespace {

using Bounds = std::vector<std::pair<std::int64_t, std::int64_t>>;

double sphere(std::span<const std::int64_t> x)
{
    double s = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double d = static_cast<double>(x[j]) - 3.0 * static_cast<double>(j % 3);
        s += d * d;
    }
    return s;
}

Bounds box(std::size_t dim, std::int64_t lo, std::int64_t hi)
{
    return Bounds(dim, {lo, hi});
}

}  // namespace

TEST_CASE("move_entry rounds half away from zero and saturates")
{
    CHECK(move_entry(2.5, -10, 10) == 3);
    CHECK(move_entry(-2.5, -10, 10) == -3);
    CHECK(move_entry(2.49, -10, 10) == 2);
    CHECK(move_entry(-0.4, -10, 10) == 0);
    CHECK(move_entry(1e300, -10, 10) == 10);
    CHECK(move_entry(-1e300, -10, 10) == -10);
    CHECK(move_entry(std::numeric_limits<double>::quiet_NaN(), 2, 7) == 2);
    CHECK(move_entry(7.5, 2, 7) == 7);
}

TEST_CASE("concentration by position and by fitness")
{
    std::vector<Particle> ps(4);
    ps[0].y = {1, 2};
    ps[0].fy = 1.0;
    ps[1].y = {1, 2};
    ps[1].fy = 1.0;
    ps[2].y = {2, 1};
    ps[2].fy = 1.0;
    ps[3].y = {0, 0};
    ps[3].fy = 5.0;
    CHECK(concentration_of(ps, {1, 2}, 1.0, ConcentrationMode::Position) == 0.5);
    CHECK(concentration_of(ps, {1, 2}, 1.0, ConcentrationMode::Fitness) == 0.75);
    CHECK(concentration_of({}, {1, 2}, 1.0, ConcentrationMode::Position) == 0.0);
}

TEST_CASE("config validation")
{
    RatsConfig c;
    CHECK_NOTHROW(c.validate());
    c.particles = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.tau_p = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.v_min = 1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.w_min = 2;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.c_pers = -1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK(random_mode_from_string("per_particle") == RandomMode::PerParticle);
    CHECK(concentration_mode_from_string("fitness") == ConcentrationMode::Fitness);
    CHECK_THROWS_AS(random_mode_from_string("x"), ConfigError);
    CHECK(to_string(StopReason::Stall) == "stall");
    CHECK_THROWS_AS(RatsEngine(RatsConfig{}, Bounds{{3, 2}}, sphere), ConfigError);
    CHECK_THROWS_AS(RatsEngine(RatsConfig{}, Bounds{}, sphere), ConfigError);
}

TEST_CASE("swarm invariants on a toy objective")
{
    RatsConfig c;
    c.particles = 60;
    c.k_max = 80;
    c.seed = 4;
    const auto bounds = box(6, -20, 20);
    RatsEngine eng(c, bounds, sphere);
    eng.init();
    double prev = eng.state().fz;
    while (!eng.should_stop()) {
        eng.step();
        const auto& st = eng.state();
        CHECK(st.fz <= prev);
        prev = st.fz;
        for (const auto& p : eng.particles()) {
            for (std::size_t j = 0; j < bounds.size(); ++j) {
                REQUIRE(p.x[j] >= bounds[j].first);
                REQUIRE(p.x[j] <= bounds[j].second);
            }
            CHECK(p.fy >= st.fz);
            CHECK(sphere(p.y) == p.fy);
        }
        CHECK(sphere(st.z) == st.fz);
    }
    CHECK(eng.state().trajectory.size() == eng.state().k + 1);
}

TEST_CASE("stopping criteria are checked in order")
{
    RatsConfig c;
    c.particles = 1;
    c.k_max = 0;
    RatsEngine a(c, box(2, 0, 5), sphere);
    CHECK(a.run() == StopReason::MaxIter);

    c.k_max = 10;
    RatsEngine b(c, box(2, 0, 5), sphere);
    CHECK(b.run() == StopReason::Concentration);
    CHECK(b.state().k == 0);

    c.particles = 20;
    c.k_max = 1000;
    c.k_max_stall = 7;
    RatsEngine flat(c, box(3, 0, 5), [](std::span<const std::int64_t>) { return 1.0; });
    CHECK(flat.run() == StopReason::Stall);
    CHECK(flat.state().k == 7);
    CHECK(flat.state().updates == 0);
}

TEST_CASE("updates require a gain above tau_f")
{
    RatsConfig c;
    c.particles = 30;
    c.k_max = 50;
    c.tau_f = 1e9;
    c.tau_p = 1.0;
    RatsEngine eng(c, box(4, -30, 30), sphere);
    eng.init();
    const auto z0 = eng.state().z;
    while (!eng.should_stop())
        eng.step();
    CHECK(eng.state().z == z0);
    CHECK(eng.state().updates == 0);
}

TEST_CASE("inertia decays linearly between w_max and w_min")
{
    RatsConfig c;
    c.particles = 5;
    c.k_max = 10;
    c.w_max = 0.9;
    c.w_min = 0.4;
    c.tau_p = 1.0;
    c.k_max_stall = 100;
    RatsEngine eng(c, box(2, -5, 5), sphere);
    eng.init();
    CHECK(eng.state().w == 0.9);
    for (int k = 1; k <= 10; ++k) {
        eng.step();
        CHECK(eng.state().w == Catch::Approx(0.9 - 0.05 * k));
    }
}

TEST_CASE("zero-notional particle is injected")
{
    RatsConfig c;
    c.particles = 10;
    RatsEngine eng(c, box(4, 0, 9), sphere, nullptr, {1, 2, 3, 4});
    eng.init();
    CHECK(eng.particles()[0].x == std::vector<std::int64_t>{1, 2, 3, 4});
    c.inject_zero = false;
    RatsEngine off(c, box(4, 0, 9), sphere, nullptr, {1, 2, 3, 4});
    off.init();
    CHECK(off.particles()[0].x != std::vector<std::int64_t>{1, 2, 3, 4});
}

TEST_CASE("swarm finds the toy optimum")
{
    RatsConfig c;
    c.particles = 200;
    c.w_max = 0.9;
    c.w_min = 0.4;
    c.seed = 2;
    RatsEngine eng(c, box(6, -20, 20), sphere);
    eng.run();
    CHECK(eng.state().fz == 0.0);
}

TEST_CASE("results do not depend on the worker count")
{
    auto problem = testing::reduced_problem(3, 0.5);
    RatsConfig c;
    c.particles = 150;
    c.k_max = 60;
    for (auto mode : {RandomMode::SharedPerIteration, RandomMode::PerParticle}) {
        c.random_mode = mode;
        auto serial = run_rats(c, problem);
        for (std::size_t t : {1, 3, 4}) {
            WorkerPool pool(t);
            auto par = run_rats(c, problem, &pool);
            CHECK(par.position == serial.position);
            CHECK(par.fitness == serial.fitness);
            CHECK(par.iterations == serial.iterations);
            REQUIRE(par.trajectory.size() == serial.trajectory.size());
            for (std::size_t i = 0; i < par.trajectory.size(); ++i) {
                CHECK(par.trajectory[i].best_fitness == serial.trajectory[i].best_fitness);
                CHECK(par.trajectory[i].concentration == serial.trajectory[i].concentration);
            }
        }
    }
}

TEST_CASE("run_rats never returns worse than the empty strategy")
{
    auto problem = testing::reduced_problem(5, 0.1);
    const double empty = problem.fitness(problem.structure().zero_position());
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        RatsConfig c;
        c.particles = 50;
        c.k_max = 30;
        c.seed = seed;
        auto r = run_rats(c, problem);
        CHECK(r.fitness <= empty);
        CHECK(r.evaluation.fitness == r.fitness);
        CHECK(r.legs == problem.decode(r.position));
        CHECK(r.total_s >= r.init_s);
    }
}
