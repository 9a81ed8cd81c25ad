#pragma once

#include <chrono>
#include <cstdint>
#include <vector>

#include "voxevo/morphology.hpp"
#include "voxevo/parallel.hpp"
#include "voxevo/physics.hpp"

namespace voxevo {

struct BenchConfig {
    int jobs = 16;           // independent robots to simulate
    long long steps = 2000;  // integration steps per robot
    int threads = 1;
    int grid = 4;            // robot is a grid^3 block
    double dt = 1e-5;
};

struct BenchResult {
    int threads = 0;
    int jobs = 0;
    long long steps = 0;
    std::size_t springs_per_robot = 0;
    std::uint64_t spring_updates = 0;     // counted inside the integrator
    std::uint64_t expected_updates = 0;   // jobs * steps * springs_per_robot
    double seconds = 0.0;
    double updates_per_second = 0.0;
    bool diverged = false;
};

// Deterministic mixed-material block so benchmark cost is representative:
// all four solid materials appear, full weight everywhere.
inline VoxelGrid bench_robot(int n) {
    VoxelGrid g(n, n, n);
    static constexpr Material kCycle[] = {Material::MuscleExpand, Material::SoftTissue,
                                          Material::MuscleContract, Material::HardBone};
    for (int z = 0; z < n; ++z)
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x)
                g.at(x, y, z) = Cell{kCycle[(x + 2 * y + 3 * z) % 4], 1.0};
    return g;
}

// Measure parallel simulation throughput: `jobs` identical robots, each
// stepped `steps` times, spread over `threads` workers. Per-job update
// counters come from the integrator itself, so the total is an exact audit
// of work done, not an estimate.
inline BenchResult run_bench(const BenchConfig& cfg) {
    const VoxelGrid grid = bench_robot(cfg.grid);
    const MassSpringSystem proto = build_mass_spring(grid, MaterialTable{});
    SimConfig sim;
    sim.dt = cfg.dt;

    BenchResult r;
    r.threads = cfg.threads;
    r.jobs = cfg.jobs;
    r.steps = cfg.steps;
    r.springs_per_robot = proto.springs.size();
    r.expected_updates = static_cast<std::uint64_t>(cfg.jobs) *
                         static_cast<std::uint64_t>(cfg.steps) * proto.springs.size();

    std::vector<std::uint64_t> updates(static_cast<std::size_t>(cfg.jobs), 0);
    std::vector<char> blew_up(static_cast<std::size_t>(cfg.jobs), 0);
    const auto t0 = std::chrono::steady_clock::now();
    parallel_for(static_cast<std::size_t>(cfg.jobs), cfg.threads, [&](std::size_t i) {
        MassSpringSystem sys = proto;
        SimWorkspace ws(sys);
        for (long long k = 0; k < cfg.steps; ++k) {
            if (step(sys, static_cast<double>(k) * sim.dt, sim, ws) == StepResult::diverged) {
                blew_up[i] = 1;
                break;
            }
        }
        updates[i] = ws.spring_updates;
    });
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    for (int i = 0; i < cfg.jobs; ++i) {
        r.spring_updates += updates[static_cast<std::size_t>(i)];
        if (blew_up[static_cast<std::size_t>(i)]) r.diverged = true;
    }
    r.updates_per_second = r.seconds > 0.0 ? static_cast<double>(r.spring_updates) / r.seconds : 0.0;
    return r;
}

}  // namespace voxevo
