#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "voxevo/genome.hpp"
#include "voxevo/morphology.hpp"
#include "voxevo/parallel.hpp"
#include "voxevo/physics.hpp"
#include "voxevo/rng.hpp"

namespace voxevo {

// Search knobs the advisor may retune between generations. clamp() enforces
// the legal ranges; every externally sourced value passes through it.
struct HyperParams {
    double mutation_rate = 0.1;    // per-parameter perturbation probability
    double mutation_scale = 0.1;   // stddev of additive gaussian noise
    double crossover_rate = 0.4;   // probability an offspring mixes two parents
    double elite_fraction = 0.3;   // top fraction copied unchanged
    std::array<double, 3> material_multipliers{1.0, 1.0, 1.0};  // muscle, soft, bone stiffness scale

    void clamp() {
        mutation_rate = std::clamp(mutation_rate, 0.001, 1.0);
        mutation_scale = std::clamp(mutation_scale, 0.001, 1.0);
        crossover_rate = std::clamp(crossover_rate, 0.0, 1.0);
        elite_fraction = std::clamp(elite_fraction, 0.05, 0.9);
        for (auto& m : material_multipliers) m = std::clamp(m, 0.1, 10.0);
    }

    bool operator==(const HyperParams&) const = default;
};

struct EvolutionConfig {
    int population = 30;
    int generations = 100;
    int grid_w = 5, grid_h = 5, grid_d = 5;
    std::vector<std::size_t> hidden_widths{64, 64};
    EncodingSpec encoding{};
    int tournament_size = 3;
    int threads = 1;
    std::uint64_t seed = 0;
    HyperParams initial_params{};
    MaterialTable materials{};
    GroundPlane plane{};
    SimConfig sim{};

    void validate() const {
        if (population < 2) throw std::invalid_argument("EvolutionConfig: population must be >= 2");
        if (generations < 0) throw std::invalid_argument("EvolutionConfig: generations must be >= 0");
        if (grid_w < 1 || grid_h < 1 || grid_d < 1)
            throw std::invalid_argument("EvolutionConfig: grid dimensions must be >= 1");
        if (tournament_size < 1)
            throw std::invalid_argument("EvolutionConfig: tournament size must be >= 1");
        encoding.validate();
        sim.validate();
    }
};

struct Individual {
    Genome genome;
    VoxelGrid grid{0, 0, 0};  // raw decode of the genome, cached for diversity
    double fitness = 0.0;
    bool evaluated = false;
};

// Per-generation statistics row; params reflect the values actually used
// (after any advisor adjustment).
struct GenerationReport {
    int generation = 0;
    HyperParams params{};
    double best = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
    double diversity = 0.0;
    int evaluations = 0;      // simulations run this generation (elites are cached)
    double wall_time = 0.0;   // seconds spent in evolve_generation
};

// Mean pairwise fraction of grid cells whose material differs. 0 when all
// grids are identical (or fewer than two), 1 when every pair differs in
// every cell. Compares raw decoded grids, before connectivity filtering.
inline double population_diversity(const std::vector<Individual>& pop) {
    if (pop.size() < 2) return 0.0;
    const std::size_t cells = pop[0].grid.cells.size();
    if (cells == 0) return 0.0;
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a + 1 < pop.size(); ++a) {
        for (std::size_t b = a + 1; b < pop.size(); ++b) {
            std::size_t differ = 0;
            for (std::size_t c = 0; c < cells; ++c)
                if (pop[a].grid.cells[c].material != pop[b].grid.cells[c].material) ++differ;
            sum += static_cast<double>(differ) / static_cast<double>(cells);
            ++pairs;
        }
    }
    return sum / static_cast<double>(pairs);
}

// Locomotion score: horizontal center-of-mass displacement of the largest
// connected component over the simulation window. Robots that cannot move
// (no voxels, no muscles) or that blow up numerically score 0.
inline double evaluate_fitness(const VoxelGrid& raw, const MaterialTable& table,
                               const GroundPlane& plane, const SimConfig& sim) {
    VoxelGrid body = largest_component(raw);
    if (body.count_non_empty() == 0) return 0.0;
    if (!body.has_muscle()) return 0.0;
    MassSpringSystem sys = build_mass_spring(body, table, plane);
    TrajectorySummary traj = simulate(std::move(sys), sim);
    if (traj.diverged) return 0.0;
    return traj.horizontal_displacement;
}

namespace detail {

inline MaterialTable scaled_materials(const MaterialTable& base, const HyperParams& p) {
    MaterialTable t = base;
    t.k_muscle *= p.material_multipliers[0];
    t.k_soft *= p.material_multipliers[1];
    t.k_bone *= p.material_multipliers[2];
    return t;
}

inline int elite_count(double elite_fraction, int population) {
    // ceil with a tolerance so fractions that are exact in intent
    // (0.3 * 30 = 9) never round up from representation error
    const int n = static_cast<int>(std::ceil(elite_fraction * population - 1e-9));
    return std::clamp(n, 1, population);
}

}  // namespace detail

// Uniform crossover: each evolvable parameter comes from parent a or b with
// equal probability. The encoding matrix is not searched, so the child keeps
// parent a's copy wholesale.
inline Genome crossover(const Genome& a, const Genome& b, Rng& rng) {
    if (!a.same_architecture(b)) throw shape_mismatch("crossover: parents differ in architecture");
    Genome child = a;
    auto ct = child.param_tensors();
    auto bt = b.param_tensors();
    for (std::size_t t = 0; t < ct.size(); ++t) {
        std::vector<double>& dst = *ct[t];
        const std::vector<double>& src = *bt[t];
        for (std::size_t i = 0; i < dst.size(); ++i)
            if (rng.uniform01() < 0.5) dst[i] = src[i];
    }
    return child;
}

// Each parameter independently gains N(0, scale^2) noise with probability
// `rate`. Draw order is fixed (tensor order, then flat index) so results are
// reproducible from the generator state alone.
inline void mutate(Genome& g, double rate, double scale, Rng& rng) {
    auto tensors = g.param_tensors();
    for (auto* tensor : tensors)
        for (double& v : *tensor)
            if (rng.uniform01() < rate) v += rng.normal() * scale;
}

// Pick the best of `size` uniform draws (with replacement). `pop` must be
// sorted best-first, so the winner is simply the lowest drawn index.
inline const Individual& tournament_select(const std::vector<Individual>& pop, int size, Rng& rng) {
    std::size_t winner = rng.index(pop.size());
    for (int k = 1; k < size; ++k) winner = std::min(winner, rng.index(pop.size()));
    return pop[winner];
}

// Full evolutionary state: everything needed to pause and resume a run
// bit-exactly lives here (plus the config it was created from).
struct EvolutionState {
    EvolutionConfig config;
    HyperParams params;
    std::vector<Individual> population;
    std::vector<GenerationReport> history;
    int generation = 0;
    double best_fitness = 0.0;
    std::optional<Genome> best_genome;
    Rng rng;

    EvolutionState() : rng(0) {}
};

// Advisor hook: receives the trailing window of reports, may return adjusted
// hyperparameters (clamped by the caller) or nullopt to keep the current ones.
using AdvisorFn =
    std::function<std::optional<HyperParams>(const std::vector<GenerationReport>&, const HyperParams&)>;

inline constexpr int kAdvisorWindow = 3;

inline EvolutionState init_evolution(const EvolutionConfig& cfg) {
    cfg.validate();
    EvolutionState st;
    st.config = cfg;
    st.params = cfg.initial_params;
    st.params.clamp();
    st.rng = Rng(cfg.seed);
    st.population.resize(cfg.population);
    for (auto& ind : st.population) {
        ind.genome = sample_genome(cfg.encoding, cfg.hidden_widths, st.rng.next_u64());
        ind.fitness = 0.0;
        ind.evaluated = false;
    }
    return st;
}

// One generational turn: consult the advisor (once enough history exists),
// evaluate everyone not carrying a cached score, record the report, then
// breed the next population. All stochastic choices happen on the calling
// thread; workers only compute fitness for pre-assigned slots.
inline GenerationReport evolve_generation(EvolutionState& st, const AdvisorFn& advisor = nullptr) {
    const auto t0 = std::chrono::steady_clock::now();
    const EvolutionConfig& cfg = st.config;

    if (advisor && static_cast<int>(st.history.size()) >= kAdvisorWindow) {
        std::vector<GenerationReport> window(st.history.end() - kAdvisorWindow, st.history.end());
        if (auto adjusted = advisor(window, st.params)) {
            st.params = *adjusted;
            st.params.clamp();
        }
    }

    const MaterialTable table = detail::scaled_materials(cfg.materials, st.params);
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < st.population.size(); ++i) {
        Individual& ind = st.population[i];
        if (ind.grid.cells.empty())
            ind.grid = decode(ind.genome, cfg.grid_w, cfg.grid_h, cfg.grid_d);
        if (!ind.evaluated) todo.push_back(i);
    }
    parallel_for(todo.size(), cfg.threads, [&](std::size_t k) {
        Individual& ind = st.population[todo[k]];
        ind.fitness = evaluate_fitness(ind.grid, table, cfg.plane, cfg.sim);
        ind.evaluated = true;
    });

    std::stable_sort(st.population.begin(), st.population.end(),
                     [](const Individual& a, const Individual& b) { return a.fitness > b.fitness; });

    if (!st.best_genome || st.population.front().fitness > st.best_fitness) {
        st.best_fitness = st.population.front().fitness;
        st.best_genome = st.population.front().genome;
    }

    GenerationReport rep;
    rep.generation = st.generation;
    rep.params = st.params;
    rep.best = st.population.front().fitness;
    double sum = 0.0;
    for (const auto& ind : st.population) sum += ind.fitness;
    rep.mean = sum / static_cast<double>(st.population.size());
    double var = 0.0;
    for (const auto& ind : st.population) {
        const double d = ind.fitness - rep.mean;
        var += d * d;
    }
    rep.stddev = std::sqrt(var / static_cast<double>(st.population.size()));
    rep.diversity = population_diversity(st.population);
    rep.evaluations = static_cast<int>(todo.size());

    // next population: elites keep their cached scores (so the best fitness
    // curve is non-decreasing by construction), the rest are bred fresh
    const int n_elite = detail::elite_count(st.params.elite_fraction, cfg.population);
    std::vector<Individual> next;
    next.reserve(st.population.size());
    for (int e = 0; e < n_elite; ++e) next.push_back(st.population[e]);
    while (static_cast<int>(next.size()) < cfg.population) {
        const Individual& pa = tournament_select(st.population, cfg.tournament_size, st.rng);
        Genome child;
        if (st.rng.uniform01() < st.params.crossover_rate) {
            const Individual& pb = tournament_select(st.population, cfg.tournament_size, st.rng);
            child = crossover(pa.genome, pb.genome, st.rng);
        } else {
            child = pa.genome;
        }
        mutate(child, st.params.mutation_rate, st.params.mutation_scale, st.rng);
        Individual ind;
        ind.genome = std::move(child);
        next.push_back(std::move(ind));
    }
    st.population = std::move(next);
    ++st.generation;

    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    st.history.push_back(rep);
    return rep;
}

}  // namespace voxevo
