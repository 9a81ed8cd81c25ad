#pragma once

#include <cstdio>
#include <filesystem>
#include <memory>
#include <ostream>
#include <string>

#include "voxevo/advisor.hpp"
#include "voxevo/advisor_http.hpp"
#include "voxevo/config.hpp"
#include "voxevo/evolution.hpp"
#include "voxevo/serialize.hpp"

namespace voxevo {

struct RunArtifacts {
    std::string dir;
    std::string curves;       // per-generation statistics, CSV
    std::string checkpoint;   // full resumable state
    std::string best_genome;  // champion network
    std::string config_echo;  // the effective configuration
};

inline RunArtifacts artifact_paths(const std::string& out_dir) {
    return {out_dir, out_dir + "/curves.csv", out_dir + "/checkpoint.json",
            out_dir + "/best_genome.json", out_dir + "/config.json"};
}

// Number of advisor consultations a run with `history_len` recorded
// generations has already made (one per generation once a full window
// exists). Used to renumber audit entries and fast-forward replays.
inline int advisor_consults_done(std::size_t history_len) {
    const int g = static_cast<int>(history_len);
    return g > kAdvisorWindow ? g - kAdvisorWindow : 0;
}

inline std::unique_ptr<Advisor> make_advisor(const RunConfig& rc, int consults_done) {
    if (rc.advisor == "scripted") return std::make_unique<ScriptedAdvisor>();
    if (rc.advisor == "llm") {
        auto a = std::make_unique<LlmAdvisor>(rc.llm);
        a->set_query_index(consults_done);
        return a;
    }
    if (rc.advisor == "replay")
        return std::make_unique<ReplayAdvisor>(rc.replay_audit, rc.llm.allow_material_multipliers,
                                               static_cast<std::size_t>(consults_done));
    return nullptr;  // "off"
}

inline void log_report(std::ostream& os, const GenerationReport& r) {
    char line[224];
    std::snprintf(line, sizeof(line),
                  "gen %4d  best %.6f  mean %.6f  std %.6f  div %.3f  evals %3d  "
                  "mr %.4g ms %.4g cx %.4g ef %.4g  [%.2fs]",
                  r.generation, r.best, r.mean, r.stddev, r.diversity, r.evaluations,
                  r.params.mutation_rate, r.params.mutation_scale, r.params.crossover_rate,
                  r.params.elite_fraction, r.wall_time);
    os << line << '\n';
}

// Drive an evolution state to completion: one evolve_generation per
// generation index 0..generations inclusive, periodic checkpoints, then the
// final artifact set. Fresh starts and resumes both funnel through here;
// the state itself decides how much work is left.
inline EvolutionState run_loop(EvolutionState st, const RunConfig& rc, std::ostream* log = nullptr) {
    std::filesystem::create_directories(rc.out_dir);
    const RunArtifacts paths = artifact_paths(rc.out_dir);
    save_json_file(paths.config_echo, to_json(rc));

    auto advisor = make_advisor(rc, advisor_consults_done(st.history.size()));
    const AdvisorFn advisor_fn = make_advisor_fn(advisor.get());

    while (st.generation <= st.config.generations) {
        const GenerationReport rep = evolve_generation(st, advisor_fn);
        if (log) log_report(*log, rep);
        if (rc.checkpoint_stride > 0 && rep.generation % rc.checkpoint_stride == 0)
            save_run(paths.checkpoint, st);
    }

    save_run(paths.checkpoint, st);
    write_curves_csv(paths.curves, st.history);
    if (st.best_genome) save_genome(paths.best_genome, *st.best_genome);
    return st;
}

inline EvolutionState start_run(const RunConfig& rc, std::ostream* log = nullptr) {
    return run_loop(init_evolution(rc.evolution), rc, log);
}

inline EvolutionState resume_run(const std::string& checkpoint_path, const RunConfig& rc,
                                 std::ostream* log = nullptr) {
    return run_loop(load_run(checkpoint_path), rc, log);
}

}  // namespace voxevo
