// voxevo command-line front end: evolve voxel robots, resume interrupted
// runs, benchmark the simulator, and export evolved morphologies.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "voxevo/voxevo.hpp"

namespace {

struct CommonOverrides {
    std::uint64_t seed = 0;
    int generations = 0;
    int population = 0;
    int threads = 0;
    std::string advisor;
    std::string out_dir;

    void add_to(CLI::App& cmd, bool with_population = true) {
        cmd.add_option("--seed", seed, "Master random seed");
        cmd.add_option("--generations", generations, "Generation count (rows beyond generation 0)");
        if (with_population) cmd.add_option("--population", population, "Population size");
        cmd.add_option("--threads", threads, "Worker threads for fitness evaluation");
        cmd.add_option("--advisor", advisor, "Hyperparameter advisor: off, scripted, llm, replay")
            ->check(CLI::IsMember({"off", "scripted", "llm", "replay"}));
        cmd.add_option("--out", out_dir, "Artifact directory");
    }

    void apply(const CLI::App& cmd, voxevo::RunConfig& rc) const {
        if (cmd.count("--seed")) rc.evolution.seed = seed;
        if (cmd.count("--generations")) rc.evolution.generations = generations;
        if (cmd.count("--population")) rc.evolution.population = population;
        if (cmd.count("--threads")) rc.evolution.threads = threads;
        if (cmd.count("--advisor")) rc.advisor = advisor;
        if (cmd.count("--out")) rc.out_dir = out_dir;
    }
};

void print_summary(const voxevo::EvolutionState& st, const voxevo::RunConfig& rc) {
    const voxevo::RunArtifacts paths = voxevo::artifact_paths(rc.out_dir);
    std::cout << "done: " << st.history.size() << " generations, best fitness " << st.best_fitness
              << " m\n";
    std::cout << "  curves:     " << paths.curves << '\n';
    std::cout << "  checkpoint: " << paths.checkpoint << '\n';
    if (st.best_genome) std::cout << "  champion:   " << paths.best_genome << '\n';
}

int cmd_run(const std::string& config_path, const CLI::App& cmd, const CommonOverrides& ov) {
    voxevo::RunConfig rc;
    if (!config_path.empty()) rc = voxevo::load_run_config(config_path);
    ov.apply(cmd, rc);
    rc.evolution.validate();
    const voxevo::EvolutionState st = voxevo::start_run(rc, &std::cout);
    print_summary(st, rc);
    return 0;
}

int cmd_resume(const std::string& checkpoint, const std::string& config_path, const CLI::App& cmd,
               const CommonOverrides& ov) {
    voxevo::RunConfig rc;
    if (!config_path.empty()) rc = voxevo::load_run_config(config_path);
    voxevo::EvolutionState st = voxevo::load_run(checkpoint);
    // run-level settings come from the config/flags; search settings stay
    // with the checkpoint except where explicitly overridden
    if (cmd.count("--generations")) st.config.generations = ov.generations;
    if (cmd.count("--threads")) st.config.threads = ov.threads;
    if (cmd.count("--advisor")) rc.advisor = ov.advisor;
    if (cmd.count("--out")) rc.out_dir = ov.out_dir;
    const voxevo::EvolutionState done = voxevo::run_loop(std::move(st), rc, &std::cout);
    print_summary(done, rc);
    return 0;
}

int cmd_bench(voxevo::BenchConfig cfg, bool compare_single) {
    using voxevo::BenchResult;
    auto show = [](const BenchResult& r) {
        std::printf("threads %2d: %lld steps x %d jobs, %zu springs/robot -> %llu updates in %.3fs (%.3g/s)%s\n",
                    r.threads, r.steps, r.jobs, r.springs_per_robot,
                    static_cast<unsigned long long>(r.spring_updates), r.seconds,
                    r.updates_per_second, r.diverged ? "  [DIVERGED]" : "");
    };
    const BenchResult main_run = voxevo::run_bench(cfg);
    show(main_run);
    if (main_run.spring_updates != main_run.expected_updates) {
        std::fprintf(stderr, "update count mismatch: expected %llu\n",
                     static_cast<unsigned long long>(main_run.expected_updates));
        return 1;
    }
    if (compare_single && cfg.threads > 1) {
        voxevo::BenchConfig single = cfg;
        single.threads = 1;
        const BenchResult base = voxevo::run_bench(single);
        show(base);
        std::printf("speedup: %.2fx\n", base.seconds / main_run.seconds);
    }
    return 0;
}

int cmd_export(const std::string& genome_path, const std::string& mesh_path,
               const std::string& voxels_path, std::vector<int> grid, bool full,
               double voxel_edge) {
    const voxevo::Genome g = voxevo::load_genome(genome_path);
    voxevo::VoxelGrid decoded = voxevo::decode(g, grid[0], grid[1], grid[2]);
    if (!full) decoded = voxevo::largest_component(decoded);
    if (decoded.count_non_empty() == 0) {
        std::fprintf(stderr, "genome decodes to an empty robot at %dx%dx%d\n", grid[0], grid[1],
                     grid[2]);
        return 1;
    }
    if (!mesh_path.empty()) {
        voxevo::export_mesh_obj(mesh_path, decoded, voxel_edge);
        std::cout << "mesh:   " << mesh_path << '\n';
    }
    if (!voxels_path.empty()) {
        voxevo::export_voxel_listing(voxels_path, decoded);
        std::cout << "voxels: " << voxels_path << '\n';
    }
    std::cout << "voxels occupied: " << decoded.count_non_empty() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"voxevo: evolve simulated soft voxel robots"};
    app.require_subcommand(1);

    std::string config_path;
    CommonOverrides run_ov;
    CLI::App* run = app.add_subcommand("run", "Start an evolution run");
    run->add_option("--config", config_path, "Run configuration (JSON)")->check(CLI::ExistingFile);
    run_ov.add_to(*run);

    std::string checkpoint_path, resume_config;
    CommonOverrides resume_ov;
    CLI::App* resume = app.add_subcommand("resume", "Continue from a checkpoint");
    resume->add_option("--checkpoint", checkpoint_path, "Run checkpoint to continue")
        ->required()
        ->check(CLI::ExistingFile);
    resume->add_option("--config", resume_config, "Run configuration for advisor/output settings")
        ->check(CLI::ExistingFile);
    resume_ov.add_to(*resume, /*with_population=*/false);

    voxevo::BenchConfig bench_cfg;
    bool bench_compare = false;
    CLI::App* bench = app.add_subcommand("bench", "Measure simulator throughput");
    bench->add_option("--jobs", bench_cfg.jobs, "Robots to simulate")->check(CLI::PositiveNumber);
    bench->add_option("--steps", bench_cfg.steps, "Steps per robot")->check(CLI::PositiveNumber);
    bench->add_option("--threads", bench_cfg.threads, "Worker threads")->check(CLI::PositiveNumber);
    bench->add_option("--grid", bench_cfg.grid, "Robot edge length in voxels")
        ->check(CLI::PositiveNumber);
    bench->add_option("--dt", bench_cfg.dt, "Integration step (s)");
    bench->add_flag("--compare-single", bench_compare, "Also time a 1-thread baseline");

    std::string genome_path, mesh_path = "robot.obj", voxels_path;
    std::vector<int> export_grid{5, 5, 5};
    bool export_full = false;
    double export_edge = voxevo::MaterialTable{}.voxel_edge;
    CLI::App* exp = app.add_subcommand("export-mesh", "Write a genome's morphology as OBJ");
    exp->add_option("--genome", genome_path, "Genome checkpoint")->required()->check(CLI::ExistingFile);
    exp->add_option("--out", mesh_path, "Output OBJ path");
    exp->add_option("--voxels", voxels_path, "Also write a voxel listing to this path");
    exp->add_option("--grid", export_grid, "Decode resolution: W H D")->expected(3);
    exp->add_flag("--full", export_full, "Export the raw decode, not just the largest component");
    exp->add_option("--edge", export_edge, "Cube edge length in meters");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, *run, run_ov);
        if (resume->parsed()) return cmd_resume(checkpoint_path, resume_config, *resume, resume_ov);
        if (bench->parsed()) return cmd_bench(bench_cfg, bench_compare);
        if (exp->parsed())
            return cmd_export(genome_path, mesh_path, voxels_path, export_grid, export_full,
                              export_edge);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
