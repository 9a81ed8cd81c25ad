#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "voxevo/evolution.hpp"

namespace voxevo {

struct checkpoint_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kCheckpointMagic = "voxevo";
inline constexpr int kCheckpointVersion = 1;

inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string fnv1a64_hex(std::string_view data) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(data)));
    return buf;
}

// ---- component serializers ------------------------------------------------
// nlohmann::json keeps keys sorted and emits shortest round-trip doubles, so
// serialize(deserialize(x)) is byte-identical; checkpoints rely on this.

inline nlohmann::json to_json(const EncodingSpec& s) {
    return {{"m", s.m}, {"d", s.d}, {"sigma", s.sigma}};
}

inline EncodingSpec encoding_from_json(const nlohmann::json& j) {
    EncodingSpec s;
    s.m = j.at("m").get<std::size_t>();
    s.d = j.at("d").get<std::size_t>();
    s.sigma = j.at("sigma").get<double>();
    return s;
}

inline nlohmann::json to_json(const Layer& l) {
    return {{"in", l.in}, {"out", l.out}, {"w", l.w}, {"b", l.b}};
}

inline Layer layer_from_json(const nlohmann::json& j) {
    Layer l;
    l.in = j.at("in").get<std::size_t>();
    l.out = j.at("out").get<std::size_t>();
    l.w = j.at("w").get<std::vector<double>>();
    l.b = j.at("b").get<std::vector<double>>();
    if (l.w.size() != l.in * l.out || l.b.size() != l.out)
        throw checkpoint_error("layer tensor sizes do not match declared shape");
    return l;
}

inline nlohmann::json to_json(const Genome& g) {
    nlohmann::json hidden = nlohmann::json::array();
    for (const auto& l : g.hidden) hidden.push_back(to_json(l));
    return {{"encoding", to_json(g.spec)},
            {"b_matrix", g.b_matrix},
            {"hidden", hidden},
            {"head_material", to_json(g.head_material)},
            {"head_weight", to_json(g.head_weight)}};
}

inline Genome genome_from_json(const nlohmann::json& j) {
    Genome g;
    g.spec = encoding_from_json(j.at("encoding"));
    g.b_matrix = j.at("b_matrix").get<std::vector<double>>();
    if (g.b_matrix.size() != g.spec.m * g.spec.d)
        throw checkpoint_error("encoding matrix size does not match spec");
    for (const auto& l : j.at("hidden")) g.hidden.push_back(layer_from_json(l));
    g.head_material = layer_from_json(j.at("head_material"));
    g.head_weight = layer_from_json(j.at("head_weight"));
    return g;
}

inline nlohmann::json to_json(const HyperParams& p) {
    return {{"mutation_rate", p.mutation_rate},
            {"mutation_scale", p.mutation_scale},
            {"crossover_rate", p.crossover_rate},
            {"elite_fraction", p.elite_fraction},
            {"material_multipliers", p.material_multipliers}};
}

inline HyperParams hyper_params_from_json(const nlohmann::json& j) {
    HyperParams p;
    p.mutation_rate = j.at("mutation_rate").get<double>();
    p.mutation_scale = j.at("mutation_scale").get<double>();
    p.crossover_rate = j.at("crossover_rate").get<double>();
    p.elite_fraction = j.at("elite_fraction").get<double>();
    p.material_multipliers = j.at("material_multipliers").get<std::array<double, 3>>();
    return p;
}

inline nlohmann::json to_json(const GenerationReport& r) {
    return {{"generation", r.generation}, {"params", to_json(r.params)},
            {"best", r.best},             {"mean", r.mean},
            {"stddev", r.stddev},         {"diversity", r.diversity},
            {"evaluations", r.evaluations}, {"wall_time", r.wall_time}};
}

inline GenerationReport report_from_json(const nlohmann::json& j) {
    GenerationReport r;
    r.generation = j.at("generation").get<int>();
    r.params = hyper_params_from_json(j.at("params"));
    r.best = j.at("best").get<double>();
    r.mean = j.at("mean").get<double>();
    r.stddev = j.at("stddev").get<double>();
    r.diversity = j.at("diversity").get<double>();
    r.evaluations = j.at("evaluations").get<int>();
    r.wall_time = j.at("wall_time").get<double>();
    return r;
}

inline nlohmann::json to_json(const SimConfig& c) {
    return {{"gravity", c.gravity},
            {"dt", c.dt},
            {"duration", c.duration},
            {"actuation_frequency", c.actuation_frequency},
            {"enable_gravity", c.enable_gravity},
            {"enable_contact", c.enable_contact}};
}

inline SimConfig sim_config_from_json(const nlohmann::json& j) {
    SimConfig c;
    c.gravity = j.at("gravity").get<double>();
    c.dt = j.at("dt").get<double>();
    c.duration = j.at("duration").get<double>();
    c.actuation_frequency = j.at("actuation_frequency").get<double>();
    c.enable_gravity = j.at("enable_gravity").get<bool>();
    c.enable_contact = j.at("enable_contact").get<bool>();
    return c;
}

inline nlohmann::json to_json(const MaterialTable& t) {
    return {{"k_muscle", t.k_muscle},
            {"k_soft", t.k_soft},
            {"k_bone", t.k_bone},
            {"damping_ratio", t.damping_ratio},
            {"amp_max", t.amp_max},
            {"phase_max", t.phase_max},
            {"voxel_edge", t.voxel_edge},
            {"mass_per_vertex", t.mass_per_vertex}};
}

inline MaterialTable material_table_from_json(const nlohmann::json& j) {
    MaterialTable t;
    t.k_muscle = j.at("k_muscle").get<double>();
    t.k_soft = j.at("k_soft").get<double>();
    t.k_bone = j.at("k_bone").get<double>();
    t.damping_ratio = j.at("damping_ratio").get<double>();
    t.amp_max = j.at("amp_max").get<double>();
    t.phase_max = j.at("phase_max").get<double>();
    t.voxel_edge = j.at("voxel_edge").get<double>();
    t.mass_per_vertex = j.at("mass_per_vertex").get<double>();
    return t;
}

inline nlohmann::json to_json(const GroundPlane& p) {
    return {{"k", p.k},
            {"damping_ratio", p.damping_ratio},
            {"mu_static", p.mu_static},
            {"mu_kinetic", p.mu_kinetic}};
}

inline GroundPlane ground_plane_from_json(const nlohmann::json& j) {
    GroundPlane p;
    p.k = j.at("k").get<double>();
    p.damping_ratio = j.at("damping_ratio").get<double>();
    p.mu_static = j.at("mu_static").get<double>();
    p.mu_kinetic = j.at("mu_kinetic").get<double>();
    return p;
}

inline nlohmann::json to_json(const EvolutionConfig& c) {
    return {{"population", c.population},
            {"generations", c.generations},
            {"grid", {c.grid_w, c.grid_h, c.grid_d}},
            {"hidden_widths", c.hidden_widths},
            {"encoding", to_json(c.encoding)},
            {"tournament_size", c.tournament_size},
            {"threads", c.threads},
            {"seed", c.seed},
            {"initial_params", to_json(c.initial_params)},
            {"materials", to_json(c.materials)},
            {"plane", to_json(c.plane)},
            {"sim", to_json(c.sim)}};
}

inline EvolutionConfig evolution_config_from_json(const nlohmann::json& j) {
    EvolutionConfig c;
    c.population = j.at("population").get<int>();
    c.generations = j.at("generations").get<int>();
    const auto& grid = j.at("grid");
    c.grid_w = grid.at(0).get<int>();
    c.grid_h = grid.at(1).get<int>();
    c.grid_d = grid.at(2).get<int>();
    c.hidden_widths = j.at("hidden_widths").get<std::vector<std::size_t>>();
    c.encoding = encoding_from_json(j.at("encoding"));
    c.tournament_size = j.at("tournament_size").get<int>();
    c.threads = j.at("threads").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.initial_params = hyper_params_from_json(j.at("initial_params"));
    c.materials = material_table_from_json(j.at("materials"));
    c.plane = ground_plane_from_json(j.at("plane"));
    c.sim = sim_config_from_json(j.at("sim"));
    return c;
}

// Decoded grids are omitted: they are a pure function of the genome and are
// rebuilt on the next generation, which keeps checkpoints an order of
// magnitude smaller.
inline nlohmann::json to_json(const EvolutionState& st) {
    nlohmann::json pop = nlohmann::json::array();
    for (const auto& ind : st.population)
        pop.push_back({{"genome", to_json(ind.genome)},
                       {"fitness", ind.fitness},
                       {"evaluated", ind.evaluated}});
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& r : st.history) hist.push_back(to_json(r));
    nlohmann::json j = {{"config", to_json(st.config)},
                        {"params", to_json(st.params)},
                        {"population", pop},
                        {"history", hist},
                        {"generation", st.generation},
                        {"best_fitness", st.best_fitness},
                        {"rng", st.rng.state()}};
    j["best_genome"] = st.best_genome ? to_json(*st.best_genome) : nlohmann::json(nullptr);
    return j;
}

inline EvolutionState evolution_state_from_json(const nlohmann::json& j) {
    EvolutionState st;
    st.config = evolution_config_from_json(j.at("config"));
    st.params = hyper_params_from_json(j.at("params"));
    for (const auto& p : j.at("population")) {
        Individual ind;
        ind.genome = genome_from_json(p.at("genome"));
        ind.fitness = p.at("fitness").get<double>();
        ind.evaluated = p.at("evaluated").get<bool>();
        st.population.push_back(std::move(ind));
    }
    for (const auto& r : j.at("history")) st.history.push_back(report_from_json(r));
    st.generation = j.at("generation").get<int>();
    st.best_fitness = j.at("best_fitness").get<double>();
    if (!j.at("best_genome").is_null()) st.best_genome = genome_from_json(j.at("best_genome"));
    st.rng.set_state(j.at("rng").get<std::string>());
    return st;
}

// ---- checkpoint container --------------------------------------------------
// { magic, version, kind, checksum, payload } where checksum is the FNV-1a
// hash of the payload's canonical dump. Catches truncation and hand edits.

inline nlohmann::json wrap_payload(const std::string& kind, nlohmann::json payload) {
    nlohmann::json j;
    j["magic"] = kCheckpointMagic;
    j["version"] = kCheckpointVersion;
    j["kind"] = kind;
    j["checksum"] = fnv1a64_hex(payload.dump());
    j["payload"] = std::move(payload);
    return j;
}

inline nlohmann::json unwrap_payload(const nlohmann::json& j, const std::string& expected_kind) {
    if (!j.is_object() || j.value("magic", "") != kCheckpointMagic)
        throw checkpoint_error("not a voxevo checkpoint");
    if (j.value("version", 0) != kCheckpointVersion)
        throw checkpoint_error("unsupported checkpoint version");
    if (j.value("kind", "") != expected_kind)
        throw checkpoint_error("checkpoint kind mismatch: expected " + expected_kind);
    if (!j.contains("payload")) throw checkpoint_error("checkpoint has no payload");
    const nlohmann::json& payload = j.at("payload");
    if (j.value("checksum", "") != fnv1a64_hex(payload.dump()))
        throw checkpoint_error("checkpoint checksum mismatch");
    return payload;
}

inline void save_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw checkpoint_error("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw checkpoint_error("write failed: " + path);
}

inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw checkpoint_error("cannot open: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw checkpoint_error("invalid JSON: " + path);
    return j;
}

inline void save_run(const std::string& path, const EvolutionState& st) {
    save_json_file(path, wrap_payload("run", to_json(st)));
}

inline EvolutionState load_run(const std::string& path) {
    return evolution_state_from_json(unwrap_payload(load_json_file(path), "run"));
}

inline void save_genome(const std::string& path, const Genome& g) {
    save_json_file(path, wrap_payload("genome", to_json(g)));
}

inline Genome load_genome(const std::string& path) {
    return genome_from_json(unwrap_payload(load_json_file(path), "genome"));
}

// ---- fitness curves ---------------------------------------------------------

// One row per generation. Doubles use the same shortest round-trip encoding
// as the JSON layer. The wall_time column is written as 0: measured time
// varies run to run, and the file is specified to be byte-identical for
// identical seeded runs regardless of thread count.
inline std::string curves_csv(const std::vector<GenerationReport>& history) {
    auto num = [](double v) { return nlohmann::json(v).dump(); };
    std::string csv =
        "generation,mutation_rate,mutation_scale,crossover_rate,elite_fraction,"
        "best,mean,std,diversity,evaluations,wall_time\n";
    for (const auto& r : history) {
        csv += std::to_string(r.generation);
        csv += ',' + num(r.params.mutation_rate);
        csv += ',' + num(r.params.mutation_scale);
        csv += ',' + num(r.params.crossover_rate);
        csv += ',' + num(r.params.elite_fraction);
        csv += ',' + num(r.best);
        csv += ',' + num(r.mean);
        csv += ',' + num(r.stddev);
        csv += ',' + num(r.diversity);
        csv += ',' + std::to_string(r.evaluations);
        csv += ",0\n";
    }
    return csv;
}

inline void write_curves_csv(const std::string& path, const std::vector<GenerationReport>& history) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw checkpoint_error("cannot open for writing: " + path);
    out << curves_csv(history);
    if (!out) throw checkpoint_error("write failed: " + path);
}

}  // namespace voxevo
