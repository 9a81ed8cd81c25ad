#pragma once

#include <string>

#include <json.hpp>

#include "voxevo/advisor_http.hpp"
#include "voxevo/evolution.hpp"
#include "voxevo/serialize.hpp"

namespace voxevo {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Everything a run needs beyond the search itself: which advisor to attach
// and where artifacts go. advisor is one of off | scripted | llm | replay.
struct RunConfig {
    EvolutionConfig evolution{};
    std::string advisor = "off";
    LlmAdvisorConfig llm{};
    std::string replay_audit;       // audit log consumed when advisor == replay
    std::string out_dir = "runs/latest";
    int checkpoint_stride = 1;      // checkpoint every N generations; 0 = final only
};

// Lenient, defaulting parser for hand-written config files: every key is
// optional and unknown keys are ignored. (Checkpoints, being machine
// written, are parsed strictly elsewhere.)
inline RunConfig run_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw config_error("run config must be a JSON object");
    RunConfig rc;
    EvolutionConfig& e = rc.evolution;
    e.population = j.value("population", e.population);
    e.generations = j.value("generations", e.generations);
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        if (!g.is_array() || g.size() != 3) throw config_error("grid must be [w, h, d]");
        e.grid_w = g.at(0).get<int>();
        e.grid_h = g.at(1).get<int>();
        e.grid_d = g.at(2).get<int>();
    }
    e.hidden_widths = j.value("hidden_widths", e.hidden_widths);
    if (j.contains("encoding")) {
        const auto& enc = j.at("encoding");
        e.encoding.m = enc.value("m", e.encoding.m);
        e.encoding.sigma = enc.value("sigma", e.encoding.sigma);
    }
    e.tournament_size = j.value("tournament_size", e.tournament_size);
    e.threads = j.value("threads", e.threads);
    e.seed = j.value("seed", e.seed);
    if (j.contains("params")) {
        const auto& p = j.at("params");
        HyperParams& hp = e.initial_params;
        hp.mutation_rate = p.value("mutation_rate", hp.mutation_rate);
        hp.mutation_scale = p.value("mutation_scale", hp.mutation_scale);
        hp.crossover_rate = p.value("crossover_rate", hp.crossover_rate);
        hp.elite_fraction = p.value("elite_fraction", hp.elite_fraction);
        hp.material_multipliers = p.value("material_multipliers", hp.material_multipliers);
    }
    if (j.contains("materials")) {
        const auto& m = j.at("materials");
        MaterialTable& t = e.materials;
        t.k_muscle = m.value("k_muscle", t.k_muscle);
        t.k_soft = m.value("k_soft", t.k_soft);
        t.k_bone = m.value("k_bone", t.k_bone);
        t.damping_ratio = m.value("damping_ratio", t.damping_ratio);
        t.amp_max = m.value("amp_max", t.amp_max);
        t.phase_max = m.value("phase_max", t.phase_max);
        t.voxel_edge = m.value("voxel_edge", t.voxel_edge);
        t.mass_per_vertex = m.value("mass_per_vertex", t.mass_per_vertex);
    }
    if (j.contains("plane")) {
        const auto& p = j.at("plane");
        GroundPlane& g = e.plane;
        g.k = p.value("k", g.k);
        g.damping_ratio = p.value("damping_ratio", g.damping_ratio);
        g.mu_static = p.value("mu_static", g.mu_static);
        g.mu_kinetic = p.value("mu_kinetic", g.mu_kinetic);
    }
    if (j.contains("sim")) {
        const auto& s = j.at("sim");
        SimConfig& c = e.sim;
        c.gravity = s.value("gravity", c.gravity);
        c.dt = s.value("dt", c.dt);
        c.duration = s.value("duration", c.duration);
        c.actuation_frequency = s.value("actuation_frequency", c.actuation_frequency);
        c.enable_gravity = s.value("enable_gravity", c.enable_gravity);
        c.enable_contact = s.value("enable_contact", c.enable_contact);
    }
    rc.advisor = j.value("advisor", rc.advisor);
    if (rc.advisor != "off" && rc.advisor != "scripted" && rc.advisor != "llm" &&
        rc.advisor != "replay")
        throw config_error("advisor must be off, scripted, llm, or replay");
    if (j.contains("llm")) {
        const auto& l = j.at("llm");
        LlmAdvisorConfig& a = rc.llm;
        a.url = l.value("url", a.url);
        a.path = l.value("path", a.path);
        a.model = l.value("model", a.model);
        a.api_key_env = l.value("api_key_env", a.api_key_env);
        a.temperature = l.value("temperature", a.temperature);
        a.max_retries = l.value("max_retries", a.max_retries);
        a.backoff_base_ms = l.value("backoff_base_ms", a.backoff_base_ms);
        a.connect_timeout_s = l.value("connect_timeout_s", a.connect_timeout_s);
        a.read_timeout_s = l.value("read_timeout_s", a.read_timeout_s);
        a.allow_material_multipliers =
            l.value("allow_material_multipliers", a.allow_material_multipliers);
        a.audit_path = l.value("audit_path", a.audit_path);
    }
    rc.replay_audit = j.value("replay_audit", rc.replay_audit);
    rc.out_dir = j.value("out_dir", rc.out_dir);
    rc.checkpoint_stride = j.value("checkpoint_stride", rc.checkpoint_stride);
    return rc;
}

inline nlohmann::json to_json(const RunConfig& rc) {
    const EvolutionConfig& e = rc.evolution;
    nlohmann::json j = {
        {"population", e.population},
        {"generations", e.generations},
        {"grid", {e.grid_w, e.grid_h, e.grid_d}},
        {"hidden_widths", e.hidden_widths},
        {"encoding", {{"m", e.encoding.m}, {"sigma", e.encoding.sigma}}},
        {"tournament_size", e.tournament_size},
        {"threads", e.threads},
        {"seed", e.seed},
        {"params", to_json(e.initial_params)},
        {"materials", to_json(e.materials)},
        {"plane", to_json(e.plane)},
        {"sim", to_json(e.sim)},
        {"advisor", rc.advisor},
        {"replay_audit", rc.replay_audit},
        {"out_dir", rc.out_dir},
        {"checkpoint_stride", rc.checkpoint_stride}};
    j["llm"] = {{"url", rc.llm.url},
                {"path", rc.llm.path},
                {"model", rc.llm.model},
                {"api_key_env", rc.llm.api_key_env},
                {"temperature", rc.llm.temperature},
                {"max_retries", rc.llm.max_retries},
                {"backoff_base_ms", rc.llm.backoff_base_ms},
                {"connect_timeout_s", rc.llm.connect_timeout_s},
                {"read_timeout_s", rc.llm.read_timeout_s},
                {"allow_material_multipliers", rc.llm.allow_material_multipliers},
                {"audit_path", rc.llm.audit_path}};
    return j;
}

inline RunConfig load_run_config(const std::string& path) {
    return run_config_from_json(load_json_file(path));
}

}  // namespace voxevo
