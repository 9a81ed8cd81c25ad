#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "voxevo/evolution.hpp"

namespace voxevo {

// Hyperparameter advisor consulted between generations once a full window of
// reports exists. Implementations return the parameters to use next, or
// nullopt to leave the current ones untouched. Proposals are clamped to the
// legal ranges before use.
class Advisor {
  public:
    virtual ~Advisor() = default;
    virtual std::optional<HyperParams> propose(const std::vector<GenerationReport>& window,
                                               const HyperParams& current) = 0;
};

// Rule-based advisor with no external dependencies. Two triggers:
//  - diversity collapse: latest diversity below `diversity_floor` scales
//    mutation rate and scale by `mutation_boost`
//  - stagnation: best fitness improved by less than `stagnation_eps` from
//    the oldest to the newest report scales crossover by `crossover_boost`
class ScriptedAdvisor : public Advisor {
  public:
    double diversity_floor = 0.05;
    double stagnation_eps = 1e-6;
    double mutation_boost = 1.5;
    double crossover_boost = 1.25;

    std::optional<HyperParams> propose(const std::vector<GenerationReport>& window,
                                       const HyperParams& current) override {
        if (window.empty()) return std::nullopt;
        HyperParams next = current;
        bool fired = false;
        if (window.back().diversity < diversity_floor) {
            next.mutation_rate *= mutation_boost;
            next.mutation_scale *= mutation_boost;
            fired = true;
        }
        if (window.size() >= 2 && window.back().best - window.front().best < stagnation_eps) {
            next.crossover_rate *= crossover_boost;
            fired = true;
        }
        if (!fired) return std::nullopt;
        next.clamp();
        return next;
    }
};

namespace detail {

inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace detail

// Deterministic prompt: same window and parameters always produce the same
// byte sequence, so audit logs can be replayed and diffed.
inline std::string build_advisor_prompt(const std::vector<GenerationReport>& window,
                                        const HyperParams& current) {
    std::string p;
    p += "You tune the hyperparameters of an evolutionary search that co-designs the\n";
    p += "morphology and gait of simulated voxel robots. Fitness is horizontal\n";
    p += "locomotion distance; diversity is the mean pairwise fraction of differing\n";
    p += "voxels across the population (0 = identical, 1 = disjoint).\n\n";
    p += "Recent generations, oldest first:\n";
    for (const auto& r : window) {
        p += "generation=" + std::to_string(r.generation);
        p += " best=" + detail::fmt_double(r.best);
        p += " mean=" + detail::fmt_double(r.mean);
        p += " std=" + detail::fmt_double(r.stddev);
        p += " diversity=" + detail::fmt_double(r.diversity);
        p += "\n";
    }
    nlohmann::json cur = {{"mutation_rate", current.mutation_rate},
                          {"mutation_scale", current.mutation_scale},
                          {"crossover_rate", current.crossover_rate},
                          {"elite_fraction", current.elite_fraction}};
    p += "\nCurrent hyperparameters: " + cur.dump() + "\n\n";
    p += "Reply with one JSON object holding numeric keys mutation_rate,\n";
    p += "mutation_scale, crossover_rate and elite_fraction. Values outside their\n";
    p += "legal ranges are clamped. Do not add any other text.\n";
    return p;
}

// First balanced JSON object embedded in free-form text, located by a
// string-aware brace scan (braces inside string literals don't count).
// Returns nullopt when no complete object exists.
inline std::optional<std::string> extract_first_json_object(const std::string& text) {
    const std::size_t start = text.find('{');
    if (start == std::string::npos) return std::nullopt;
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            if (escaped)
                escaped = false;
            else if (c == '\\')
                escaped = true;
            else if (c == '"')
                in_string = false;
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) return text.substr(start, i - start + 1);
        }
    }
    return std::nullopt;
}

// Turn a model reply into hyperparameters. Strict on the contract, lenient
// on packaging: the object may sit inside prose, unknown keys are ignored,
// out-of-range values are clamped. Missing or non-numeric required keys
// reject the whole proposal. material_multipliers (array of 3 numbers,
// muscle/soft/bone) is honored only when `allow_material_multipliers`.
inline std::optional<HyperParams> parse_advisor_reply(const std::string& text,
                                                      const HyperParams& current,
                                                      bool allow_material_multipliers = false) {
    const auto obj_text = extract_first_json_object(text);
    if (!obj_text) return std::nullopt;
    const nlohmann::json obj = nlohmann::json::parse(*obj_text, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) return std::nullopt;

    static constexpr const char* kRequired[] = {"mutation_rate", "mutation_scale", "crossover_rate",
                                                "elite_fraction"};
    for (const char* key : kRequired) {
        const auto it = obj.find(key);
        if (it == obj.end() || !it->is_number()) return std::nullopt;
    }
    HyperParams next = current;
    next.mutation_rate = obj["mutation_rate"].get<double>();
    next.mutation_scale = obj["mutation_scale"].get<double>();
    next.crossover_rate = obj["crossover_rate"].get<double>();
    next.elite_fraction = obj["elite_fraction"].get<double>();
    if (allow_material_multipliers) {
        const auto it = obj.find("material_multipliers");
        if (it != obj.end() && it->is_array() && it->size() == 3) {
            bool numeric = true;
            for (const auto& v : *it) numeric = numeric && v.is_number();
            if (numeric)
                for (std::size_t i = 0; i < 3; ++i)
                    next.material_multipliers[i] = (*it)[i].get<double>();
        }
    }
    next.clamp();
    return next;
}

// Adapter so an Advisor can drive evolve_generation.
inline AdvisorFn make_advisor_fn(Advisor* advisor) {
    if (!advisor) return nullptr;
    return [advisor](const std::vector<GenerationReport>& window, const HyperParams& current) {
        return advisor->propose(window, current);
    };
}

}  // namespace voxevo
