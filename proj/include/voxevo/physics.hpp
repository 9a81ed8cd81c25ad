#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "voxevo/morphology.hpp"

namespace voxevo {

struct zero_length_spring : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SimConfig {
    double gravity = 9.81;             // m/s^2, -z
    double dt = 1e-5;                  // s
    double duration = 2.0;             // s
    double actuation_frequency = 2.0;  // Hz, global muscle drive
    bool enable_gravity = true;        // test-harness toggles
    bool enable_contact = true;

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("SimConfig: dt must be > 0");
        if (!(duration >= 0.0)) throw std::invalid_argument("SimConfig: duration must be >= 0");
        if (!(actuation_frequency > 0.0)) throw std::invalid_argument("SimConfig: frequency must be > 0");
    }
};

struct TrajectorySummary {
    Vec3 com_start{};
    Vec3 com_end{};
    double horizontal_displacement = 0.0;  // ||(x,y) of com_end - com_start||
    double max_speed = 0.0;                // max single-mass speed seen
    bool diverged = false;
};

inline constexpr double kZeroLengthEps = 1e-9;
inline constexpr double kDivergenceBound = 1e6;   // m, per coordinate
inline constexpr double kStickVelocity = 1e-4;    // m/s, static/kinetic switch

// L(t) = rest0 * (1 + sign * amplitude * sin(2*pi*f*t + phase)); passive
// springs return rest0. Reference formula; step() evaluates the same value
// through the angle-addition identity.
inline double actuated_rest_length(const Spring& s, double t, double frequency) {
    if (!s.act) return s.rest0;
    return s.rest0 * (1.0 + s.act->sign * s.act->amplitude * std::sin(kTwoPi * frequency * t + s.act->phase));
}

namespace detail {

// Elastic + damping force on mass i; force on j is the exact negation.
// c is the precomputed damping coefficient zeta * 2 * sqrt(k * mu).
inline Vec3 spring_force_on_i(double k, double rest_length, double c, const Vec3& xi, const Vec3& xj,
                              const Vec3& vi, const Vec3& vj, double len) {
    const double inv_len = 1.0 / len;
    const double nx = (xj[0] - xi[0]) * inv_len;
    const double ny = (xj[1] - xi[1]) * inv_len;
    const double nz = (xj[2] - xi[2]) * inv_len;
    const double rel = (vj[0] - vi[0]) * nx + (vj[1] - vi[1]) * ny + (vj[2] - vi[2]) * nz;
    const double mag = k * (len - rest_length) + c * rel;
    return {mag * nx, mag * ny, mag * nz};
}

inline double damping_coefficient(const Spring& s, const MassSpringSystem& sys) {
    const double mi = sys.masses[s.i].mass;
    const double mj = sys.masses[s.j].mass;
    const double mu = mi * mj / (mi + mj);
    return s.damping_ratio * 2.0 * std::sqrt(s.k * mu);
}

}  // namespace detail

// Force pair for one spring at time t. Throws zero_length_spring when the
// endpoints coincide (the step loop turns that into a divergence flag).
inline std::pair<Vec3, Vec3> spring_force(const Spring& s, const MassSpringSystem& sys, double t,
                                          double frequency) {
    const Vec3& xi = sys.masses[s.i].pos;
    const Vec3& xj = sys.masses[s.j].pos;
    const double dx = xj[0] - xi[0], dy = xj[1] - xi[1], dz = xj[2] - xi[2];
    const double len = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (len < kZeroLengthEps) throw zero_length_spring("spring endpoints coincide");
    const Vec3 fi = detail::spring_force_on_i(s.k, actuated_rest_length(s, t, frequency),
                                              detail::damping_coefficient(s, sys), xi, xj,
                                              sys.masses[s.i].vel, sys.masses[s.j].vel, len);
    return {fi, Vec3{-fi[0], -fi[1], -fi[2]}};
}

// Penalty contact with static/kinetic friction. `accumulated` is the sum of
// all other forces already acting on the mass (springs + gravity); its
// tangential part decides the friction regime.
inline Vec3 ground_contact(const Vec3& pos, const Vec3& vel, double mass, const GroundPlane& plane,
                           const Vec3& accumulated) {
    if (pos[2] >= 0.0) return {0.0, 0.0, 0.0};
    const double penetration = -pos[2];
    const double c_g = plane.damping_ratio * 2.0 * std::sqrt(plane.k * mass);
    double normal = plane.k * penetration - c_g * vel[2];
    if (normal < 0.0) normal = 0.0;

    const double ft_x = accumulated[0], ft_y = accumulated[1];
    const double ft_norm = std::sqrt(ft_x * ft_x + ft_y * ft_y);
    const double vt_norm = std::sqrt(vel[0] * vel[0] + vel[1] * vel[1]);

    double fx = 0.0, fy = 0.0;
    if (vt_norm < kStickVelocity && ft_norm <= plane.mu_static * normal) {
        fx = -ft_x;  // static: cancel the driving tangential force
        fy = -ft_y;
    } else if (vt_norm > 0.0) {
        const double scale = plane.mu_kinetic * normal / vt_norm;
        fx = -scale * vel[0];
        fy = -scale * vel[1];
    } else if (ft_norm > 0.0) {
        // zero tangential velocity but force outside the static cone:
        // oppose the driving force direction
        const double scale = plane.mu_kinetic * normal / ft_norm;
        fx = -scale * ft_x;
        fy = -scale * ft_y;
    }
    return {fx, fy, normal};
}

enum class StepResult { ok, diverged };

// Derived constants and per-spring force slots for the two-phase update.
// Owning them outside MassSpringSystem keeps the system itself plain state.
struct SimWorkspace {
    std::vector<Vec3> spring_force;     // phase-1 output, force on spring.i
    std::vector<double> damp_coef;      // zeta * 2 * sqrt(k * mu)
    std::vector<double> amp_rest;       // sign * amplitude * rest0 (0 when passive)
    std::vector<double> sin_phase, cos_phase;
    std::vector<double> ground_damp;    // zeta_g * 2 * sqrt(k_g * m), per mass
    std::vector<std::int32_t> inc_offset;  // CSR incidence, per mass
    std::vector<std::int32_t> inc_spring;
    std::vector<double> inc_sign;          // +1 when the mass is spring.i
    double max_speed_sq = 0.0;
    std::uint64_t spring_updates = 0;
    bool any_actuated = false;

    explicit SimWorkspace(const MassSpringSystem& sys) {
        const std::size_t ns = sys.springs.size();
        const std::size_t nm = sys.masses.size();
        spring_force.resize(ns);
        damp_coef.resize(ns);
        amp_rest.resize(ns);
        sin_phase.resize(ns);
        cos_phase.resize(ns);
        for (std::size_t s = 0; s < ns; ++s) {
            const Spring& sp = sys.springs[s];
            damp_coef[s] = detail::damping_coefficient(sp, sys);
            if (sp.act) {
                any_actuated = true;
                amp_rest[s] = sp.act->sign * sp.act->amplitude * sp.rest0;
                sin_phase[s] = std::sin(sp.act->phase);
                cos_phase[s] = std::cos(sp.act->phase);
            } else {
                amp_rest[s] = 0.0;
                sin_phase[s] = 0.0;
                cos_phase[s] = 1.0;
            }
        }
        ground_damp.resize(nm);
        for (std::size_t i = 0; i < nm; ++i)
            ground_damp[i] = sys.plane.damping_ratio * 2.0 * std::sqrt(sys.plane.k * sys.masses[i].mass);

        // fixed gather order: each mass's incident springs sorted by spring
        // index, so the phase-2 sum is independent of phase-1 scheduling
        std::vector<std::int32_t> degree(nm, 0);
        for (const auto& sp : sys.springs) {
            ++degree[sp.i];
            ++degree[sp.j];
        }
        inc_offset.assign(nm + 1, 0);
        for (std::size_t i = 0; i < nm; ++i) inc_offset[i + 1] = inc_offset[i] + degree[i];
        inc_spring.resize(inc_offset[nm]);
        inc_sign.resize(inc_offset[nm]);
        std::vector<std::int32_t> cursor(inc_offset.begin(), inc_offset.end() - 1);
        for (std::size_t s = 0; s < ns; ++s) {  // ascending s keeps each list sorted
            const Spring& sp = sys.springs[s];
            inc_spring[cursor[sp.i]] = static_cast<std::int32_t>(s);
            inc_sign[cursor[sp.i]++] = 1.0;
            inc_spring[cursor[sp.j]] = static_cast<std::int32_t>(s);
            inc_sign[cursor[sp.j]++] = -1.0;
        }
    }
};

// One semi-implicit Euler step: phase 1 writes each spring's force pair to
// its own slot (no shared writes); phase 2 gathers per mass in spring-index
// order, adds gravity and contact, then v += (F/m) dt, x += v dt.
inline StepResult step(MassSpringSystem& sys, double t, const SimConfig& cfg, SimWorkspace& ws) {
    const std::size_t ns = sys.springs.size();
    const std::size_t nm = sys.masses.size();
    double sin_wt = 0.0, cos_wt = 1.0;
    if (ws.any_actuated) {
        const double wt = kTwoPi * cfg.actuation_frequency * t;
        sin_wt = std::sin(wt);
        cos_wt = std::cos(wt);
    }

    for (std::size_t s = 0; s < ns; ++s) {
        const Spring& sp = sys.springs[s];
        const Vec3& xi = sys.masses[sp.i].pos;
        const Vec3& xj = sys.masses[sp.j].pos;
        const double dx = xj[0] - xi[0], dy = xj[1] - xi[1], dz = xj[2] - xi[2];
        const double len = std::sqrt(dx * dx + dy * dy + dz * dz);
        if (len < kZeroLengthEps) return StepResult::diverged;
        const double rest = sp.rest0 + ws.amp_rest[s] * (sin_wt * ws.cos_phase[s] + cos_wt * ws.sin_phase[s]);
        ws.spring_force[s] = detail::spring_force_on_i(sp.k, rest, ws.damp_coef[s], xi, xj,
                                                       sys.masses[sp.i].vel, sys.masses[sp.j].vel, len);
    }
    ws.spring_updates += ns;

    const double dt = cfg.dt;
    bool ok = true;
    for (std::size_t a = 0; a < nm; ++a) {
        PointMass& pm = sys.masses[a];
        double fx = 0.0, fy = 0.0, fz = 0.0;
        for (std::int32_t e = ws.inc_offset[a]; e < ws.inc_offset[a + 1]; ++e) {
            const Vec3& f = ws.spring_force[ws.inc_spring[e]];
            const double sgn = ws.inc_sign[e];
            fx += sgn * f[0];
            fy += sgn * f[1];
            fz += sgn * f[2];
        }
        if (cfg.enable_gravity) fz -= pm.mass * cfg.gravity;
        if (cfg.enable_contact && pm.pos[2] < 0.0) {
            const double penetration = -pm.pos[2];
            double normal = sys.plane.k * penetration - ws.ground_damp[a] * pm.vel[2];
            if (normal < 0.0) normal = 0.0;
            const double ft_norm = std::sqrt(fx * fx + fy * fy);
            const double vt_norm = std::sqrt(pm.vel[0] * pm.vel[0] + pm.vel[1] * pm.vel[1]);
            if (vt_norm < kStickVelocity && ft_norm <= sys.plane.mu_static * normal) {
                fx = 0.0;
                fy = 0.0;
            } else if (vt_norm > 0.0) {
                const double scale = sys.plane.mu_kinetic * normal / vt_norm;
                fx -= scale * pm.vel[0];
                fy -= scale * pm.vel[1];
            } else if (ft_norm > 0.0) {
                // zero tangential velocity but force outside the static
                // cone: kinetic friction opposes the driving force
                const double scale = sys.plane.mu_kinetic * normal / ft_norm;
                fx -= scale * fx;
                fy -= scale * fy;
            }
            fz += normal;
        }
        const double inv_m_dt = dt / pm.mass;
        pm.vel[0] += fx * inv_m_dt;
        pm.vel[1] += fy * inv_m_dt;
        pm.vel[2] += fz * inv_m_dt;
        pm.pos[0] += pm.vel[0] * dt;
        pm.pos[1] += pm.vel[1] * dt;
        pm.pos[2] += pm.vel[2] * dt;

        const double speed_sq =
            pm.vel[0] * pm.vel[0] + pm.vel[1] * pm.vel[1] + pm.vel[2] * pm.vel[2];
        if (speed_sq > ws.max_speed_sq) ws.max_speed_sq = speed_sq;
        for (int c = 0; c < 3; ++c)
            if (!(std::abs(pm.pos[c]) <= kDivergenceBound)) ok = false;  // catches NaN too
    }
    return ok ? StepResult::ok : StepResult::diverged;
}

inline Vec3 center_of_mass(const MassSpringSystem& sys) {
    Vec3 com{0.0, 0.0, 0.0};
    double total = 0.0;
    for (const auto& m : sys.masses) {
        com[0] += m.mass * m.pos[0];
        com[1] += m.mass * m.pos[1];
        com[2] += m.mass * m.pos[2];
        total += m.mass;
    }
    if (total > 0.0)
        for (auto& c : com) c /= total;
    return com;
}

struct TrajectorySample {
    double t;
    Vec3 com;
};

// Run duration/dt steps from t = 0. Divergence is flagged, not thrown, so a
// GA evaluation never aborts. Optional COM sampling every `stride` steps.
inline TrajectorySummary simulate(MassSpringSystem sys, const SimConfig& cfg,
                                  std::vector<TrajectorySample>* dump = nullptr, int stride = 0) {
    cfg.validate();
    TrajectorySummary out;
    if (sys.masses.empty()) return out;

    SimWorkspace ws(sys);
    out.com_start = center_of_mass(sys);
    const long long n_steps = std::llround(cfg.duration / cfg.dt);
    for (long long k = 0; k < n_steps; ++k) {
        const double t = static_cast<double>(k) * cfg.dt;
        if (dump && stride > 0 && k % stride == 0) dump->push_back({t, center_of_mass(sys)});
        if (step(sys, t, cfg, ws) == StepResult::diverged) {
            out.diverged = true;
            break;
        }
    }
    if (dump) dump->push_back({static_cast<double>(n_steps) * cfg.dt, center_of_mass(sys)});
    out.com_end = center_of_mass(sys);
    const double dx = out.com_end[0] - out.com_start[0];
    const double dy = out.com_end[1] - out.com_start[1];
    out.horizontal_displacement = std::sqrt(dx * dx + dy * dy);
    out.max_speed = std::sqrt(ws.max_speed_sq);
    return out;
}

}  // namespace voxevo
