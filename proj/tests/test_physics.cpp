#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "voxevo/morphology.hpp"
#include "voxevo/physics.hpp"

using namespace voxevo;

namespace {

// Two free masses joined by one spring along x.
MassSpringSystem dumbbell(double mass, double k, double rest, double separation,
                          double damping_ratio = 0.0) {
    MassSpringSystem sys;
    sys.masses.resize(2);
    sys.masses[0].pos = {0.0, 0.0, 1.0};
    sys.masses[1].pos = {separation, 0.0, 1.0};
    sys.masses[0].mass = sys.masses[1].mass = mass;
    Spring s;
    s.i = 0;
    s.j = 1;
    s.k = k;
    s.rest0 = rest;
    s.damping_ratio = damping_ratio;
    sys.springs.push_back(s);
    return sys;
}

SimConfig free_space(double dt) {
    SimConfig cfg;
    cfg.dt = dt;
    cfg.enable_gravity = false;
    cfg.enable_contact = false;
    return cfg;
}

double spring_energy(const MassSpringSystem& sys) {
    double e = 0.0;
    for (const auto& s : sys.springs) {
        const Vec3& a = sys.masses[s.i].pos;
        const Vec3& b = sys.masses[s.j].pos;
        const double len = std::sqrt((b[0] - a[0]) * (b[0] - a[0]) + (b[1] - a[1]) * (b[1] - a[1]) +
                                     (b[2] - a[2]) * (b[2] - a[2]));
        e += 0.5 * s.k * (len - s.rest0) * (len - s.rest0);
    }
    for (const auto& m : sys.masses)
        e += 0.5 * m.mass *
             (m.vel[0] * m.vel[0] + m.vel[1] * m.vel[1] + m.vel[2] * m.vel[2]);
    return e;
}

Vec3 momentum(const MassSpringSystem& sys) {
    Vec3 p{0, 0, 0};
    for (const auto& m : sys.masses)
        for (int c = 0; c < 3; ++c) p[c] += m.mass * m.vel[c];
    return p;
}

}  // namespace

TEST_CASE("static spring force matches the hand-computed value") {
    MassSpringSystem sys = dumbbell(0.2, 100.0, 0.1, 0.15);
    const auto [fi, fj] = spring_force(sys.springs[0], sys, 0.0, 2.0);
    // stretched by 0.05 m: 5 N pulling i toward j (+x) and j toward i (-x)
    REQUIRE_THAT(fi[0], Catch::Matchers::WithinAbs(5.0, 1e-12));
    REQUIRE_THAT(fi[1], Catch::Matchers::WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(fi[2], Catch::Matchers::WithinAbs(0.0, 1e-12));
    for (int c = 0; c < 3; ++c) REQUIRE(fj[c] == -fi[c]);
}

TEST_CASE("damping force follows c = zeta * 2 * sqrt(k * mu)") {
    MassSpringSystem sys = dumbbell(0.2, 100.0, 0.1, 0.1, 0.5);  // at rest length
    sys.masses[1].vel = {-1.0, 0.0, 0.0};                        // closing
    const auto [fi, fj] = spring_force(sys.springs[0], sys, 0.0, 2.0);
    const double mu = 0.2 * 0.2 / 0.4;
    const double c = 0.5 * 2.0 * std::sqrt(100.0 * mu);
    // elastic part is zero; damping acts along +x on i with magnitude c * rel
    REQUIRE_THAT(fi[0], Catch::Matchers::WithinAbs(-c, 1e-12));
    REQUIRE_THAT(fj[0], Catch::Matchers::WithinAbs(c, 1e-12));
}

TEST_CASE("harmonic oscillator returns to its start after one analytic period") {
    const double m = 0.1, k = 1e3, rest = 0.1, amp = 0.02;
    MassSpringSystem sys = dumbbell(m, k, rest, rest + amp);
    const double mu = m / 2.0;
    const double period = kTwoPi / std::sqrt(k / mu);

    SimConfig cfg = free_space(1e-5);
    SimWorkspace ws(sys);
    const long long steps = std::llround(period / cfg.dt);
    for (long long s = 0; s < steps; ++s)
        REQUIRE(step(sys, s * cfg.dt, cfg, ws) == StepResult::ok);

    const double separation = sys.masses[1].pos[0] - sys.masses[0].pos[0];
    REQUIRE_THAT(separation, Catch::Matchers::WithinAbs(rest + amp, 1e-4));
    // center of mass must not move: equal and opposite internal forces
    REQUIRE_THAT(sys.masses[0].pos[0] + sys.masses[1].pos[0],
                 Catch::Matchers::WithinAbs(rest + amp, 1e-12));
}

TEST_CASE("undamped energy drift stays under 1% over 10k steps") {
    MassSpringSystem sys = dumbbell(0.1, 1e3, 0.1, 0.12);
    const double e0 = spring_energy(sys);
    SimConfig cfg = free_space(1e-5);
    SimWorkspace ws(sys);
    double worst = 0.0;
    for (int s = 0; s < 10000; ++s) {
        REQUIRE(step(sys, s * cfg.dt, cfg, ws) == StepResult::ok);
        worst = std::max(worst, std::abs(spring_energy(sys) - e0) / e0);
    }
    REQUIRE(worst < 0.01);
}

TEST_CASE("actuated robots conserve momentum without external forces") {
    VoxelGrid g(1, 1, 1);
    g.at(0, 0, 0) = {Material::MuscleExpand, 0.9};
    MassSpringSystem sys = build_mass_spring(g, MaterialTable{});
    const Vec3 p0 = momentum(sys);
    SimConfig cfg = free_space(1e-5);
    SimWorkspace ws(sys);
    for (int s = 0; s < 1000; ++s)
        REQUIRE(step(sys, s * cfg.dt, cfg, ws) == StepResult::ok);
    const Vec3 p1 = momentum(sys);
    double total_mass = 0.0;
    for (const auto& m : sys.masses) total_mass += m.mass;
    for (int c = 0; c < 3; ++c)
        REQUIRE(std::abs(p1[c] - p0[c]) / total_mass < 1e-10);  // COM velocity drift, m/s
}

TEST_CASE("actuation modulates rest length as specified") {
    Spring s;
    s.rest0 = 0.1;
    s.act = Actuation{-1.0, 0.2, 1.1};
    const double f = 2.0;
    for (double t : {0.0, 0.077, 0.31, 1.9}) {
        const double want = 0.1 * (1.0 - 0.2 * std::sin(kTwoPi * f * t + 1.1));
        REQUIRE_THAT(actuated_rest_length(s, t, f), Catch::Matchers::WithinAbs(want, 1e-15));
    }
    s.act.reset();
    REQUIRE(actuated_rest_length(s, 0.4, f) == 0.1);
}

TEST_CASE("the integrator's phase-shifted drive equals the direct formula") {
    // one step applies F/m * dt to velocity; compare against the public
    // spring_force evaluated at the same instant
    MassSpringSystem sys = dumbbell(0.1, 500.0, 0.1, 0.11);
    sys.springs[0].act = Actuation{1.0, 0.15, 0.8};
    const double t = 0.0371;
    SimConfig cfg = free_space(1e-6);

    const auto [fi, fj] = spring_force(sys.springs[0], sys, t, cfg.actuation_frequency);
    MassSpringSystem stepped = sys;
    SimWorkspace ws(stepped);
    REQUIRE(step(stepped, t, cfg, ws) == StepResult::ok);
    for (int c = 0; c < 3; ++c) {
        REQUIRE_THAT(stepped.masses[0].vel[c],
                     Catch::Matchers::WithinAbs(fi[c] / 0.1 * cfg.dt, 1e-15));
        REQUIRE_THAT(stepped.masses[1].vel[c],
                     Catch::Matchers::WithinAbs(fj[c] / 0.1 * cfg.dt, 1e-15));
    }
}

TEST_CASE("coincident endpoints flag divergence instead of crashing") {
    MassSpringSystem sys = dumbbell(0.1, 1e3, 0.1, 0.0);  // zero separation
    REQUIRE_THROWS_AS(spring_force(sys.springs[0], sys, 0.0, 2.0), zero_length_spring);
    SimConfig cfg = free_space(1e-5);
    SimWorkspace ws(sys);
    REQUIRE(step(sys, 0.0, cfg, ws) == StepResult::diverged);
}

TEST_CASE("runaway coordinates flag divergence") {
    MassSpringSystem sys = dumbbell(0.1, 1e3, 0.1, 0.12);
    sys.masses[1].pos[0] = 2e6;
    SimConfig cfg = free_space(1e-5);
    SimWorkspace ws(sys);
    REQUIRE(step(sys, 0.0, cfg, ws) == StepResult::diverged);

    MassSpringSystem nan_sys = dumbbell(0.1, 1e3, 0.1, 0.12);
    nan_sys.masses[0].vel[1] = std::nan("");
    SimWorkspace ws2(nan_sys);
    REQUIRE(step(nan_sys, 0.0, cfg, ws2) == StepResult::diverged);
}

TEST_CASE("a dropped mass settles onto the penalty floor") {
    MassSpringSystem sys;
    sys.masses.resize(1);
    sys.masses[0].pos = {0.0, 0.0, 0.02};
    sys.masses[0].mass = 0.1;
    SimConfig cfg;
    cfg.dt = 1e-5;
    SimWorkspace ws(sys);
    for (int s = 0; s < 100000; ++s)  // 1 s
        REQUIRE(step(sys, s * cfg.dt, cfg, ws) == StepResult::ok);

    const double expected_penetration = sys.masses[0].mass * cfg.gravity / sys.plane.k;
    REQUIRE(sys.masses[0].pos[2] < 0.0);
    REQUIRE_THAT(-sys.masses[0].pos[2], Catch::Matchers::WithinAbs(expected_penetration, 1e-6));
    REQUIRE(std::abs(sys.masses[0].vel[2]) < 1e-4);
}

TEST_CASE("friction regimes: stick cancels small tangential force, slide opposes velocity") {
    const GroundPlane plane;
    const Vec3 pos{0.0, 0.0, -1e-4};
    const double mass = 0.1;

    // nearly stationary, driving force inside the static cone
    const Vec3 still{0.0, 0.0, 0.0};
    const Vec3 small_force{0.01, 0.0, 0.0};
    const Vec3 f_static = ground_contact(pos, still, mass, plane, small_force);
    REQUIRE_THAT(f_static[0], Catch::Matchers::WithinAbs(-0.01, 1e-12));
    REQUIRE(f_static[2] > 0.0);

    // same force once the normal load cannot hold it: kinetic, opposing force
    const Vec3 big_force{100.0, 0.0, 0.0};
    const Vec3 f_kin = ground_contact(pos, still, mass, plane, big_force);
    REQUIRE(f_kin[0] < 0.0);
    const double normal = plane.k * 1e-4;
    REQUIRE_THAT(f_kin[0], Catch::Matchers::WithinAbs(-plane.mu_kinetic * normal, 1e-9));

    // moving: kinetic friction opposes velocity regardless of applied force
    const Vec3 sliding{0.5, 0.0, 0.0};
    const Vec3 f_slide = ground_contact(pos, sliding, mass, plane, {0.0, 0.0, 0.0});
    REQUIRE_THAT(f_slide[0], Catch::Matchers::WithinAbs(-plane.mu_kinetic * normal, 1e-9));
    REQUIRE(f_slide[1] == 0.0);
}

TEST_CASE("above the floor there is no contact force") {
    const Vec3 f = ground_contact({0, 0, 0.001}, {1, 0, -1}, 0.1, GroundPlane{}, {5, 0, 0});
    REQUIRE(f == Vec3{0, 0, 0});
}

TEST_CASE("simulate reports displacement, speed, and exact work counts") {
    VoxelGrid g(2, 1, 1);
    g.at(0, 0, 0) = {Material::MuscleExpand, 1.0};
    g.at(1, 0, 0) = {Material::SoftTissue, 1.0};
    MassSpringSystem sys = build_mass_spring(g, MaterialTable{});

    SimConfig cfg;
    cfg.dt = 1e-4;
    cfg.duration = 0.5;
    std::vector<TrajectorySample> dump;
    const TrajectorySummary out = simulate(sys, cfg, &dump, 1000);
    REQUIRE_FALSE(out.diverged);
    REQUIRE(std::isfinite(out.horizontal_displacement));
    REQUIRE(out.max_speed > 0.0);
    REQUIRE(dump.size() == 6);  // samples at steps 0,1000,...,4000 plus the final state
    REQUIRE(dump.front().t == 0.0);

    // independent step loop must count exactly steps * springs updates
    SimWorkspace ws(sys);
    const long long steps = 500;
    for (long long s = 0; s < steps; ++s) REQUIRE(step(sys, s * cfg.dt, cfg, ws) == StepResult::ok);
    REQUIRE(ws.spring_updates == static_cast<std::uint64_t>(steps) * sys.springs.size());
}

TEST_CASE("config validation rejects nonsense") {
    SimConfig cfg;
    cfg.dt = 0.0;
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.dt = 1e-5;
    cfg.duration = -1.0;
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.duration = 0.0;
    REQUIRE_NOTHROW(cfg.validate());
}
