#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <set>

#include "voxevo/morphology.hpp"

using namespace voxevo;

namespace {

Genome probe_genome() {
    Genome g;
    g.spec = EncodingSpec{1, 3, 1.0};
    g.b_matrix = {0.0, 0.0, 0.0};
    g.head_material.in = 2;
    g.head_material.out = kMaterialCount;
    g.head_material.w.assign(2 * kMaterialCount, 0.0);
    g.head_material.b.assign(kMaterialCount, 0.0);
    g.head_weight.in = 2;
    g.head_weight.out = 1;
    g.head_weight.w.assign(2, 0.0);
    g.head_weight.b.assign(1, 0.0);
    return g;
}

VoxelGrid uniform_grid(int w, int h, int d, Material m, double weight = 1.0) {
    VoxelGrid g(w, h, d);
    for (auto& c : g.cells) c = Cell{m, weight};
    return g;
}

double dist(const Vec3& a, const Vec3& b) {
    return std::sqrt((b[0] - a[0]) * (b[0] - a[0]) + (b[1] - a[1]) * (b[1] - a[1]) +
                     (b[2] - a[2]) * (b[2] - a[2]));
}

}  // namespace

TEST_CASE("decode ties go to the lowest material index") {
    const Genome g = probe_genome();  // every logit 0 -> five-way tie
    const VoxelGrid grid = decode(g, 2, 2, 2);
    for (const auto& c : grid.cells) REQUIRE(c.material == Material::Empty);
}

TEST_CASE("decode picks the argmax material and clamps weight") {
    Genome g = probe_genome();
    g.head_material.b[3] = 1.0;  // SoftTissue wins everywhere
    g.head_weight.b[0] = -100.0; // sigmoid ~ 0 -> clamped up
    VoxelGrid grid = decode(g, 3, 2, 1);
    for (const auto& c : grid.cells) {
        REQUIRE(c.material == Material::SoftTissue);
        REQUIRE(c.weight == kMinVoxelWeight);
    }
    g.head_weight.b[0] = 100.0;  // sigmoid ~ 1
    grid = decode(g, 3, 2, 1);
    for (const auto& c : grid.cells) REQUIRE(c.weight <= 1.0);
}

TEST_CASE("decode samples voxel centers") {
    // one frequency row (1,0,0): feature sin(2*pi*x). Feeding that feature
    // into material 1's logit separates centers x=0.25 (sin=+1) from x=0.75
    // (sin=-1): the first decodes MuscleExpand, the second ties to Empty.
    Genome g = probe_genome();
    g.b_matrix = {1.0, 0.0, 0.0};
    g.head_material.w[1 * 2 + 1] = 5.0;  // material 1, sin feature
    const VoxelGrid grid = decode(g, 2, 1, 1);
    REQUIRE(grid.at(0, 0, 0).material == Material::MuscleExpand);
    REQUIRE(grid.at(1, 0, 0).material == Material::Empty);
}

TEST_CASE("largest component keeps the biggest blob, ties to lowest index") {
    VoxelGrid g(5, 1, 1);
    g.at(0, 0, 0) = {Material::SoftTissue, 1.0};
    g.at(1, 0, 0) = {Material::HardBone, 1.0};
    g.at(3, 0, 0) = {Material::SoftTissue, 1.0};
    VoxelGrid kept = largest_component(g);
    REQUIRE(kept.at(0, 0, 0).material == Material::SoftTissue);
    REQUIRE(kept.at(1, 0, 0).material == Material::HardBone);
    REQUIRE(kept.at(3, 0, 0).material == Material::Empty);

    // equal-size components: the one containing the lowest linear index stays
    VoxelGrid tie(5, 1, 1);
    tie.at(1, 0, 0) = {Material::SoftTissue, 1.0};
    tie.at(4, 0, 0) = {Material::SoftTissue, 1.0};
    kept = largest_component(tie);
    REQUIRE(kept.at(1, 0, 0).material == Material::SoftTissue);
    REQUIRE(kept.at(4, 0, 0).material == Material::Empty);
}

TEST_CASE("connectivity is face-adjacent only") {
    VoxelGrid g(2, 2, 1);
    g.at(0, 0, 0) = {Material::SoftTissue, 1.0};
    g.at(1, 1, 0) = {Material::SoftTissue, 1.0};  // diagonal neighbor
    g.at(1, 0, 0) = {Material::Empty, 1.0};
    const VoxelGrid kept = largest_component(g);
    REQUIRE(kept.count_non_empty() == 1);
    REQUIRE(kept.at(0, 0, 0).material == Material::SoftTissue);
}

TEST_CASE("single voxel builds 8 masses and 28 springs with exact rests") {
    const MaterialTable table;
    const VoxelGrid g = uniform_grid(1, 1, 1, Material::SoftTissue, 0.75);
    const MassSpringSystem sys = build_mass_spring(g, table);

    REQUIRE(sys.masses.size() == 8);
    REQUIRE(sys.springs.size() == 28);

    std::map<int, int> rest_kinds;  // 0 edge, 1 face diagonal, 2 body diagonal
    const double e = table.voxel_edge;
    for (const auto& s : sys.springs) {
        REQUIRE(s.i < s.j);
        const double measured = dist(sys.masses[s.i].pos, sys.masses[s.j].pos);
        REQUIRE_THAT(s.rest0, Catch::Matchers::WithinAbs(measured, 1e-12));
        REQUIRE_THAT(s.k, Catch::Matchers::WithinAbs(0.75 * table.k_soft, 1e-12));
        REQUIRE(s.damping_ratio == table.damping_ratio);
        REQUIRE_FALSE(s.act.has_value());
        if (std::abs(s.rest0 - e) < 1e-12)
            ++rest_kinds[0];
        else if (std::abs(s.rest0 - e * std::sqrt(2.0)) < 1e-12)
            ++rest_kinds[1];
        else if (std::abs(s.rest0 - e * std::sqrt(3.0)) < 1e-12)
            ++rest_kinds[2];
        else
            FAIL("unexpected rest length");
    }
    REQUIRE(rest_kinds[0] == 12);
    REQUIRE(rest_kinds[1] == 12);
    REQUIRE(rest_kinds[2] == 4);

    for (const auto& m : sys.masses) {
        REQUIRE(m.mass == table.mass_per_vertex);
        REQUIRE(m.pos[2] >= 0.0);
    }
    double min_z = 1e9;
    for (const auto& m : sys.masses) min_z = std::min(min_z, m.pos[2]);
    REQUIRE(min_z == 0.0);
}

TEST_CASE("two face-adjacent voxels share a face: 12 masses, 50 springs") {
    VoxelGrid g(2, 1, 1);
    g.at(0, 0, 0) = {Material::SoftTissue, 1.0};   // k contribution 1000
    g.at(1, 0, 0) = {Material::HardBone, 0.5};     // k contribution 5000
    const MaterialTable table;
    const MassSpringSystem sys = build_mass_spring(g, table);

    REQUIRE(sys.masses.size() == 12);
    REQUIRE(sys.springs.size() == 50);

    // the 6 springs on the shared face (all four endpoints at x = edge)
    // average both contributions; every other spring keeps its own voxel's
    int shared = 0, soft_only = 0, bone_only = 0;
    for (const auto& s : sys.springs) {
        const bool i_mid = std::abs(sys.masses[s.i].pos[0] - table.voxel_edge) < 1e-12;
        const bool j_mid = std::abs(sys.masses[s.j].pos[0] - table.voxel_edge) < 1e-12;
        if (i_mid && j_mid) {
            REQUIRE_THAT(s.k, Catch::Matchers::WithinAbs(0.5 * (1000.0 + 5000.0), 1e-12));
            ++shared;
        } else if (sys.masses[s.i].pos[0] < table.voxel_edge ||
                   sys.masses[s.j].pos[0] < table.voxel_edge) {
            REQUIRE_THAT(s.k, Catch::Matchers::WithinAbs(1000.0, 1e-12));
            ++soft_only;
        } else {
            REQUIRE_THAT(s.k, Catch::Matchers::WithinAbs(5000.0, 1e-12));
            ++bone_only;
        }
    }
    REQUIRE(shared == 6);
    REQUIRE(soft_only == 22);
    REQUIRE(bone_only == 22);
}

TEST_CASE("muscle voxels actuate their springs, lowest index wins shared ones") {
    VoxelGrid g(2, 1, 1);
    g.at(0, 0, 0) = {Material::MuscleContract, 0.8};
    g.at(1, 0, 0) = {Material::MuscleExpand, 0.6};
    const MaterialTable table;
    const MassSpringSystem sys = build_mass_spring(g, table);

    for (const auto& s : sys.springs) {
        REQUIRE(s.act.has_value());
        const bool i_left = sys.masses[s.i].pos[0] < table.voxel_edge - 1e-12;
        const bool j_left = sys.masses[s.j].pos[0] < table.voxel_edge - 1e-12;
        if (i_left || j_left) {
            // touches the contract voxel, which has the lower linear index
            REQUIRE(s.act->sign == -1.0);
            REQUIRE_THAT(s.act->amplitude, Catch::Matchers::WithinAbs(0.8 * table.amp_max, 1e-12));
            REQUIRE_THAT(s.act->phase, Catch::Matchers::WithinAbs(0.8 * table.phase_max, 1e-12));
        } else {
            const bool i_mid = std::abs(sys.masses[s.i].pos[0] - table.voxel_edge) < 1e-12;
            const bool j_mid = std::abs(sys.masses[s.j].pos[0] - table.voxel_edge) < 1e-12;
            if (i_mid && j_mid) {
                REQUIRE(s.act->sign == -1.0);  // shared face: contract voxel scanned first
            } else {
                REQUIRE(s.act->sign == 1.0);
                REQUIRE_THAT(s.act->amplitude,
                             Catch::Matchers::WithinAbs(0.6 * table.amp_max, 1e-12));
            }
        }
    }
}

TEST_CASE("soft voxels never actuate") {
    const VoxelGrid g = uniform_grid(2, 2, 2, Material::SoftTissue);
    for (const auto& s : build_mass_spring(g, MaterialTable{}).springs)
        REQUIRE_FALSE(s.act.has_value());
}

TEST_CASE("body is grounded at z = 0 even when voxels start high") {
    VoxelGrid g(1, 1, 3);
    g.at(0, 0, 2) = {Material::SoftTissue, 1.0};  // only the top layer occupied
    const MassSpringSystem sys = build_mass_spring(g, MaterialTable{});
    double min_z = 1e9, max_z = -1e9;
    for (const auto& m : sys.masses) {
        min_z = std::min(min_z, m.pos[2]);
        max_z = std::max(max_z, m.pos[2]);
    }
    REQUIRE(min_z == 0.0);
    REQUIRE_THAT(max_z, Catch::Matchers::WithinAbs(MaterialTable{}.voxel_edge, 1e-12));
}

TEST_CASE("empty grids cannot become robots") {
    const VoxelGrid g(3, 3, 3);
    REQUIRE_THROWS_AS(build_mass_spring(g, MaterialTable{}), empty_robot);
}

TEST_CASE("mass count equals distinct lattice vertices") {
    // L-shape: 3 voxels sharing edges/faces
    VoxelGrid g(2, 2, 1);
    g.at(0, 0, 0) = {Material::SoftTissue, 1.0};
    g.at(1, 0, 0) = {Material::SoftTissue, 1.0};
    g.at(0, 1, 0) = {Material::SoftTissue, 1.0};
    const MassSpringSystem sys = build_mass_spring(g, MaterialTable{});
    std::set<std::array<long, 3>> verts;
    for (const auto& m : sys.masses)
        verts.insert({std::lround(m.pos[0] * 1e6), std::lround(m.pos[1] * 1e6),
                      std::lround(m.pos[2] * 1e6)});
    REQUIRE(verts.size() == sys.masses.size());  // no duplicated positions
    REQUIRE(sys.masses.size() == 16);            // 3 cubes, 8 shared out of 24
}
