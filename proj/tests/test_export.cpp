#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <array>
#include <sstream>
#include <string>
#include <vector>

#include "voxevo/export.hpp"

using namespace voxevo;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

VoxelGrid two_voxel_grid() {
    VoxelGrid g(2, 1, 1);
    g.at(0, 0, 0) = {Material::MuscleExpand, 0.75};
    g.at(1, 0, 0) = {Material::HardBone, 1.0};
    return g;
}

}  // namespace

TEST_CASE("voxel listing prints occupied cells with material ids") {
    std::ostringstream out;
    write_voxel_listing(out, two_voxel_grid());
    const auto lines = lines_of(out.str());
    REQUIRE(lines.size() == 3);
    REQUIRE(lines[0] == "# x y z material weight");
    REQUIRE(lines[1] == "0 0 0 1 0.75");
    REQUIRE(lines[2] == "1 0 0 4 1");
}

TEST_CASE("voxel listing skips empty cells") {
    VoxelGrid g(3, 3, 3);
    g.at(2, 1, 0) = {Material::SoftTissue, 0.5};
    std::ostringstream out;
    write_voxel_listing(out, g);
    const auto lines = lines_of(out.str());
    REQUIRE(lines.size() == 2);
    REQUIRE(lines[1] == "2 1 0 3 0.5");
}

TEST_CASE("obj mesh has one cube per voxel, grouped by material") {
    std::ostringstream out;
    write_mesh_obj(out, two_voxel_grid(), 0.1);
    const std::string obj = out.str();
    const auto lines = lines_of(obj);

    int v_count = 0, f_count = 0, g_count = 0;
    long max_index = 0;
    for (const auto& line : lines) {
        if (line.rfind("v ", 0) == 0) ++v_count;
        if (line.rfind("f ", 0) == 0) {
            ++f_count;
            std::istringstream fs(line.substr(2));
            long idx;
            int verts = 0;
            while (fs >> idx) {
                REQUIRE(idx >= 1);
                max_index = std::max(max_index, idx);
                ++verts;
            }
            REQUIRE(verts == 4);  // quad faces
        }
        if (line.rfind("g ", 0) == 0) ++g_count;
    }
    REQUIRE(v_count == 16);           // 2 cubes, no sharing across groups
    REQUIRE(f_count == 12);           // 6 quads each
    REQUIRE(g_count == 2);            // muscle_expand and hard_bone
    REQUIRE(max_index == v_count);    // faces only reference emitted vertices
    REQUIRE(obj.find("g muscle_expand") != std::string::npos);
    REQUIRE(obj.find("g hard_bone") != std::string::npos);
    REQUIRE(obj.find("usemtl muscle_expand") != std::string::npos);
}

TEST_CASE("obj cube faces wind outward") {
    VoxelGrid g(1, 1, 1);
    g.at(0, 0, 0) = {Material::SoftTissue, 1.0};
    std::ostringstream out;
    write_mesh_obj(out, g, 1.0);

    std::vector<std::array<double, 3>> verts;
    std::vector<std::array<int, 4>> faces;
    for (const auto& line : lines_of(out.str())) {
        if (line.rfind("v ", 0) == 0) {
            std::istringstream vs(line.substr(2));
            std::array<double, 3> p{};
            vs >> p[0] >> p[1] >> p[2];
            verts.push_back(p);
        } else if (line.rfind("f ", 0) == 0) {
            std::istringstream fs(line.substr(2));
            std::array<int, 4> f{};
            fs >> f[0] >> f[1] >> f[2] >> f[3];
            faces.push_back(f);
        }
    }
    REQUIRE(verts.size() == 8);
    REQUIRE(faces.size() == 6);

    const std::array<double, 3> center{0.5, 0.5, 0.5};
    for (const auto& f : faces) {
        const auto& a = verts[f[0] - 1];
        const auto& b = verts[f[1] - 1];
        const auto& c = verts[f[2] - 1];
        const double ux = b[0] - a[0], uy = b[1] - a[1], uz = b[2] - a[2];
        const double vx = c[0] - a[0], vy = c[1] - a[1], vz = c[2] - a[2];
        const double nx = uy * vz - uz * vy;
        const double ny = uz * vx - ux * vz;
        const double nz = ux * vy - uy * vx;
        // normal must point away from the cube center
        const double dot = nx * (a[0] - center[0]) + ny * (a[1] - center[1]) +
                           nz * (a[2] - center[2]);
        REQUIRE(dot > 0.0);
    }
}
