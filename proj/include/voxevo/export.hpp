#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "voxevo/morphology.hpp"

namespace voxevo {

struct export_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string fmt_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace detail

// Plain-text voxel listing, one occupied cell per line:
//   x y z material weight
// with material as its numeric id. Weights keep full precision.
inline void write_voxel_listing(std::ostream& out, const VoxelGrid& grid) {
    out << "# x y z material weight\n";
    for (int z = 0; z < grid.d; ++z)
        for (int y = 0; y < grid.h; ++y)
            for (int x = 0; x < grid.w; ++x) {
                const Cell& c = grid.at(x, y, z);
                if (c.material == Material::Empty) continue;
                char buf[24];
                std::snprintf(buf, sizeof(buf), "%.9g", c.weight);
                out << x << ' ' << y << ' ' << z << ' ' << static_cast<int>(c.material) << ' '
                    << buf << '\n';
            }
}

// Wavefront OBJ of the occupied voxels as axis-aligned cubes, one object
// group per material so viewers can color them independently. Each cube
// emits its own 8 vertices; faces wind counter-clockwise seen from outside.
inline void write_mesh_obj(std::ostream& out, const VoxelGrid& grid, double voxel_edge) {
    out << "# voxevo robot mesh, cube edge " << detail::fmt_coord(voxel_edge) << " m\n";
    long next_vertex = 1;  // OBJ indices are 1-based
    static constexpr Material kSolid[] = {Material::MuscleExpand, Material::MuscleContract,
                                          Material::SoftTissue, Material::HardBone};
    for (const Material mat : kSolid) {
        bool group_open = false;
        for (int z = 0; z < grid.d; ++z)
            for (int y = 0; y < grid.h; ++y)
                for (int x = 0; x < grid.w; ++x) {
                    if (grid.at(x, y, z).material != mat) continue;
                    if (!group_open) {
                        out << "g " << material_name(mat) << "\nusemtl " << material_name(mat)
                            << '\n';
                        group_open = true;
                    }
                    const double x0 = x * voxel_edge, x1 = (x + 1) * voxel_edge;
                    const double y0 = y * voxel_edge, y1 = (y + 1) * voxel_edge;
                    const double z0 = z * voxel_edge, z1 = (z + 1) * voxel_edge;
                    const double corners[8][3] = {{x0, y0, z0}, {x1, y0, z0}, {x1, y1, z0},
                                                  {x0, y1, z0}, {x0, y0, z1}, {x1, y0, z1},
                                                  {x1, y1, z1}, {x0, y1, z1}};
                    for (const auto& c : corners)
                        out << "v " << detail::fmt_coord(c[0]) << ' ' << detail::fmt_coord(c[1])
                            << ' ' << detail::fmt_coord(c[2]) << '\n';
                    const long v = next_vertex;
                    static constexpr int kFaces[6][4] = {
                        {0, 3, 2, 1},   // bottom, -z
                        {4, 5, 6, 7},   // top, +z
                        {0, 1, 5, 4},   // -y
                        {2, 3, 7, 6},   // +y
                        {0, 4, 7, 3},   // -x
                        {1, 2, 6, 5}};  // +x
                    for (const auto& f : kFaces)
                        out << "f " << v + f[0] << ' ' << v + f[1] << ' ' << v + f[2] << ' '
                            << v + f[3] << '\n';
                    next_vertex += 8;
                }
    }
}

inline void export_voxel_listing(const std::string& path, const VoxelGrid& grid) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw export_error("cannot open for writing: " + path);
    write_voxel_listing(out, grid);
    if (!out) throw export_error("write failed: " + path);
}

inline void export_mesh_obj(const std::string& path, const VoxelGrid& grid, double voxel_edge) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw export_error("cannot open for writing: " + path);
    write_mesh_obj(out, grid, voxel_edge);
    if (!out) throw export_error("write failed: " + path);
}

}  // namespace voxevo
