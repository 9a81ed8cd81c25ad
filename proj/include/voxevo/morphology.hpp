#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "voxevo/genome.hpp"

namespace voxevo {

struct empty_robot : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Material : std::uint8_t {
    Empty = 0,
    MuscleExpand = 1,
    MuscleContract = 2,
    SoftTissue = 3,
    HardBone = 4,
};

inline bool is_muscle(Material m) {
    return m == Material::MuscleExpand || m == Material::MuscleContract;
}

inline const char* material_name(Material m) {
    switch (m) {
        case Material::Empty: return "empty";
        case Material::MuscleExpand: return "muscle_expand";
        case Material::MuscleContract: return "muscle_contract";
        case Material::SoftTissue: return "soft_tissue";
        case Material::HardBone: return "hard_bone";
    }
    return "?";
}

// Table of material constants; per-voxel sigmoid weights multiply these.
struct MaterialTable {
    double k_muscle = 2e3;        // N/m
    double k_soft = 1e3;          // N/m
    double k_bone = 1e4;          // N/m
    double damping_ratio = 0.1;   // dimensionless, fraction of critical
    double amp_max = 0.25;        // rest-length modulation bound
    double phase_max = M_PI;      // rad
    double voxel_edge = 0.1;      // m
    double mass_per_vertex = 0.1; // kg, per lattice vertex

    double base_stiffness(Material m) const {
        switch (m) {
            case Material::MuscleExpand:
            case Material::MuscleContract: return k_muscle;
            case Material::SoftTissue: return k_soft;
            case Material::HardBone: return k_bone;
            case Material::Empty: break;
        }
        return 0.0;
    }
};

inline constexpr double kMinVoxelWeight = 0.1;

struct Cell {
    Material material = Material::Empty;
    double weight = kMinVoxelWeight;
};

// W x H x D lattice of material cells; linear index runs x fastest:
// idx = x + w*(y + h*z).
struct VoxelGrid {
    int w = 0, h = 0, d = 0;
    std::vector<Cell> cells;

    VoxelGrid() = default;
    VoxelGrid(int w_, int h_, int d_) : w(w_), h(h_), d(d_), cells(static_cast<std::size_t>(w_) * h_ * d_) {}

    int index(int x, int y, int z) const { return x + w * (y + h * z); }
    Cell& at(int x, int y, int z) { return cells[index(x, y, z)]; }
    const Cell& at(int x, int y, int z) const { return cells[index(x, y, z)]; }
    std::size_t size() const { return cells.size(); }
    bool same_dims(const VoxelGrid& o) const { return w == o.w && h == o.h && d == o.d; }

    int count_non_empty() const {
        int n = 0;
        for (const auto& c : cells)
            if (c.material != Material::Empty) ++n;
        return n;
    }

    bool has_muscle() const {
        for (const auto& c : cells)
            if (is_muscle(c.material)) return true;
        return false;
    }
};

// Sinusoidal rest-length modulation attached to muscle springs.
struct Actuation {
    double sign = 1.0;       // +1 expand, -1 contract
    double amplitude = 0.0;  // in [0, amp_max]
    double phase = 0.0;      // in [0, phase_max]
};

struct Spring {
    int i = 0, j = 0;           // mass indices, i < j
    double k = 0.0;             // N/m
    double rest0 = 0.0;         // m, endpoint distance at construction
    double damping_ratio = 0.0;
    std::optional<Actuation> act;
};

struct PointMass {
    Vec3 pos{};
    Vec3 vel{};
    double mass = 0.0;
};

struct GroundPlane {
    double k = 1e5;             // N/m, penalty stiffness
    double damping_ratio = 0.1;
    double mu_static = 0.6;
    double mu_kinetic = 1.0;
};

struct MassSpringSystem {
    std::vector<PointMass> masses;
    std::vector<Spring> springs;
    GroundPlane plane;
};

// Query the genome at every voxel center ((x+0.5)/w, (y+0.5)/h, (z+0.5)/d).
// Material is the argmax of the softmax probs (ties to the lowest category
// index, so an all-uniform query decodes to Empty); weight is the sigmoid
// output clamped into [kMinVoxelWeight, 1].
inline VoxelGrid decode(const Genome& g, int w, int h, int d) {
    if (w < 1 || h < 1 || d < 1) throw std::invalid_argument("decode: dims must be positive");
    VoxelGrid grid(w, h, d);
    for (int z = 0; z < d; ++z)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const Vec3 v{(x + 0.5) / w, (y + 0.5) / h, (z + 0.5) / d};
                const MaterialQuery q = forward(g, v);
                int best = 0;
                for (int i = 1; i < kMaterialCount; ++i)
                    if (q.probs[i] > q.probs[best]) best = i;
                Cell& c = grid.at(x, y, z);
                c.material = static_cast<Material>(best);
                c.weight = std::clamp(q.weight, kMinVoxelWeight, 1.0);
            }
    return grid;
}

// Keep only the largest 6-connected component of non-Empty voxels; ties go to
// the component containing the lowest linear index. Everything else becomes
// Empty.
inline VoxelGrid largest_component(const VoxelGrid& grid) {
    const int n = static_cast<int>(grid.size());
    std::vector<int> label(n, -1);
    int best_label = -1;
    int best_count = 0;

    std::vector<int> stack;
    int next_label = 0;
    for (int seed = 0; seed < n; ++seed) {
        if (label[seed] >= 0 || grid.cells[seed].material == Material::Empty) continue;
        // seed is this component's lowest linear index: anything lower was
        // already labeled by an earlier scan position
        int count = 0;
        stack.assign(1, seed);
        label[seed] = next_label;
        while (!stack.empty()) {
            const int idx = stack.back();
            stack.pop_back();
            ++count;
            const int x = idx % grid.w;
            const int y = (idx / grid.w) % grid.h;
            const int z = idx / (grid.w * grid.h);
            const int dx[6] = {1, -1, 0, 0, 0, 0};
            const int dy[6] = {0, 0, 1, -1, 0, 0};
            const int dz[6] = {0, 0, 0, 0, 1, -1};
            for (int k = 0; k < 6; ++k) {
                const int nx = x + dx[k], ny = y + dy[k], nz = z + dz[k];
                if (nx < 0 || nx >= grid.w || ny < 0 || ny >= grid.h || nz < 0 || nz >= grid.d) continue;
                const int nidx = grid.index(nx, ny, nz);
                if (label[nidx] >= 0 || grid.cells[nidx].material == Material::Empty) continue;
                label[nidx] = next_label;
                stack.push_back(nidx);
            }
        }
        if (count > best_count) {  // strict: first (lowest-index) component wins ties
            best_count = count;
            best_label = next_label;
        }
        ++next_label;
    }

    VoxelGrid out = grid;
    for (int i = 0; i < n; ++i)
        if (grid.cells[i].material != Material::Empty && label[i] != best_label)
            out.cells[i].material = Material::Empty;
    return out;
}

// Build the spring-mass network for a grid. Masses sit at the lattice
// vertices of occupied voxels (0.1 kg each regardless of sharing); every
// occupied voxel contributes its C(8,2)=28 vertex pairs. Springs shared by
// several voxels are merged: k is the arithmetic mean of the contributions
// (weight x base stiffness), actuation comes from the contributing muscle
// voxel with the lowest linear index. The body is dropped so its lowest
// vertex sits on z = 0.
inline MassSpringSystem build_mass_spring(const VoxelGrid& grid, const MaterialTable& table,
                                          const GroundPlane& plane = GroundPlane{}) {
    const int vw = grid.w + 1, vh = grid.h + 1;
    auto vertex_key = [&](int x, int y, int z) { return x + vw * (y + vh * z); };

    std::vector<int> keys;
    for (int z = 0; z < grid.d; ++z)
        for (int y = 0; y < grid.h; ++y)
            for (int x = 0; x < grid.w; ++x) {
                if (grid.at(x, y, z).material == Material::Empty) continue;
                for (int c = 0; c < 8; ++c)
                    keys.push_back(vertex_key(x + (c & 1), y + ((c >> 1) & 1), z + ((c >> 2) & 1)));
            }
    if (keys.empty()) throw empty_robot("build_mass_spring: no occupied voxel");

    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    std::map<int, int> key_to_mass;
    for (std::size_t i = 0; i < keys.size(); ++i) key_to_mass[keys[i]] = static_cast<int>(i);

    MassSpringSystem sys;
    sys.plane = plane;
    sys.masses.resize(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
        const int key = keys[i];
        const int x = key % vw;
        const int y = (key / vw) % vh;
        const int z = key / (vw * vh);
        sys.masses[i].pos = {x * table.voxel_edge, y * table.voxel_edge, z * table.voxel_edge};
        sys.masses[i].mass = table.mass_per_vertex;
    }

    struct Accum {
        double k_sum = 0.0;
        int count = 0;
        std::optional<Actuation> act;  // from lowest-index muscle contributor
    };
    std::map<std::pair<int, int>, Accum> merged;

    for (int z = 0; z < grid.d; ++z)
        for (int y = 0; y < grid.h; ++y)
            for (int x = 0; x < grid.w; ++x) {
                const Cell& cell = grid.at(x, y, z);
                if (cell.material == Material::Empty) continue;
                int corner[8];
                for (int c = 0; c < 8; ++c)
                    corner[c] = key_to_mass[vertex_key(x + (c & 1), y + ((c >> 1) & 1), z + ((c >> 2) & 1))];
                const double k_contrib = cell.weight * table.base_stiffness(cell.material);
                for (int p = 0; p < 8; ++p)
                    for (int q = p + 1; q < 8; ++q) {
                        auto key = std::minmax(corner[p], corner[q]);
                        Accum& a = merged[{key.first, key.second}];
                        a.k_sum += k_contrib;
                        a.count += 1;
                        // voxel scan runs in increasing linear index, so the
                        // first muscle contributor seen is the lowest-index one
                        if (is_muscle(cell.material) && !a.act) {
                            a.act = Actuation{cell.material == Material::MuscleExpand ? 1.0 : -1.0,
                                              cell.weight * table.amp_max, cell.weight * table.phase_max};
                        }
                    }
            }

    double min_z = sys.masses[0].pos[2];
    for (const auto& m : sys.masses) min_z = std::min(min_z, m.pos[2]);
    for (auto& m : sys.masses) m.pos[2] -= min_z;

    sys.springs.reserve(merged.size());
    for (const auto& [ij, acc] : merged) {
        Spring s;
        s.i = ij.first;
        s.j = ij.second;
        s.k = acc.k_sum / acc.count;
        const Vec3& a = sys.masses[s.i].pos;
        const Vec3& b = sys.masses[s.j].pos;
        s.rest0 = std::sqrt((b[0] - a[0]) * (b[0] - a[0]) + (b[1] - a[1]) * (b[1] - a[1]) +
                            (b[2] - a[2]) * (b[2] - a[2]));
        s.damping_ratio = table.damping_ratio;
        s.act = acc.act;
        sys.springs.push_back(s);
    }
    return sys;
}

}  // namespace voxevo
