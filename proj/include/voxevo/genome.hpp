#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "voxevo/rng.hpp"

namespace voxevo {

using Vec3 = std::array<double, 3>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr int kMaterialCount = 5;

struct shape_mismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Random Fourier-feature encoding: gamma(v) = [cos(2*pi*B*v), sin(2*pi*B*v)],
// with B entries ~ N(0, sigma^2). m frequency rows over d=3 spatial dims.
struct EncodingSpec {
    std::size_t m = 32;
    std::size_t d = 3;
    double sigma = 1.0;

    void validate() const {
        if (m < 1) throw std::invalid_argument("EncodingSpec: m must be >= 1");
        if (d != 3) throw std::invalid_argument("EncodingSpec: d must be 3");
        if (!(sigma > 0.0)) throw std::invalid_argument("EncodingSpec: sigma must be > 0");
    }
};

// Dense affine layer, weights row-major (out x in).
struct Layer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> w;
    std::vector<double> b;
};

// Spatial-query model: frozen encoding matrix B plus an MLP with tanh hidden
// layers and two heads, 5 material logits (softmax) and 1 weight logit
// (sigmoid). B is sampled once and never mutated; lineages inherit it.
struct Genome {
    EncodingSpec spec;
    std::vector<double> b_matrix;  // m x 3, row-major
    std::vector<Layer> hidden;
    Layer head_material;  // -> 5 logits
    Layer head_weight;    // -> 1 logit

    // Evolvable tensors in fixed order: hidden W/b pairs, then both heads.
    // B is deliberately excluded.
    std::vector<const std::vector<double>*> param_tensors() const {
        std::vector<const std::vector<double>*> t;
        for (const auto& l : hidden) {
            t.push_back(&l.w);
            t.push_back(&l.b);
        }
        t.push_back(&head_material.w);
        t.push_back(&head_material.b);
        t.push_back(&head_weight.w);
        t.push_back(&head_weight.b);
        return t;
    }

    std::vector<std::vector<double>*> param_tensors() {
        std::vector<std::vector<double>*> t;
        for (auto& l : hidden) {
            t.push_back(&l.w);
            t.push_back(&l.b);
        }
        t.push_back(&head_material.w);
        t.push_back(&head_material.b);
        t.push_back(&head_weight.w);
        t.push_back(&head_weight.b);
        return t;
    }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto* t : param_tensors()) n += t->size();
        return n;
    }

    bool same_architecture(const Genome& other) const {
        if (spec.m != other.spec.m || hidden.size() != other.hidden.size()) return false;
        for (std::size_t i = 0; i < hidden.size(); ++i)
            if (hidden[i].in != other.hidden[i].in || hidden[i].out != other.hidden[i].out) return false;
        return head_material.in == other.head_material.in && head_weight.in == other.head_weight.in;
    }
};

// Softmax probabilities over the five materials (order: Empty, MuscleExpand,
// MuscleContract, SoftTissue, HardBone) plus the sigmoid weight.
struct MaterialQuery {
    std::array<double, kMaterialCount> probs{};
    double weight = 0.5;
};

namespace detail {

inline Layer init_layer(std::size_t in, std::size_t out, Rng& rng) {
    Layer l;
    l.in = in;
    l.out = out;
    l.w.resize(in * out);
    l.b.assign(out, 0.0);
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    for (auto& x : l.w) x = (2.0 * rng.uniform01() - 1.0) * limit;
    return l;
}

// y = W x + b
inline void affine(const Layer& l, const std::vector<double>& x, std::vector<double>& y) {
    y.assign(l.out, 0.0);
    for (std::size_t r = 0; r < l.out; ++r) {
        const double* wr = l.w.data() + r * l.in;
        double acc = l.b[r];
        for (std::size_t c = 0; c < l.in; ++c) acc += wr[c] * x[c];
        y[r] = acc;
    }
}

inline double stable_sigmoid(double z) {
    double s;
    if (z >= 0.0) {
        s = 1.0 / (1.0 + std::exp(-z));
    } else {
        const double e = std::exp(z);
        s = e / (1.0 + e);
    }
    // keep strictly inside (0,1) even for extreme logits
    return std::clamp(s, 1e-12, 1.0 - 1e-12);
}

}  // namespace detail

// Draw order is fixed and documented: B row-major (m x 3, each entry
// sigma * N(0,1)), then each layer's weights row-major from
// U(-sqrt(6/(fan_in+fan_out)), +sqrt(6/(fan_in+fan_out))) with zero biases,
// hidden layers first, then the material head, then the weight head.
inline Genome sample_genome(const EncodingSpec& spec, const std::vector<std::size_t>& hidden_widths,
                            std::uint64_t seed) {
    spec.validate();
    for (std::size_t w : hidden_widths)
        if (w < 1) throw std::invalid_argument("sample_genome: hidden widths must be >= 1");

    Rng rng(seed);
    Genome g;
    g.spec = spec;
    g.b_matrix.resize(spec.m * spec.d);
    for (auto& x : g.b_matrix) x = spec.sigma * rng.normal();

    std::size_t in = 2 * spec.m;
    for (std::size_t w : hidden_widths) {
        g.hidden.push_back(detail::init_layer(in, w, rng));
        in = w;
    }
    g.head_material = detail::init_layer(in, kMaterialCount, rng);
    g.head_weight = detail::init_layer(in, 1, rng);
    return g;
}

// gamma(v) = [cos(2*pi*B*v), sin(2*pi*B*v)]; length 2m, every entry in [-1,1].
inline std::vector<double> gaussian_encode(const Vec3& v, const std::vector<double>& b_matrix,
                                           std::size_t m) {
    std::vector<double> out(2 * m);
    for (std::size_t r = 0; r < m; ++r) {
        const double* row = b_matrix.data() + r * 3;
        const double phase = kTwoPi * (row[0] * v[0] + row[1] * v[1] + row[2] * v[2]);
        out[r] = std::cos(phase);
        out[m + r] = std::sin(phase);
    }
    return out;
}

inline std::vector<double> gaussian_encode(const Vec3& v, const Genome& g) {
    return gaussian_encode(v, g.b_matrix, g.spec.m);
}

// Pure spatial query: encode, run the MLP, softmax the material head
// (max-subtracted) and sigmoid the weight head.
inline MaterialQuery forward(const Genome& g, const Vec3& v) {
    std::vector<double> x = gaussian_encode(v, g);
    std::vector<double> y;
    for (const auto& l : g.hidden) {
        detail::affine(l, x, y);
        for (auto& e : y) e = std::tanh(e);
        x.swap(y);
    }

    std::vector<double> logits;
    detail::affine(g.head_material, x, logits);
    const double mx = *std::max_element(logits.begin(), logits.end());
    MaterialQuery q;
    double sum = 0.0;
    for (int i = 0; i < kMaterialCount; ++i) {
        q.probs[i] = std::exp(logits[i] - mx);
        sum += q.probs[i];
    }
    for (auto& p : q.probs) p /= sum;

    std::vector<double> wl;
    detail::affine(g.head_weight, x, wl);
    q.weight = detail::stable_sigmoid(wl[0]);
    return q;
}

}  // namespace voxevo
