#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace voxevo {

// Seedable generator with fully explicit draw algorithms. Distributions are
// computed here (not via std::*_distribution, whose internal state and draw
// counts are implementation-defined), so serializing the engine state alone
// captures the whole generator and checkpoints replay bit-exactly.
class Rng {
  public:
    Rng() : engine_(0) {}
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1)
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // standard normal, Box-Muller on two fresh draws; no cached state
    double normal() {
        double u1 = (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;  // (0,1)
        double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // uniform index in [0, n), unbiased via rejection
    std::size_t index(std::size_t n) {
        const std::uint64_t threshold = (0 - static_cast<std::uint64_t>(n)) % n;
        for (;;) {
            std::uint64_t r = engine_();
            if (r >= threshold) return static_cast<std::size_t>(r % n);
        }
    }

    std::string state() const {
        std::ostringstream os;
        os << engine_;
        return os.str();
    }

    void set_state(const std::string& s) {
        std::istringstream is(s);
        is >> engine_;
    }

    bool operator==(const Rng& other) const { return engine_ == other.engine_; }

  private:
    std::mt19937_64 engine_;
};

}  // namespace voxevo
