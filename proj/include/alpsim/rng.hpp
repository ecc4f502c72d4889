#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "alpsim/errors.hpp"

namespace alpsim {

// Seeded random stream with explicit, implementation-independent mappings.
// std::mt19937_64's output sequence is specified by the standard, and the
// uniform/categorical mappings below avoid the stdlib distributions (whose
// algorithms are implementation-defined), so two runs with the same seed
// produce identical draws on any platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Index drawn from an (unnormalized-tolerant) categorical via a CDF walk.
    int categorical(std::span<const double> weights) {
        if (weights.empty()) throw DimensionError("categorical: empty weights");
        double total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0.0))
            throw DegenerateEvidenceError("categorical: zero total weight");
        double u = uniform() * total;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            u -= weights[i];
            if (u < 0.0) return static_cast<int>(i);
        }
        return static_cast<int>(weights.size()) - 1;  // rounding tail
    }

private:
    std::mt19937_64 engine_;
};

// Per-run seed derivation for sweeps: grid point i uses base + i.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return base + index;
}

}  // namespace alpsim
