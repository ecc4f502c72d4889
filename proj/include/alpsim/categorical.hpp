#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "alpsim/errors.hpp"

namespace alpsim {

// A categorical distribution is a vector of non-negative reals summing to 1.
using Categorical = std::vector<double>;

// Shared tolerance for "sums to 1" checks across the whole model layer.
inline constexpr double kDistributionTolerance = 1e-9;

// Marginal likelihoods below this are treated as numerically extinct.
inline constexpr double kEvidenceFloor = 1e-300;

inline bool is_distribution(std::span<const double> p,
                            double tol = kDistributionTolerance) {
    if (p.empty()) return false;
    double sum = 0.0;
    for (double v : p) {
        if (!std::isfinite(v) || v < 0.0) return false;
        sum += v;
    }
    return std::abs(sum - 1.0) <= tol;
}

inline double sum(std::span<const double> p) {
    return std::accumulate(p.begin(), p.end(), 0.0);
}

// Normalizes in place; throws if the total mass is zero or not finite.
inline void normalize(std::vector<double>& p) {
    const double total = sum(p);
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw DegenerateEvidenceError(
            "cannot normalize: total mass " + std::to_string(total));
    }
    for (double& v : p) v /= total;
}

inline Categorical normalized(std::vector<double> p) {
    normalize(p);
    return p;
}

// Shannon entropy in nats, with the 0·ln 0 = 0 convention.
inline double entropy(std::span<const double> p) {
    double h = 0.0;
    for (double v : p)
        if (v > 0.0) h -= v * std::log(v);
    return h;
}

// KL(p ‖ q) in nats. Infinite when p puts mass where q has none.
inline double kl_divergence(std::span<const double> p,
                            std::span<const double> q) {
    if (p.size() != q.size())
        throw DimensionError("kl_divergence: size mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) {
            if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
            d += p[i] * std::log(p[i] / q[i]);
        }
    }
    return d;
}

// Max-shifted softmax; defined for any finite input.
inline Categorical softmax(std::span<const double> logits) {
    if (logits.empty()) throw DimensionError("softmax: empty input");
    const double m = *std::max_element(logits.begin(), logits.end());
    Categorical out(logits.size());
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - m);
        total += out[i];
    }
    for (double& v : out) v /= total;
    return out;
}

inline double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace alpsim
