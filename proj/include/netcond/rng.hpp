#pragma once

#include <cmath>
#include <cstdint>

#include "netcond/errors.hpp"
#include "netcond/tensor.hpp"

namespace netcond {

// Deterministic 64-bit generator (splitmix64). The stream depends only on the
// seed and the call sequence, so identical seeds reproduce bit-identical
// values on every platform. Not shareable across threads; one instance per
// worker.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next_u64() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

    // Standard normal via the polar method; the paired value is discarded so
    // the state stays a pure stream position.
    double normal() noexcept {
        for (;;) {
            const double u = 2.0 * uniform01() - 1.0;
            const double v = 2.0 * uniform01() - 1.0;
            const double s = u * u + v * v;
            if (s > 0.0 && s < 1.0)
                return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) noexcept {
        // Rejection sampling keeps the result exactly uniform.
        const std::uint64_t limit = n * (UINT64_MAX / n);
        for (;;) {
            const std::uint64_t x = next_u64();
            if (x < limit) return x % n;
        }
    }

private:
    std::uint64_t state_;
};

// Stable mixing of a base seed with a stream index, used to give each work
// item its own independent generator regardless of worker assignment.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
    Rng mixer(base ^ (0x9e3779b97f4a7c15ULL + index * 0xbf58476d1ce4e5b9ULL));
    return mixer.next_u64();
}

inline Tensor gaussian_tensor(const Shape& shape, Rng& rng) {
    if (shape.empty()) throw InvalidArgument("gaussian_tensor: shape must be nonempty");
    Tensor t(shape);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.normal();
    return t;
}

// Standard-normal draw scaled to unit Euclidean length.
inline Tensor random_unit_direction(const Shape& shape, Rng& rng) {
    if (shape.empty()) throw InvalidArgument("random_unit_direction: shape must be nonempty");
    for (;;) {
        Tensor t = gaussian_tensor(shape, rng);
        double sq = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) sq += t[i] * t[i];
        const double norm = std::sqrt(sq);
        if (norm > 0.0 && std::isfinite(norm)) {
            t *= 1.0 / norm;
            return t;
        }
    }
}

} // namespace netcond
