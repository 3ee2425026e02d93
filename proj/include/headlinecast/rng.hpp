#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace hcast {

/// Deterministic random source used everywhere randomness is needed.
///
/// The engine is std::mt19937_64, whose output sequence is pinned by the
/// standard, and all derived draws (uniform doubles, bounded integers,
/// normals) are computed here with fixed arithmetic instead of the standard
/// distributions, whose output is implementation-defined. Models trained
/// with the same seed therefore reproduce across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1) with 53 random mantissa bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). Lemire multiply-shift; bias is below
    /// 2^-64 per draw and identical on every platform.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /// Gaussian via Box-Muller (cosine branch; two uniforms per draw).
    double normal(double mean, double stddev) {
        const double u1 = 1.0 - uniform01(); // (0, 1], keeps log finite
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        constexpr double two_pi = 6.283185307179586476925286766559;
        return mean + stddev * r * std::cos(two_pi * u2);
    }

    /// Fisher-Yates shuffle with draws from this engine.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
        }
    }

    /// First k entries of a random permutation of 0..n-1.
    std::vector<int> sample_indices(int n, int k) {
        std::vector<int> idx(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
        const int m = k < n ? k : n;
        for (int i = 0; i < m; ++i) {
            const auto j = i + static_cast<int>(below(static_cast<std::uint64_t>(n - i)));
            std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
        }
        idx.resize(static_cast<std::size_t>(m));
        return idx;
    }

private:
    std::mt19937_64 gen_;
};

} // namespace hcast
