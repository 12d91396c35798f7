#pragma once

#include <cstdint>
#include <cmath>

#include "gsys/special.hpp"

namespace gsys {

/// splitmix64 step; used both as a stream-derivation hash and to expand seeds.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d7592a6c03ddbdULL;
    return z ^ (z >> 31);
}

/// xoshiro256** seeded through splitmix64. Substreams are derived by hashing
/// (seed, stream ids), so replicate r of task t always sees the same stream
/// regardless of execution order or thread count.
class RngStream {
public:
    explicit RngStream(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;  // all-zero state is invalid
    }

    /// Deterministic substream for (seed, a, b), e.g. (config seed, task id, replicate).
    static RngStream substream(uint64_t seed, uint64_t a, uint64_t b = 0) {
        uint64_t h = seed;
        h = splitmix64(h) ^ (a + 0x632be59bd9b4e019ULL);
        h = splitmix64(h) ^ (b + 0x9e6c63d0876a9a47ULL);
        (void)splitmix64(h);
        return RngStream(h);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on [0,1) with 53 random bits.
    double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (std::normal_distribution is
    /// implementation-defined, so we roll the transform explicitly).
    double next_gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = 1.0 - next_uniform();  // (0,1]
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586477 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    /// Exact Poisson draw by chunked sequential inversion; O(mean) work,
    /// deterministic, valid for any nonnegative mean.
    uint64_t next_poisson(double mean) {
        uint64_t total = 0;
        while (mean > 64.0) {
            total += poisson_inversion(64.0);
            mean -= 64.0;
        }
        return total + poisson_inversion(mean);
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t poisson_inversion(double m) {
        if (m <= 0.0) return 0;
        const double u = next_uniform();
        double p = std::exp(-m);
        double cum = p;
        uint64_t k = 0;
        const uint64_t cap = static_cast<uint64_t>(m + 60.0 * std::sqrt(m) + 120.0);
        while (u > cum && k < cap) {
            ++k;
            p *= m / static_cast<double>(k);
            cum += p;
        }
        return k;
    }

    uint64_t s_[4];
    double cached_ = 0.0;
    bool have_cached_ = false;
};

/// Inverse-CDF draw from N(mean, sd^2) truncated to [lo, hi], given u in [0,1).
/// Mirrored into the lower tail when the window sits in the upper tail so that
/// CDF differences keep full precision.
inline double truncated_normal(double mean, double sd, double lo, double hi, double u) {
    if (sd == 0.0) return mean;
    double a = (lo - mean) / sd;
    double b = (hi - mean) / sd;
    bool mirrored = false;
    if (a + b > 0.0) {  // work where Phi is small
        const double na = -b, nb = -a;
        a = na;
        b = nb;
        u = 1.0 - u;
        mirrored = true;
    }
    const double fa = norm_cdf(a);
    const double fb = norm_cdf(b);
    double p = fa + u * (fb - fa);
    if (p <= 0.0) p = std::nextafter(0.0, 1.0);
    if (p >= 1.0) p = std::nextafter(1.0, 0.0);
    double z = norm_ppf(p);
    if (z < a) z = a;
    if (z > b) z = b;
    if (mirrored) z = -z;
    return mean + sd * z;
}

}  // namespace gsys
