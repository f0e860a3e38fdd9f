#pragma once

// Counter-based random variates: a Philox-4x32-10 keyed permutation maps
// (master_seed, replica_id, sigma_index) to uniform words, and the quantile
// transform turns them into Gaussians. The variate for a given index triple
// never depends on worker count, chunking, or call order.

#include <cstdint>

#include "remlab/gauss.hpp"

namespace remlab {

namespace detail {

struct Philox4x32State {
    uint32_t c[4];
    uint32_t k[2];
};

inline void philox_round(Philox4x32State& s) {
    constexpr uint64_t M0 = 0xD2511F53, M1 = 0xCD9E8D57;
    uint64_t p0 = M0 * s.c[0];
    uint64_t p1 = M1 * s.c[2];
    uint32_t h0 = static_cast<uint32_t>(p0 >> 32), l0 = static_cast<uint32_t>(p0);
    uint32_t h1 = static_cast<uint32_t>(p1 >> 32), l1 = static_cast<uint32_t>(p1);
    uint32_t c0 = h1 ^ s.c[1] ^ s.k[0];
    uint32_t c2 = h0 ^ s.c[3] ^ s.k[1];
    s.c[0] = c0;
    s.c[1] = l1;
    s.c[2] = c2;
    s.c[3] = l0;
    s.k[0] += 0x9E3779B9;  // golden ratio
    s.k[1] += 0xBB67AE85;  // sqrt(3)-1
}

// Philox-4x32 with 10 rounds: 128-bit counter -> 128 random bits.
inline void philox4x32(uint64_t key, uint64_t ctr_lo, uint64_t ctr_hi, uint64_t out[2]) {
    Philox4x32State s;
    s.c[0] = static_cast<uint32_t>(ctr_lo);
    s.c[1] = static_cast<uint32_t>(ctr_lo >> 32);
    s.c[2] = static_cast<uint32_t>(ctr_hi);
    s.c[3] = static_cast<uint32_t>(ctr_hi >> 32);
    s.k[0] = static_cast<uint32_t>(key);
    s.k[1] = static_cast<uint32_t>(key >> 32);
    for (int r = 0; r < 10; ++r) philox_round(s);
    out[0] = s.c[0] | (static_cast<uint64_t>(s.c[1]) << 32);
    out[1] = s.c[2] | (static_cast<uint64_t>(s.c[3]) << 32);
}

// 64 random bits -> uniform in (0,1): (w' + 1/2) / 2^53 on the top 53 bits.
// Exact in double arithmetic and never returns an endpoint.
inline double to_unit_interval(uint64_t w) {
    return (static_cast<double>(w >> 11) + 0.5) * 0x1p-53;
}

}  // namespace detail

struct RngSpec {
    uint64_t master_seed = 0;
};

// Production Gaussian source. One Philox block yields the pair of variates
// for sigma indices (2m, 2m+1), so sampling works in even-aligned pairs.
class PhiloxGaussianSource {
  public:
    explicit PhiloxGaussianSource(RngSpec spec) : seed_(spec.master_seed) {}

    // Variates for sigma = base and base+1; base must be even.
    void pair(uint64_t replica_id, uint64_t sigma_base, double out[2]) const {
        uint64_t words[2];
        detail::philox4x32(seed_, sigma_base >> 1, replica_id, words);
        out[0] = gauss_quantile(detail::to_unit_interval(words[0]));
        out[1] = gauss_quantile(detail::to_unit_interval(words[1]));
    }

    double operator()(uint64_t replica_id, uint64_t sigma) const {
        double v[2];
        pair(replica_id, sigma & ~uint64_t{1}, v);
        return v[sigma & 1];
    }

  private:
    uint64_t seed_;
};

// Test hook: every variate equals a fixed constant.
class ConstantGaussianSource {
  public:
    explicit ConstantGaussianSource(double value = 0.0) : value_(value) {}
    void pair(uint64_t, uint64_t, double out[2]) const { out[0] = out[1] = value_; }
    double operator()(uint64_t, uint64_t) const { return value_; }

  private:
    double value_;
};

}  // namespace remlab
