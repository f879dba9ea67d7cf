#pragma once

#include <cstdint>
#include <vector>

namespace sigver {

// Deterministic RNG with identical output on every platform/stdlib.
// std::normal_distribution is implementation-defined, which would break the
// byte-identical reproducibility contract, so the generator (xoshiro256**),
// the seeding (splitmix64) and the normal transform (Box-Muller) are fixed
// here.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform in [0, 1), 53-bit resolution.
    double next_double();

    // Uniform integer in [0, n), rejection-sampled (unbiased). n > 0.
    std::uint64_t uniform_int(std::uint64_t n);

    // Standard normal via Box-Muller (pairs cached).
    double normal();
    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Fisher-Yates permutation of 0..n-1.
    std::vector<int> permutation(int n);

    // k distinct values from 0..n-1 in draw order (partial Fisher-Yates).
    std::vector<int> sample_without_replacement(int n, int k);

    // Derive an independent substream seed from (base, index).
    static std::uint64_t mix(std::uint64_t base, std::uint64_t index);

  private:
    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace sigver
