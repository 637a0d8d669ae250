#pragma once

#include <cstdint>
#include <vector>

#include "renew/laws.hpp"

namespace renew {

struct McResult {
    long horizon = 0;
    long n_paths = 0;
    std::uint64_t seed = 0;
    long truncation = 0; // largest inter-arrival kept in the sampling table
    std::vector<double> u_hat; // visit frequency of each site 0..horizon
    std::vector<double> se;    // binomial standard error per site
};

// Simulates n_paths renewal paths of the tilted law by inverse-CDF sampling
// over the support truncated where the tail drops below 1e-15 (renormalized).
// Streams are seeded per path from (seed, path index), so results are
// bitwise identical for a given seed regardless of thread count.
// threads == 0 picks a hardware-based default.
McResult mc_sample(const TiltedLaw& tilted, long horizon, long n_paths,
                   std::uint64_t seed, int threads = 0);

} // namespace renew
