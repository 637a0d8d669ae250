#pragma once

#include <vector>

#include "renew/laws.hpp"

namespace renew {

// Finite-volume pinning partition functions, stored as logarithms since
// Z grows like e^{b(beta) N}.
//   Zc(n) = 1_{n=0} + sum_{j<n} Zc(j) e^{beta} K(n-j)   (endpoint pinned)
//   Z(n)  = sum_{j<=n} Zc(j) Kbar(n-j), Kbar(0) := 1    (free endpoint)
struct PartitionTable {
    double beta = 0;
    long N = 0;
    std::vector<double> log_zc; // log Zc(0..N)
    std::vector<double> log_z;  // log Z(0..N)
};

PartitionTable partition(const InterArrivalLaw& law, double beta, long N);

// (1/N) log Z(N); converges to free_energy(beta) with O(log N / N) error.
double fe_estimate(const PartitionTable& table);

// Expected contact density E[|tau cap (0,N]|]/N, by the central finite
// difference [log Z_{N,beta+h} - log Z_{N,beta-h}] / (2 h N). Throws
// domain_error when h is below the double-precision resolution of the
// difference (h < 1e-9).
double contact_fraction(const InterArrivalLaw& law, double beta, long N,
                        double h = 1e-4);

} // namespace renew
