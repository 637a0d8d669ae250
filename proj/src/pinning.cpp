#include "renew/pinning.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "renew/errors.hpp"

namespace renew {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log sum_i exp(t_i) with the usual max shift; -inf entries drop out.
double logsumexp(const std::vector<double>& t) {
    double mx = kNegInf;
    for (double v : t)
        mx = std::max(mx, v);
    if (mx == kNegInf)
        return kNegInf;
    double s = 0;
    for (double v : t)
        if (v > kNegInf)
            s += std::exp(v - mx);
    return mx + std::log(s);
}

} // namespace

PartitionTable partition(const InterArrivalLaw& law, double beta, long N) {
    if (N < 1)
        throw domain_error("partition: N must be >= 1");

    std::vector<double> lk(N + 1, kNegInf), lkbar(N + 1, kNegInf);
    for (long n = 1; n <= N; ++n)
        lk[n] = law.log_density(n);
    lkbar[0] = 0.0; // Kbar(0) := 1
    for (long n = 1; n <= N; ++n)
        lkbar[n] = law.log_tail(n);

    PartitionTable tab;
    tab.beta = beta;
    tab.N = N;
    tab.log_zc.assign(N + 1, kNegInf);
    tab.log_z.assign(N + 1, kNegInf);
    tab.log_zc[0] = 0.0;
    tab.log_z[0] = 0.0;

    std::vector<double> terms;
    terms.reserve(N + 1);
    for (long n = 1; n <= N; ++n) {
        terms.clear();
        for (long j = 0; j < n; ++j)
            if (tab.log_zc[j] > kNegInf && lk[n - j] > kNegInf)
                terms.push_back(tab.log_zc[j] + beta + lk[n - j]);
        tab.log_zc[n] = logsumexp(terms);

        terms.clear();
        for (long j = 0; j <= n; ++j)
            if (tab.log_zc[j] > kNegInf && lkbar[n - j] > kNegInf)
                terms.push_back(tab.log_zc[j] + lkbar[n - j]);
        tab.log_z[n] = logsumexp(terms);
    }
    return tab;
}

double fe_estimate(const PartitionTable& table) {
    if (table.N < 100)
        throw domain_error("fe_estimate: need N >= 100 for a meaningful 1/N limit");
    return table.log_z[table.N] / static_cast<double>(table.N);
}

double contact_fraction(const InterArrivalLaw& law, double beta, long N, double h) {
    if (!(h >= 1e-9))
        throw domain_error("contact_fraction: step h below the resolution of the "
                           "double-precision difference");
    const PartitionTable up = partition(law, beta + h, N);
    const PartitionTable dn = partition(law, beta - h, N);
    return (up.log_z[N] - dn.log_z[N]) / (2.0 * h * static_cast<double>(N));
}

} // namespace renew
