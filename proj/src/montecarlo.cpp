#include "renew/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "renew/errors.hpp"

namespace renew {

namespace {

// Per-path generator: a splitmix64 expansion of (seed, path index) seeds
// xoshiro256++, so path p draws the same numbers no matter which worker
// runs it.
struct Xoshiro {
    std::uint64_t s[4];

    static std::uint64_t splitmix(std::uint64_t& x) {
        x += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    Xoshiro(std::uint64_t seed, std::uint64_t path) {
        std::uint64_t x = seed ^ (path * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL);
        for (auto& w : s)
            w = splitmix(x);
        if (!(s[0] | s[1] | s[2] | s[3]))
            s[0] = 1;
    }

    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
        const std::uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }

    double u01() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }
};

} // namespace

McResult mc_sample(const TiltedLaw& tilted, long horizon, long n_paths,
                   std::uint64_t seed, int threads) {
    if (horizon < 1)
        throw domain_error("mc: horizon must be >= 1");
    if (n_paths < 1)
        throw domain_error("mc: need at least one path");

    const std::vector<double> kb = tilted.densities_double(1e-15);
    const long gmax = static_cast<long>(kb.size()) - 1;
    std::vector<double> cdf(gmax + 1, 0.0);
    for (long g = 1; g <= gmax; ++g)
        cdf[g] = cdf[g - 1] + kb[g];
    cdf[gmax] = 1.0; // absorb the truncation renormalization exactly

    if (threads <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        threads = static_cast<int>(std::clamp(hw, 1u, 16u));
    }
    if (n_paths < 4096)
        threads = 1;

    const auto run = [&](long p_lo, long p_hi, std::vector<long>& counts) {
        counts.assign(horizon + 1, 0);
        for (long p = p_lo; p < p_hi; ++p) {
            Xoshiro rng(seed, static_cast<std::uint64_t>(p));
            long pos = 0;
            counts[0] += 1;
            while (pos <= horizon) {
                const double u = rng.u01();
                const long gap =
                    std::upper_bound(cdf.begin() + 1, cdf.end(), u) - cdf.begin();
                pos += std::min(gap, gmax);
                if (pos <= horizon)
                    counts[pos] += 1;
            }
        }
    };

    std::vector<std::vector<long>> partial(threads);
    if (threads == 1) {
        run(0, n_paths, partial[0]);
    } else {
        std::vector<std::thread> pool;
        const long chunk = (n_paths + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const long lo = t * chunk;
            const long hi = std::min<long>(n_paths, lo + chunk);
            pool.emplace_back([&, lo, hi, t] { run(lo, std::max(lo, hi), partial[t]); });
        }
        for (auto& th : pool)
            th.join();
    }

    McResult r;
    r.horizon = horizon;
    r.n_paths = n_paths;
    r.seed = seed;
    r.truncation = gmax;
    r.u_hat.assign(horizon + 1, 0.0);
    r.se.assign(horizon + 1, 0.0);
    std::vector<long> total(horizon + 1, 0);
    for (const auto& c : partial)
        for (long n = 0; n <= horizon && n < static_cast<long>(c.size()); ++n)
            total[n] += c[n];
    const double np = static_cast<double>(n_paths);
    for (long n = 0; n <= horizon; ++n) {
        const double p = static_cast<double>(total[n]) / np;
        r.u_hat[n] = p;
        r.se[n] = std::sqrt(p * (1.0 - p) / np);
    }
    return r;
}

} // namespace renew
