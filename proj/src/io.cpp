#include "renew/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

#include <stdlib.h> // mkstemp
#include <unistd.h>

#include "renew/errors.hpp"
#include "renew/precision.hpp"

namespace renew::io {

std::string dec(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    // prefer the shorter form when it round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char shorter[40];
        std::snprintf(shorter, sizeof shorter, "%.*g", prec, x);
        if (std::strtod(shorter, nullptr) == x)
            return shorter;
    }
    return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp.XXXXXX";
    std::string tmpbuf(tmp);
    const int fd = mkstemp(tmpbuf.data());
    if (fd < 0)
        throw std::runtime_error("atomic_write: cannot create temporary file near " + path);
    FILE* f = fdopen(fd, "wb");
    if (!f)
        throw std::runtime_error("atomic_write: fdopen failed for " + tmpbuf);
    const size_t written = std::fwrite(content.data(), 1, content.size(), f);
    const bool flushed = std::fclose(f) == 0;
    if (written != content.size() || !flushed) {
        std::remove(tmpbuf.c_str());
        throw std::runtime_error("atomic_write: short write to " + tmpbuf);
    }
    if (std::rename(tmpbuf.c_str(), path.c_str()) != 0) {
        std::remove(tmpbuf.c_str());
        throw std::runtime_error("atomic_write: cannot rename onto " + path);
    }
}

std::string series_csv(const RenewalSeries& s) {
    std::string out = "n,u,d,grad_u\n";
    for (long n = 0; n <= s.n_max; ++n) {
        out += std::to_string(n);
        out += ',';
        out += decimal_string(s.u[n]);
        out += ',';
        out += decimal_string(s.d[n]);
        out += ',';
        out += decimal_string(s.grad[n]);
        out += '\n';
    }
    return out;
}

std::string mc_csv(const McResult& r) {
    std::string out = "n,u_hat,se\n";
    for (long n = 0; n <= r.horizon; ++n) {
        out += std::to_string(n);
        out += ',';
        out += dec(r.u_hat[n]);
        out += ',';
        out += dec(r.se[n]);
        out += '\n';
    }
    return out;
}

namespace {

void xi_row(std::string& out, double b, double xi, double b_times_xi, double rate,
            double fit_r2, bool oscillatory) {
    out += dec(b);
    out += ',';
    out += dec(xi);
    out += ',';
    out += dec(b_times_xi);
    out += ',';
    out += dec(rate);
    out += ',';
    out += dec(fit_r2);
    out += ',';
    out += oscillatory ? "true" : "false";
    out += '\n';
}

} // namespace

std::string xi_csv(const std::vector<XiPoint>& t) {
    std::string out = "b,xi,b_times_xi,rate,fit_r2,oscillatory\n";
    for (const XiPoint& p : t)
        xi_row(out, p.b, p.xi, p.b_times_xi, p.rate, p.fit_r2, p.oscillatory);
    return out;
}

std::string rate_csv(double b, const RateReport& r) {
    std::string out = "b,xi,b_times_xi,rate,fit_r2,oscillatory\n";
    xi_row(out, b, 1.0 / r.rate, b / r.rate, r.rate, r.fit_r2, r.oscillatory);
    return out;
}

std::string pinning_csv(const PartitionTable& t) {
    std::string out = "n,log_Zc,log_Z\n";
    for (long n = 0; n <= t.N; ++n) {
        out += std::to_string(n);
        out += ',';
        out += dec(t.log_zc[n]);
        out += ',';
        out += dec(t.log_z[n]);
        out += '\n';
    }
    return out;
}

nlohmann::json envelope(const std::string& command, nlohmann::json params,
                        nlohmann::json results, int precision_bits, long long seed) {
    nlohmann::json prov;
    prov["version"] = version;
    if (precision_bits > 0)
        prov["precision_bits"] = precision_bits;
    if (seed >= 0)
        prov["seed"] = seed;
    return nlohmann::json{{"command", command},
                          {"params", std::move(params)},
                          {"results", std::move(results)},
                          {"provenance", std::move(prov)}};
}

} // namespace renew::io
