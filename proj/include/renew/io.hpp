#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "renew/asympt.hpp"
#include "renew/montecarlo.hpp"
#include "renew/pinning.hpp"
#include "renew/series.hpp"

namespace renew::io {

inline constexpr const char* version = "0.1.0";

// Shortest decimal that round-trips a double.
std::string dec(double x);

// Writes content to a temporary file in the target directory, then renames
// it over path, so readers never observe a partial file.
void atomic_write(const std::string& path, const std::string& content);

// CSV tables: comma separated, header row, LF endings, numerics as
// decimal strings at full stored precision.
std::string series_csv(const RenewalSeries& s);       // n,u,d,grad_u
std::string mc_csv(const McResult& r);                // n,u_hat,se
std::string xi_csv(const std::vector<XiPoint>& t);    // b,xi,b_times_xi,rate,fit_r2,oscillatory
std::string rate_csv(double b, const RateReport& r);  // same columns, one row
std::string pinning_csv(const PartitionTable& t);     // n,log_Zc,log_Z

// Single-object run report: {"command", "params", "results", "provenance"}
// with provenance {version, precision_bits, seed} (seed omitted when < 0).
nlohmann::json envelope(const std::string& command, nlohmann::json params,
                        nlohmann::json results, int precision_bits = 0,
                        long long seed = -1);

} // namespace renew::io
