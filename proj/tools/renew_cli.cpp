#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "renew/asympt.hpp"
#include "renew/errors.hpp"
#include "renew/io.hpp"
#include "renew/laws.hpp"
#include "renew/montecarlo.hpp"
#include "renew/pinning.hpp"
#include "renew/series.hpp"
#include "renew/spectral.hpp"

namespace {

using nlohmann::json;
using namespace renew;

struct Options {
    // law
    std::string family = "basic";
    double alpha = 0.5;
    int m = 1;
    int logpow = 1;
    std::vector<double> probs;
    double tail_ratio = 0;
    double p = 0.5;
    // run parameters
    double b = 0.5;
    double beta = 1.0;
    long n_max = 500;
    std::string precision = "auto";
    double tol = 1e-6;
    double b_lo = 0.05, b_hi = 2.0;
    long window_lo = 0, window_hi = 0;
    std::vector<long> at;
    std::vector<double> grid = {0.4, 0.2, 0.1};
    double r_in = 0, r_out = 0;
    long budget = 1L << 23;
    double step = 1e-4;
    std::uint64_t seed = 1;
    long paths = 100000;
    long horizon = 50;
    int threads = 0;
    // output
    std::string out = "json";
    std::string output;
};

InterArrivalLaw build_law(const Options& o) {
    if (o.family == "basic")
        return InterArrivalLaw::basic(o.alpha);
    if (o.family == "shifted")
        return InterArrivalLaw::shifted(o.alpha, o.m);
    if (o.family == "logcorrected")
        return InterArrivalLaw::logcorrected(o.alpha, o.logpow);
    if (o.family == "geometric")
        return InterArrivalLaw::geometric(o.p);
    if (o.family == "table") {
        if (o.probs.empty())
            throw domain_error("table family needs --probs");
        if (o.tail_ratio > 0)
            return InterArrivalLaw::table(o.probs, o.tail_ratio);
        return InterArrivalLaw::table(o.probs);
    }
    throw domain_error("unknown family '" + o.family +
                       "' (basic, shifted, logcorrected, table, geometric)");
}

PrecisionSpec parse_precision(const std::string& s) {
    if (s == "auto")
        return {};
    return PrecisionSpec::exact(std::stoi(s));
}

void emit(const Options& o, const std::string& csv, const json& envelope) {
    const std::string payload = (o.out == "csv") ? csv : envelope.dump(2) + "\n";
    if (o.output.empty())
        std::fputs(payload.c_str(), stdout);
    else
        io::atomic_write(o.output, payload);
}

json law_params(const Options& o, const InterArrivalLaw& law) {
    json p = law.to_json();
    p["out"] = o.out;
    return p;
}

json root_json(const RootReport& r) {
    return json{{"re", r.z0.real()},
                {"im", r.z0.imag()},
                {"modulus", r.modulus},
                {"khat_derivative", {r.khat_derivative.real(), r.khat_derivative.imag()}},
                {"pole_coefficient", {r.pole_coefficient.real(), r.pole_coefficient.imag()}},
                {"residual", r.residual}};
}

int cmd_law(const Options& o) {
    const InterArrivalLaw law = build_law(o);
    const long n_show = std::min<long>(o.n_max, 1000);
    std::string csv = "n,K\n";
    json dens = json::array();
    for (long n = 1; n <= n_show; ++n) {
        csv += std::to_string(n) + "," + io::dec(law.density(n)) + "\n";
        dens.push_back(law.density(n));
    }
    json results{{"support_start", law.support_start()},
                 {"support_end", law.support_end()},
                 {"density", dens}};
    if (law.finite_mean())
        results["mean"] = law.mean();
    emit(o, csv, io::envelope("law", law_params(o, law), results));
    return 0;
}

int cmd_tilt(const Options& o) {
    const InterArrivalLaw law = build_law(o);
    const TiltedLaw t = tilt(law, o.b, parse_precision(o.precision), o.n_max);
    const long n_show = std::min<long>(o.n_max, 1000);
    std::vector<Real> kb;
    {
        ScopedPrecision scope(t.precision_bits);
        t.densities(n_show, kb);
    }
    std::string csv = "n,K_b\n";
    for (long n = 0; n <= n_show; ++n)
        csv += std::to_string(n) + "," + decimal_string(kb[n]) + "\n";
    json params = law_params(o, law);
    params["b"] = o.b;
    json results{{"b", o.b},
                 {"c_b", decimal_string(t.c_b)},
                 {"m_b", decimal_string(t.m_b)},
                 {"u_inf", decimal_string(t.u_inf())},
                 {"degenerate", t.degenerate},
                 {"precision_bits", t.precision_bits}};
    emit(o, csv, io::envelope("tilt", params, results, t.precision_bits));
    return 0;
}

json series_results(const RenewalSeries& s) {
    json u = json::array(), d = json::array(), grad = json::array();
    for (long n = 0; n <= s.n_max; ++n) {
        u.push_back(decimal_string(s.u[n]));
        d.push_back(decimal_string(s.d[n]));
        grad.push_back(decimal_string(s.grad[n]));
    }
    return json{{"n_max", s.n_max},
                {"precision_bits", s.precision_bits},
                {"u_inf", decimal_string(s.u_inf)},
                {"u", u},
                {"d", d},
                {"grad_u", grad}};
}

int cmd_series(const Options& o, bool subtracted) {
    const InterArrivalLaw law = build_law(o);
    const PrecisionSpec prec = parse_precision(o.precision);
    const TiltedLaw t = tilt(law, o.b, prec, o.n_max);
    const RenewalSeries s =
        subtracted ? delta_series(t, o.n_max, prec) : mass_renewal(t, o.n_max, prec);
    json params = law_params(o, law);
    params["b"] = o.b;
    params["n_max"] = o.n_max;
    emit(o, io::series_csv(s),
         io::envelope(subtracted ? "delta" : "u", params, series_results(s),
                      s.precision_bits));
    return 0;
}

int cmd_rate(const Options& o) {
    const InterArrivalLaw law = build_law(o);
    const PrecisionSpec prec = parse_precision(o.precision);
    const RenewalSeries s = delta_series(tilt(law, o.b, prec, o.n_max), o.n_max, prec);
    const RateReport r = decay_rate(s, o.window_lo, o.window_hi);
    json params = law_params(o, law);
    params["b"] = o.b;
    params["n_max"] = o.n_max;
    params["window"] = {r.n_lo, r.n_hi};
    json results{{"rate", r.rate},
                 {"xi", 1.0 / r.rate},
                 {"b_times_xi", o.b / r.rate},
                 {"intercept", r.intercept},
                 {"fit_r2", r.fit_r2},
                 {"oscillatory", r.oscillatory},
                 {"n_sign_changes", r.n_sign_changes},
                 {"envelope_used", r.envelope_used},
                 {"points_used", r.points_used}};
    emit(o, io::rate_csv(o.b, r), io::envelope("rate", params, results, s.precision_bits));
    return 0;
}

int cmd_ratio(const Options& o) {
    const InterArrivalLaw law = build_law(o);
    const PrecisionSpec prec = parse_precision(o.precision);
    const RenewalSeries s = delta_series(tilt(law, o.b, prec, o.n_max), o.n_max, prec);
    std::vector<long> pts = o.at;
    if (pts.empty())
        pts = {o.n_max / 4, o.n_max / 2, o.n_max};
    std::string csv = "n,sharp_ratio,grad_ratio\n";
    json rows = json::array();
    for (long n : pts) {
        const double sr = sharp_ratio(s, s.tilted, n);
        const double gr = grad_ratio(s, s.tilted, n);
        csv += std::to_string(n) + "," + io::dec(sr) + "," + io::dec(gr) + "\n";
        rows.push_back({{"n", n}, {"sharp_ratio", sr}, {"grad_ratio", gr}});
    }
    json params = law_params(o, law);
    params["b"] = o.b;
    params["n_max"] = o.n_max;
    emit(o, csv, io::envelope("ratio", params, rows, s.precision_bits));
    return 0;
}

int cmd_roots(const Options& o) {
    const InterArrivalLaw law = build_law(o);
    const TiltedLaw t = tilt(law, o.b, parse_precision(o.precision), 0);
    const std::vector<RootReport> roots = find_roots(t, o.r_out, o.r_in, 24, 48, o.budget);
    std::string csv = "re,im,modulus,pole_re,pole_im,residual\n";
    json rows = json::array();
    for (const RootReport& r : roots) {
        csv += io::dec(r.z0.real()) + "," + io::dec(r.z0.imag()) + "," +
               io::dec(r.modulus) + "," + io::dec(r.pole_coefficient.real()) + "," +
               io::dec(r.pole_coefficient.imag()) + "," + io::dec(r.residual) + "\n";
        rows.push_back(root_json(r));
    }
    json params = law_params(o, law);
    params["b"] = o.b;
    json results{{"count", roots.size()}, {"roots", rows}};
    emit(o, csv, io::envelope("roots", params, results, t.precision_bits));
    return 0;
}

int cmd_b0(const Options& o) {
    const InterArrivalLaw law = build_law(o);
    const double b0 = critical_tilt(law, o.b_lo, o.b_hi, o.tol);
    json params = law_params(o, law);
    params["b_lo"] = o.b_lo;
    params["b_hi"] = o.b_hi;
    params["tol"] = o.tol;
    json results;
    std::string b0s;
    if (std::isinf(b0)) {
        results["b0"] = "inf";
        b0s = "inf";
    } else {
        results["b0"] = b0;
        b0s = io::dec(b0);
    }
    std::string csv = "b_lo,b_hi,tol,b0\n" + io::dec(o.b_lo) + "," + io::dec(o.b_hi) +
                      "," + io::dec(o.tol) + "," + b0s + "\n";
    emit(o, csv, io::envelope("b0", params, results));
    return 0;
}

int cmd_xi_scan(const Options& o) {
    const InterArrivalLaw law = build_law(o);
    const std::vector<XiPoint> pts = xi_scan(law, o.grid);
    json rows = json::array();
    for (const XiPoint& p : pts)
        rows.push_back({{"b", p.b},
                        {"n_max", p.n_max},
                        {"xi", p.xi},
                        {"b_times_xi", p.b_times_xi},
                        {"rate", p.rate},
                        {"fit_r2", p.fit_r2},
                        {"oscillatory", p.oscillatory}});
    json params = law_params(o, law);
    params["grid"] = o.grid;
    emit(o, io::xi_csv(pts), io::envelope("xi-scan", params, rows));
    return 0;
}

int cmd_pinning(const Options& o) {
    const InterArrivalLaw law = build_law(o);
    const PartitionTable tab = partition(law, o.beta, o.n_max);
    json params = law_params(o, law);
    params["beta"] = o.beta;
    params["N"] = o.n_max;
    json results{{"beta", o.beta}, {"N", o.n_max}, {"log_Z_N", tab.log_z[tab.N]}};
    if (tab.N >= 100) {
        results["fe_estimate"] = fe_estimate(tab);
        results["contact_fraction"] = contact_fraction(law, o.beta, o.n_max, o.step);
    }
    emit(o, io::pinning_csv(tab), io::envelope("pinning", params, results));
    return 0;
}

int cmd_mc(const Options& o) {
    const InterArrivalLaw law = build_law(o);
    const TiltedLaw t = tilt(law, o.b, parse_precision(o.precision), 0);
    const McResult r = mc_sample(t, o.horizon, o.paths, o.seed, o.threads);
    json params = law_params(o, law);
    params["b"] = o.b;
    params["horizon"] = o.horizon;
    params["paths"] = o.paths;
    json u = json::array(), se = json::array();
    for (long n = 0; n <= r.horizon; ++n) {
        u.push_back(r.u_hat[n]);
        se.push_back(r.se[n]);
    }
    json results{{"horizon", r.horizon},
                 {"n_paths", r.n_paths},
                 {"truncation", r.truncation},
                 {"u_hat", u},
                 {"se", se}};
    emit(o, io::mc_csv(r),
         io::envelope("mc", params, results, t.precision_bits,
                      static_cast<long long>(r.seed)));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"renewal decay-rate toolkit: tilted inter-arrival laws, mass renewal "
                 "functions, generating-function zeros, and pinning partition sums"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value file; command-line flags take precedence");

    app.add_option("--family", o.family,
                   "law family: basic, shifted, logcorrected, table, geometric");
    app.add_option("--alpha", o.alpha, "tail exponent in (0,1)");
    app.add_option("--m", o.m, "right shift of the shifted family");
    app.add_option("--j", o.logpow, "log-power of the logcorrected family");
    app.add_option("--probs", o.probs, "table head probabilities")->delimiter(',');
    app.add_option("--tail-ratio", o.tail_ratio, "geometric continuation ratio for table");
    app.add_option("--p", o.p, "geometric family parameter");

    app.add_option("--b", o.b, "tilt exponent, b >= 0");
    app.add_option("--beta", o.beta, "pinning inverse temperature");
    app.add_option("--nmax", o.n_max, "horizon: series length / pinning volume");
    app.add_option("--precision", o.precision, "'auto' or explicit bits (>= 64)");
    app.add_option("--tol", o.tol, "bisection tolerance for b0");
    app.add_option("--b-lo", o.b_lo, "lower bracket for b0");
    app.add_option("--b-hi", o.b_hi, "upper bracket for b0");
    app.add_option("--window-lo", o.window_lo, "rate fit window start (0 = n_max/4)");
    app.add_option("--window-hi", o.window_hi, "rate fit window end (0 = 3 n_max/4)");
    app.add_option("--at", o.at, "evaluation points for ratio")->delimiter(',');
    app.add_option("--grid", o.grid, "tilt grid for xi-scan")->delimiter(',');
    app.add_option("--r-in", o.r_in, "inner annulus radius (0 = default)");
    app.add_option("--r-out", o.r_out, "outer annulus radius (0 = default)");
    app.add_option("--budget", o.budget, "contour sample budget");
    app.add_option("--step", o.step, "finite-difference step for contact fraction");
    app.add_option("--seed", o.seed, "Monte Carlo seed");
    app.add_option("--paths", o.paths, "Monte Carlo path count");
    app.add_option("--horizon", o.horizon, "Monte Carlo horizon");
    app.add_option("--threads", o.threads, "worker threads (0 = auto)");

    app.add_option("--out", o.out, "output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--output", o.output, "write atomically to this path instead of stdout");

    auto* c_law = app.add_subcommand("law", "inspect an inter-arrival law");
    auto* c_tilt = app.add_subcommand("tilt", "tilt a law and report c(b), m_b");
    auto* c_u = app.add_subcommand("u", "mass renewal function by direct recursion");
    auto* c_delta = app.add_subcommand("delta", "centered renewal series d = u - 1/m_b");
    auto* c_rate = app.add_subcommand("rate", "exponential decay rate of d(n)");
    auto* c_ratio = app.add_subcommand("ratio", "sharp-asymptotics ratios at chosen n");
    auto* c_roots = app.add_subcommand("roots", "zeros of 1 - Khat_b in the annulus");
    auto* c_b0 = app.add_subcommand("b0", "critical tilt by predicate bisection");
    auto* c_xi = app.add_subcommand("xi-scan", "correlation length over a tilt grid");
    auto* c_pin = app.add_subcommand("pinning", "partition functions and free energy");
    auto* c_mc = app.add_subcommand("mc", "Monte Carlo check of the renewal function");
    for (CLI::App* sub : {c_law, c_tilt, c_u, c_delta, c_rate, c_ratio, c_roots, c_b0,
                          c_xi, c_pin, c_mc})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e); // --help
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (c_law->parsed())
            return cmd_law(o);
        if (c_tilt->parsed())
            return cmd_tilt(o);
        if (c_u->parsed())
            return cmd_series(o, false);
        if (c_delta->parsed())
            return cmd_series(o, true);
        if (c_rate->parsed())
            return cmd_rate(o);
        if (c_ratio->parsed())
            return cmd_ratio(o);
        if (c_roots->parsed())
            return cmd_roots(o);
        if (c_b0->parsed())
            return cmd_b0(o);
        if (c_xi->parsed())
            return cmd_xi_scan(o);
        if (c_pin->parsed())
            return cmd_pinning(o);
        if (c_mc->parsed())
            return cmd_mc(o);
        std::cerr << "error: no command\n";
        return 1;
    } catch (const insufficient_data_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const precision_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const singular_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const count_mismatch_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
