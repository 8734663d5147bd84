#pragma once

// Implementations of the lagfib subcommands. Each returns a RunReport; main.cpp
// only parses flags and prints.

#include "lagfib/classifier.hpp"
#include "lagfib/io.hpp"
#include "lagfib/parallel.hpp"
#include "lagfib/potential.hpp"
#include "lagfib/toroidal.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace lagfib::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

struct RunReport {
    std::string command;
    std::string spec_digest;
    Json results = Json::object();
    bool ok = true;
    int exit_code = kExitOk;
    std::vector<std::pair<std::string, double>> timings; // milliseconds

    Json to_json(bool with_timings = true) const {
        Json j;
        j["schema"] = kSchemaVersion;
        j["command"] = command;
        j["spec_digest"] = spec_digest;
        j["status"] = ok ? "ok" : "fail";
        j["exit_code"] = exit_code;
        j["results"] = results;
        if (with_timings) {
            Json t = Json::object();
            for (const auto &[stage, ms] : timings)
                t[stage] = ms;
            j["timings"] = t;
        }
        return j;
    }

    void fail(int code) {
        ok = false;
        exit_code = std::max(exit_code, code);
    }
};

class StageTimer {
  public:
    StageTimer(RunReport &report, std::string stage)
        : report_(report), stage_(std::move(stage)), start_(std::chrono::steady_clock::now()) {}
    ~StageTimer() {
        const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
        report_.timings.emplace_back(stage_, ms);
    }
    StageTimer(const StageTimer &) = delete;
    StageTimer &operator=(const StageTimer &) = delete;

  private:
    RunReport &report_;
    std::string stage_;
    std::chrono::steady_clock::time_point start_;
};

inline std::string sha256_hex(const std::string &data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorCode::InvalidArgument, "SHA-256 failed");
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i)
        out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return out.str();
}

inline std::string spec_digest(const PotentialSpec &spec) { return "sha256:" + sha256_hex(spec_to_json(spec).dump()); }

/// Runs body, turning library errors into a failed report: parse and I/O
/// problems exit 2, everything else exits 1.
inline RunReport guarded(const std::string &command, const std::function<void(RunReport &)> &body) {
    RunReport report;
    report.command = command;
    try {
        body(report);
    } catch (const Error &err) {
        const bool usage = err.code() == ErrorCode::ParseError || err.code() == ErrorCode::IoError;
        report.results["error"] = {{"code", std::string(to_string(err.code()))}, {"message", err.what()}};
        report.fail(usage ? kExitUsage : kExitFail);
    }
    return report;
}

inline PotentialSpec load_into(RunReport &report, const std::string &path) {
    StageTimer t(report, "load_spec");
    PotentialSpec spec = load_spec(path);
    report.spec_digest = spec_digest(spec);
    return spec;
}

inline Json point_json(const std::vector<ComplexF> &z) {
    Json out = Json::array();
    for (const auto &x : z)
        out.push_back(to_json(x));
    return out;
}

// ---- check-domain -------------------------------------------------------

struct CheckDomainOptions {
    std::string spec_path;
    std::size_t grid = 9;
    double tol = 1e-10;
};

inline RunReport cmd_check_domain(const CheckDomainOptions &opt) {
    return guarded("check-domain", [&](RunReport &report) {
        const PotentialSpec spec = load_into(report, opt.spec_path);
        DomainReport dom;
        {
            StageTimer t(report, "certify_domain");
            dom = certify_domain(spec, opt.grid);
        }
        RiemannResult riemann;
        {
            StageTimer t(report, "riemann_check");
            const auto pm = evaluate_period(spec, dom.worst_point, 0);
            riemann = riemann_check(pm.theta_tilde, opt.tol);
        }
        Json r;
        r["evidence"] = DomainReport::evidence;
        r["grid_per_axis"] = dom.grid_per_axis;
        r["samples"] = dom.samples;
        r["epsilon"] = spec.epsilon.get_str();
        r["tol"] = opt.tol;
        r["min_pivot"] = dom.min_pivot;
        r["worst_point"] = point_json(dom.worst_point);
        r["riemann_at_worst_point"] = riemann.describe();
        report.results = r;
        if (!(dom.min_pivot > opt.tol) || !riemann.pass())
            report.fail(kExitFail);
    });
}

// ---- classify -----------------------------------------------------------

struct ClassifyOptions {
    std::string spec_path;
    std::string point;
    bool numeric = false;
    long k_max = 10000;
    double tol = 1e-9;
};

inline RunReport cmd_classify(const ClassifyOptions &opt) {
    return guarded("classify", [&](RunReport &report) {
        const PotentialSpec spec = load_into(report, opt.spec_path);
        const auto point = parse_point(opt.point, spec.n);
        report.results["point"] = point_to_string(point);
        Classification c;
        {
            StageTimer t(report, opt.numeric ? "order_numeric" : "order_exact");
            if (opt.numeric) {
                std::vector<ComplexF> z;
                for (const auto &x : point)
                    z.push_back(embed(x));
                c = classify_numeric(spec, z, opt.k_max, opt.tol);
            } else {
                c = classify(spec, point);
            }
        }
        report.results["classification"] = to_json(c);
    });
}

// ---- scan ---------------------------------------------------------------

struct ScanOptions {
    std::string spec_path;
    std::string grid_spec;
    std::string out_csv;  // empty: no CSV
    std::string out_json; // empty: no JSON
};

inline std::string csv_quote(const std::string &s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string complex_text(const ComplexF &z) {
    std::ostringstream out;
    out << std::setprecision(17) << z.real() << (z.imag() < 0 || std::signbit(z.imag()) ? "-" : "+")
        << std::abs(z.imag()) << "i";
    return out.str();
}

inline RunReport cmd_scan(const ScanOptions &opt) {
    return guarded("scan", [&](RunReport &report) {
        const PotentialSpec spec = load_into(report, opt.spec_path);
        std::vector<std::vector<FieldElement>> grid;
        {
            StageTimer t(report, "parse_grid");
            grid = parse_grid(opt.grid_spec, spec);
        }
        ScanReport scan;
        {
            StageTimer t(report, "scan_discriminant");
            scan = scan_discriminant(spec, grid);
        }
        std::map<long, std::size_t> orders;
        Json rows = Json::array();
        std::ostringstream csv;
        csv << "point,embed,cycle_type,wall_ms\n";
        for (const auto &e : scan.entries) {
            std::string embedded;
            for (std::size_t i = 0; i < e.point.size(); ++i)
                embedded += (i ? ";" : "") + complex_text(embed(e.point[i]));
            const std::string cycle = e.result ? to_string(e.result->cycle) : "error";
            csv << csv_quote(point_to_string(e.point)) << ',' << csv_quote(embedded) << ',' << cycle << ','
                << std::setprecision(6) << e.wall_ms << '\n';
            Json row;
            row["point"] = point_to_string(e.point);
            if (e.result) {
                row["result"] = to_json(*e.result);
                if (e.result->cycle.is_finite())
                    ++orders[e.result->cycle.value];
            } else {
                row["error"] = e.error;
            }
            rows.push_back(row);
        }
        {
            StageTimer t(report, "write_output");
            if (!opt.out_csv.empty())
                write_file(opt.out_csv, csv.str());
            if (!opt.out_json.empty()) {
                Json full;
                full["schema"] = kSchemaVersion;
                full["spec_digest"] = report.spec_digest;
                full["grid"] = opt.grid_spec;
                full["entries"] = rows;
                write_file(opt.out_json, full.dump(2) + "\n");
            }
        }
        Json summary;
        summary["grid"] = opt.grid_spec;
        summary["points"] = scan.entries.size();
        summary["finite"] = scan.finite;
        summary["infinite"] = scan.infinite;
        summary["errors"] = scan.errors;
        Json hist = Json::object();
        for (const auto &[k, count] : orders)
            hist[to_string(CycleType::finite(k))] = count;
        summary["finite_cycle_types"] = hist;
        report.results = summary;
        if (scan.errors > 0)
            report.fail(kExitFail);
    });
}

// ---- verify -------------------------------------------------------------

inline const std::vector<std::string> &all_checks() {
    static const std::vector<std::string> names{"charts",       "omega-glue",   "action-group-law",
                                                "symplectic",   "polarization", "closedness"};
    return names;
}

struct VerifyOptions {
    std::string spec_path;
    std::vector<std::string> checks; // empty: all
    std::uint64_t seed = 1;
    std::size_t samples = 50;
    long gamma_range = 2;
    std::size_t polarization_n = 0; // 0: spec.n
    long polarization_ell = 0;      // 0: spec.ell
};

namespace detail {

inline ChartPoint random_chart_point(std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> mod(0.4, 2.0), arg(0.0, 2.0 * std::numbers::pi);
    std::uniform_int_distribution<long> k(-4, 4);
    const long kk = k(rng);
    const ComplexF x = std::polar(mod(rng), arg(rng));
    const ComplexF y = std::polar(mod(rng), arg(rng));
    return {kk, x, y};
}

inline double rel_diff(ComplexF a, ComplexF b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

inline std::vector<GroupElement> gamma_box(std::size_t n, long range) {
    std::vector<GroupElement> out;
    std::vector<long> cur(n, -range);
    for (;;) {
        out.push_back({std::vector<long>(cur.begin(), cur.end() - 1), cur.back()});
        std::size_t i = 0;
        while (i < n && cur[i] == range)
            cur[i++] = -range;
        if (i == n)
            break;
        ++cur[i];
    }
    return out;
}

inline Json check_charts(std::mt19937_64 &rng, std::size_t samples) {
    double round_trip = 0.0, drift = 0.0;
    std::uniform_int_distribution<int> coin(0, 1);
    for (std::size_t s = 0; s < samples; ++s) {
        ChartPoint p = random_chart_point(rng);
        const auto ud = transition(transition(p, Direction::Up), Direction::Down);
        const auto du = transition(transition(p, Direction::Down), Direction::Up);
        round_trip = std::max({round_trip, rel_diff(ud.x, p.x), rel_diff(ud.y, p.y), rel_diff(du.x, p.x),
                               rel_diff(du.y, p.y)});
        const auto start = glued_invariants(p);
        for (int hop = 0; hop < 10; ++hop) {
            p = transition(p, coin(rng) ? Direction::Up : Direction::Down);
            const auto now = glued_invariants(p);
            drift = std::max({drift, rel_diff(now.zn, start.zn), rel_diff(now.wn, start.wn)});
        }
    }
    return {{"name", "charts"},
            {"pass", round_trip <= 1e-12 && drift <= 1e-11},
            {"round_trip_residual", round_trip},
            {"invariant_drift_10_hops", drift},
            {"samples", samples}};
}

inline Json check_omega_glue(std::mt19937_64 &rng, std::size_t samples) {
    double chart = 0.0, trans = 0.0, fd = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const auto r = omega_glue_residual(random_chart_point(rng));
        chart = std::max(chart, r.chart);
        trans = std::max(trans, r.transition);
        fd = std::max(fd, r.finite_difference);
    }
    return {{"name", "omega-glue"},
            {"pass", chart <= 1e-10 && trans <= 1e-10 && fd <= 1e-6},
            {"chart_residual", chart},
            {"transition_residual", trans},
            {"finite_difference_residual", fd},
            {"samples", samples}};
}

inline Json check_group_law(const PotentialSpec &spec, std::mt19937_64 &rng, std::size_t samples, long range) {
    std::uniform_int_distribution<long> coef(-range, range);
    double worst = 0.0;
    Json witness;
    for (std::size_t s = 0; s < samples; ++s) {
        GroupElement a, b;
        for (std::size_t i = 0; i + 1 < spec.n; ++i) {
            a.j.push_back(coef(rng));
            b.j.push_back(coef(rng));
        }
        a.m = coef(rng);
        b.m = coef(rng);
        const TotalPoint p = random_total_point(spec, rng);
        const auto composed = action(spec, a, action(spec, b, p));
        const auto direct = action(spec, a + b, p);
        const double d = composed.chart.k == direct.chart.k ? total_point_distance(direct, composed) : 1.0;
        if (d > worst) {
            worst = d;
            witness = {{"gamma", to_string(a)}, {"gamma_prime", to_string(b)}};
        }
    }
    Json j{{"name", "action-group-law"}, {"pass", worst <= 1e-10}, {"max_residual", worst}, {"samples", samples}};
    if (worst > 1e-10)
        j["witness"] = witness;
    return j;
}

inline Json check_symplectic(const PotentialSpec &spec, std::uint64_t seed, std::size_t samples, long range) {
    const auto gammas = gamma_box(spec.n, range);
    std::vector<SymplecticCheck> results(gammas.size());
    parallel_for(gammas.size(), [&](std::size_t i) {
        results[i] = verify_symplectic_action(spec, gammas[i], samples, seed + i);
    });
    bool pass = true;
    double worst = 0.0, worst_fd = 0.0;
    Json witness;
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        worst = std::max(worst, results[i].max_residual);
        worst_fd = std::max(worst_fd, results[i].max_fd_deviation);
        if (!results[i].pass() && pass) {
            pass = false;
            witness = {{"gamma", to_string(gammas[i])}, {"detail", results[i].describe()}};
        }
    }
    Json j{{"name", "symplectic"},
           {"pass", pass},
           {"group_elements", gammas.size()},
           {"gamma_range", range},
           {"max_pullback_residual", worst},
           {"max_fd_jacobian_deviation", worst_fd},
           {"samples_per_element", samples}};
    if (!pass)
        j["witness"] = witness;
    return j;
}

inline Json check_polarization(const PotentialSpec &spec, std::size_t n, long ell) {
    const auto pol = verify_polarization(n, ell);
    // branch shift at an exact point off the discriminant
    std::vector<FieldElement> pt(spec.n, FieldElement(0));
    for (std::size_t i = 0; i + 1 < spec.n; ++i)
        pt[i] = FieldElement(make_rational(1, static_cast<long>(i) + 3));
    pt.back() = FieldElement(Rational(1, 2));
    bool shift_ok = true;
    for (long b = -2; b <= 2; ++b) {
        const auto lo = evaluate_period(spec, pt, b), hi = evaluate_period(spec, pt, b + 1);
        const auto diff = (*hi.theta_exact_part)[spec.n - 1][spec.n - 1] - (*lo.theta_exact_part)[spec.n - 1][spec.n - 1];
        shift_ok = shift_ok && diff == FieldElement(spec.ell);
    }
    Json j{{"name", "polarization"},
           {"pass", pol.pass && shift_ok},
           {"n", n},
           {"ell", ell},
           {"monodromy_preserves_form", pol.pass},
           {"branch_shift_equals_ell", shift_ok}};
    if (!pol.pass)
        j["defect"] = to_json(pol.defect);
    return j;
}

inline Json check_closedness(const PotentialSpec &spec) {
    const auto w = check_closed_matrix(period_polynomials(spec));
    Json j{{"name", "closedness"}, {"pass", !w.has_value()}};
    if (w)
        j["witness"] = w->describe();
    return j;
}

} // namespace detail

inline RunReport cmd_verify(const VerifyOptions &opt) {
    return guarded("verify", [&](RunReport &report) {
        const PotentialSpec spec = load_into(report, opt.spec_path);
        std::vector<std::string> checks = opt.checks.empty() ? all_checks() : opt.checks;
        for (const auto &c : checks)
            if (std::find(all_checks().begin(), all_checks().end(), c) == all_checks().end())
                throw Error(ErrorCode::ParseError, "unknown check '" + c + "'");
        Json results = Json::array();
        std::vector<std::string> failed;
        for (const auto &name : checks) {
            StageTimer t(report, name);
            // each check gets its own stream so the selection does not change the samples
            std::mt19937_64 rng(opt.seed ^ std::hash<std::string>{}(name));
            Json r;
            if (name == "charts")
                r = detail::check_charts(rng, opt.samples);
            else if (name == "omega-glue")
                r = detail::check_omega_glue(rng, opt.samples);
            else if (name == "action-group-law")
                r = detail::check_group_law(spec, rng, opt.samples, opt.gamma_range);
            else if (name == "symplectic")
                r = detail::check_symplectic(spec, opt.seed, opt.samples, opt.gamma_range);
            else if (name == "polarization")
                r = detail::check_polarization(spec, opt.polarization_n ? opt.polarization_n : spec.n,
                                               opt.polarization_ell ? opt.polarization_ell : spec.ell);
            else
                r = detail::check_closedness(spec);
            if (!r["pass"].get<bool>())
                failed.push_back(name);
            results.push_back(r);
        }
        report.results["seed"] = opt.seed;
        report.results["checks"] = results;
        report.results["failed"] = failed;
        if (!failed.empty())
            report.fail(kExitFail);
    });
}

// ---- fiber --------------------------------------------------------------

struct FiberOptions {
    std::string spec_path;
    std::string point;
    std::string out_json; // empty: only in the report
};

inline RunReport cmd_fiber(const FiberOptions &opt) {
    return guarded("fiber", [&](RunReport &report) {
        const PotentialSpec spec = load_into(report, opt.spec_path);
        const auto point = parse_point(opt.point, spec.n);
        SingularFiberDescription fiber;
        {
            StageTimer t(report, "singular_fiber");
            fiber = singular_fiber(spec, point);
        }
        const Json j = to_json(fiber);
        if (!opt.out_json.empty()) {
            StageTimer t(report, "write_output");
            write_file(opt.out_json, j.dump(2) + "\n");
        }
        report.results["fiber"] = j;
    });
}

} // namespace lagfib::cli
