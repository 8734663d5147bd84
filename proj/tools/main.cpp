#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace lagfib::cli;

int main(int argc, char **argv) {
    CLI::App app{"lagfib: potential-based Lagrangian fibrations, checks and fiber classification"};
    app.require_subcommand(1);

    std::string report_path;
    bool no_timings = false;
    app.add_option("--report", report_path, "Also write the run report JSON to this file");
    app.add_flag("--no-timings", no_timings, "Omit per-stage timings from the report");

    CheckDomainOptions dom;
    auto *check_domain = app.add_subcommand("check-domain", "Sample Im Hess Psi over the polydisk");
    check_domain->add_option("spec", dom.spec_path, "Spec JSON")->required();
    check_domain->add_option("--grid", dom.grid, "Grid points per axis")->check(CLI::PositiveNumber);
    check_domain->add_option("--tol", dom.tol, "Minimum acceptable pivot");

    ClassifyOptions cls;
    auto *classify = app.add_subcommand("classify", "Cycle type of the fiber over a discriminant point");
    classify->add_option("spec", cls.spec_path, "Spec JSON")->required();
    classify->add_option("--point", cls.point, "Exact coordinates, e.g. \"z1=1/7\"")->required();
    classify->add_flag("--numeric", cls.numeric, "Use the floating lattice-reduction path");
    classify->add_option("--kmax", cls.k_max, "Search bound for --numeric")->check(CLI::PositiveNumber);
    classify->add_option("--tol", cls.tol, "Residual tolerance for --numeric");

    ScanOptions scn;
    auto *scan = app.add_subcommand("scan", "Classify every point of a grid on the discriminant");
    scan->add_option("spec", scn.spec_path, "Spec JSON")->required();
    scan->add_option("--grid-spec", scn.grid_spec, "\"q<=Q\", \"<c>*q<=Q\" or \"z1=..;z1=..\"")->required();
    scan->add_option("--out", scn.out_csv, "CSV output file");
    scan->add_option("--json", scn.out_json, "JSON output file with certificates");

    VerifyOptions ver;
    std::string checks;
    auto *verify = app.add_subcommand("verify", "Run the construction identities");
    verify->add_option("spec", ver.spec_path, "Spec JSON")->required();
    verify->add_option("--checks", checks, "Comma-separated subset of: charts,omega-glue,action-group-law,"
                                           "symplectic,polarization,closedness");
    verify->add_option("--seed", ver.seed, "RNG seed");
    verify->add_option("--samples", ver.samples, "Random points per check")->check(CLI::PositiveNumber);
    verify->add_option("--gamma-range", ver.gamma_range, "Bound on |j_i|, |m| for the symplectic check")
        ->check(CLI::NonNegativeNumber);
    verify->add_option("--pol-n", ver.polarization_n, "Override n for the polarization check");
    verify->add_option("--pol-ell", ver.polarization_ell, "Override ell for the polarization check");

    FiberOptions fib;
    auto *fiber = app.add_subcommand("fiber", "Describe the singular fiber over a discriminant point");
    fiber->add_option("spec", fib.spec_path, "Spec JSON")->required();
    fiber->add_option("--point", fib.point, "Exact coordinates")->required();
    fiber->add_option("--out", fib.out_json, "JSON output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    RunReport report;
    if (*check_domain) {
        report = cmd_check_domain(dom);
    } else if (*classify) {
        report = cmd_classify(cls);
    } else if (*scan) {
        report = cmd_scan(scn);
    } else if (*verify) {
        for (const auto &c : CLI::detail::split(checks, ','))
            if (!c.empty())
                ver.checks.push_back(CLI::detail::trim_copy(c));
        report = cmd_verify(ver);
    } else {
        report = cmd_fiber(fib);
    }

    const std::string text = report.to_json(!no_timings).dump(2) + "\n";
    std::cout << text;
    if (!report_path.empty()) {
        try {
            lagfib::write_file(report_path, text);
        } catch (const lagfib::Error &err) {
            std::cerr << err.what() << "\n";
            return kExitUsage;
        }
    }
    if (!report.ok && report.results.contains("error"))
        std::cerr << "lagfib: " << report.results["error"]["message"].get<std::string>() << "\n";
    return report.exit_code;
}
