#include "bdsvie/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bdsvie/catalog.hpp"
#include "bdsvie/run_config.hpp"
#include "bdsvie/verification.hpp"

namespace bdsvie::cli {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct CliOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> threads;
    std::vector<std::string> checks;
};

RunConfig load_config(const CliOptions& opt) {
    RunConfig cfg = RunConfig::from_file(opt.config_path);
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.out_dir) cfg.out_dir = *opt.out_dir;
    if (opt.threads) cfg.threads = *opt.threads;
    if (!opt.checks.empty()) {
        static const std::set<std::string> known = {"certificate", "apriori", "uniqueness",
                                                    "contraction", "oracles"};
        for (const std::string& c : opt.checks)
            if (!known.count(c)) throw std::invalid_argument("unknown check '" + c + "'");
        cfg.checks = opt.checks;
    }
    return cfg;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << contents;
}

struct SolveArtifacts {
    BrownianEnsemble ens;
    ContractionCertificate cert;
    SolutionEstimate sol;
    RegressionContext reg;
};

SolveArtifacts run_solver(const RunConfig& cfg) {
    const TimeGrid grid = make_grid(cfg.problem.T, cfg.N);
    const int threads = cfg.resolved_threads();
    BrownianEnsemble ens =
        sample_ensemble(grid, cfg.M, cfg.problem.d, cfg.problem.l, cfg.seed, threads);
    RegressionContext reg(ens, cfg.degree, cfg.ridge);
    ContractionCertificate cert = build_certificate(cfg.problem.lip_c, cfg.problem.alpha,
                                                    cfg.problem.T, cfg.certificate_overrides());
    SolverConfig scfg;
    scfg.tol = cfg.tol;
    scfg.max_iter = cfg.max_iter;
    scfg.inner_iterations = cfg.inner_iterations;
    scfg.threads = threads;
    SolutionEstimate sol = stitched_solve(cfg.problem, ens, reg, cert, scfg);
    return SolveArtifacts{std::move(ens), std::move(cert), std::move(sol), std::move(reg)};
}

json intervals_to_json(const SolutionEstimate& sol) {
    json arr = json::array();
    for (const IntervalStats& st : sol.intervals) {
        json j;
        j["s_lo"] = st.s_lo;
        j["s_hi"] = st.s_hi;
        j["iterations"] = st.iterations;
        j["converged"] = st.converged;
        j["residuals"] = st.residuals;
        arr.push_back(std::move(j));
    }
    return arr;
}

void ensure_finite(const SolutionEstimate& sol) {
    if (!sol.y.all_finite() || !sol.z.all_finite())
        throw std::runtime_error("solution contains non-finite values; aborting output");
}

// solution_y.csv: one row per grid node with the ensemble mean and standard
// deviation of each Y component.
std::string solution_y_csv(const SolutionEstimate& sol) {
    const TimeGrid& grid = sol.y.grid();
    const int k = sol.y.dim();
    const int M = sol.y.n_paths();
    std::ostringstream out;
    out << "t";
    for (int a = 1; a <= k; ++a) out << ",y" << a << "_mean,y" << a << "_std";
    out << "\n";
    for (int i = 0; i <= grid.n_steps; ++i) {
        out << fmt(grid.at(i));
        const auto block = sol.y.at(i);
        for (int a = 0; a < k; ++a) {
            const double mean = block.col(a).mean();
            const double var =
                M > 1 ? (block.col(a).array() - mean).square().sum() / (M - 1) : 0.0;
            out << "," << fmt(mean) << "," << fmt(std::sqrt(var));
        }
        out << "\n";
    }
    return out.str();
}

// solution_z.csv: long-format triangle, one row per cell (t_i, s_j).
std::string solution_z_csv(const SolutionEstimate& sol) {
    const TimeGrid& grid = sol.z.grid();
    const int cols = sol.z.dim_k() * sol.z.dim_d();
    const int M = sol.z.n_paths();
    std::ostringstream out;
    out << "t,s";
    for (int a = 1; a <= sol.z.dim_k(); ++a)
        for (int b = 1; b <= sol.z.dim_d(); ++b) out << ",z" << a << b << "_mean,z" << a << b << "_std";
    out << "\n";
    for (int i = 0; i < grid.n_steps; ++i) {
        for (int j = i; j < grid.n_steps; ++j) {
            out << fmt(grid.at(i)) << "," << fmt(grid.at(j));
            const auto block = sol.z.at(i, j);
            for (int q = 0; q < cols; ++q) {
                const double mean = block.col(q).mean();
                const double var =
                    M > 1 ? (block.col(q).array() - mean).square().sum() / (M - 1) : 0.0;
                out << "," << fmt(mean) << "," << fmt(std::sqrt(var));
            }
            out << "\n";
        }
    }
    return out.str();
}

int cmd_certificate(const CliOptions& opt, std::ostream& out, std::ostream&) {
    const RunConfig cfg = load_config(opt);
    const ContractionCertificate cert = build_certificate(
        cfg.problem.lip_c, cfg.problem.alpha, cfg.problem.T, cfg.certificate_overrides());
    const json j = cert.to_json();
    out << j.dump(2) << "\n";
    std::filesystem::create_directories(cfg.out_dir);
    write_file(std::filesystem::path(cfg.out_dir) / "certificate.json", j.dump(2) + "\n");
    return 0;
}

int cmd_solve(const CliOptions& opt, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = load_config(opt);
    const auto t0 = std::chrono::steady_clock::now();
    const SolveArtifacts art = run_solver(cfg);
    const auto elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ensure_finite(art.sol);

    std::filesystem::create_directories(cfg.out_dir);
    const std::filesystem::path dir(cfg.out_dir);
    const bool csv = std::find(cfg.formats.begin(), cfg.formats.end(), "csv") != cfg.formats.end();
    const bool js = std::find(cfg.formats.begin(), cfg.formats.end(), "json") != cfg.formats.end();
    if (csv) {
        write_file(dir / "solution_y.csv", solution_y_csv(art.sol));
        write_file(dir / "solution_z.csv", solution_z_csv(art.sol));
    }
    if (js) {
        json diag;
        diag["config"] = cfg.echo();
        diag["certificate"] = art.cert.to_json();
        diag["intervals"] = intervals_to_json(art.sol);
        diag["converged"] = art.sol.converged;
        // work counters, not wall-clock: output files stay byte-identical
        // across runs and thread counts
        diag["work"] = {{"regressions", art.sol.regressions},
                        {"paths", cfg.M},
                        {"steps", cfg.N}};
        write_file(dir / "diagnostics.json", diag.dump(2) + "\n");
    }
    out << "solve: wrote " << (csv ? "solution_y.csv solution_z.csv " : "")
        << (js ? "diagnostics.json " : "") << "to " << cfg.out_dir << "\n";
    out << "solve: converged=" << (art.sol.converged ? "true" : "false")
        << " intervals=" << art.sol.intervals.size() << "\n";
    err << "solve: wall time " << elapsed << " s\n";
    if (!art.sol.converged) {
        err << "solve: Picard iteration exhausted max_iter before reaching tol\n";
        return 1;
    }
    return 0;
}

int cmd_verify(const CliOptions& opt, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = load_config(opt);
    const auto t0 = std::chrono::steady_clock::now();

    json report;
    bool all_pass = true;
    auto record = [&](const std::string& name, bool pass, json detail) {
        detail["pass"] = pass;
        report[name] = std::move(detail);
        all_pass = all_pass && pass;
        out << (pass ? "[PASS] " : "[FAIL] ") << name << "\n";
    };
    auto selected = [&](const std::string& name) {
        return std::find(cfg.checks.begin(), cfg.checks.end(), name) != cfg.checks.end();
    };

    std::optional<SolveArtifacts> art;
    auto ensure_solution = [&]() -> SolveArtifacts& {
        if (!art) art.emplace(run_solver(cfg));
        return *art;
    };

    if (selected("certificate")) {
        try {
            const ContractionCertificate cert =
                build_certificate(cfg.problem.lip_c, cfg.problem.alpha, cfg.problem.T,
                                  cfg.certificate_overrides());
            record("certificate", true, cert.to_json());
        } catch (const std::exception& e) {
            record("certificate", false, json{{"error", e.what()}});
        }
    }
    if (selected("apriori")) {
        try {
            SolveArtifacts& a = ensure_solution();
            const AprioriReport rep = check_apriori_bound(a.sol.y, a.sol.z, cfg.problem, a.ens, 0,
                                                          a.ens.grid().n_steps);
            record("apriori", rep.pass,
                   json{{"lhs", rep.lhs}, {"rhs", rep.rhs}, {"slack_ratio", rep.slack_ratio}});
        } catch (const std::exception& e) {
            record("apriori", false, json{{"error", e.what()}});
        }
    }
    if (selected("uniqueness")) {
        try {
            SolveArtifacts& a = ensure_solution();
            SolverConfig scfg;
            scfg.tol = cfg.tol;
            scfg.max_iter = cfg.max_iter;
            scfg.inner_iterations = cfg.inner_iterations;
            scfg.threads = cfg.resolved_threads();
            const UniquenessReport rep =
                run_uniqueness_test(cfg.problem, a.ens, a.reg, a.cert, scfg);
            record("uniqueness", rep.pass,
                   json{{"distance", rep.distance}, {"tol", rep.tol}});
        } catch (const std::exception& e) {
            record("uniqueness", false, json{{"error", e.what()}});
        }
    }
    if (selected("contraction")) {
        try {
            if (!cfg.problem.drivers_depend_on_solution()) {
                // Theta is a constant map here: the iteration lands on its
                // fixed point after one sweep and no ratio sequence exists.
                record("contraction", true,
                       json{{"skipped", "drivers do not depend on (y, z)"}});
            } else {
                SolveArtifacts& a = ensure_solution();
                json detail = json::array();
                bool pass = true;
                for (const IntervalStats& st : a.sol.intervals) {
                    const ContractionReport rep =
                        measure_contraction_ratios(st.residuals, a.cert.lambda_factor);
                    detail.push_back(json{{"s_lo", st.s_lo},
                                          {"s_hi", st.s_hi},
                                          {"ratios", rep.ratios},
                                          {"lambda", rep.lambda_factor}});
                    pass = pass && rep.pass;
                }
                record("contraction", pass, json{{"intervals", std::move(detail)}});
            }
        } catch (const std::exception& e) {
            record("contraction", false, json{{"error", e.what()}});
        }
    }
    if (selected("oracles")) {
        try {
            OracleSuiteConfig ocfg;
            ocfg.seed = cfg.seed;
            ocfg.threads = cfg.resolved_threads();
            const std::vector<OracleRow> rows = run_oracle_suite(ocfg);
            bool pass = true;
            for (const OracleRow& r : rows) {
                pass = pass && r.pass;
                out << "  oracle " << r.name << ": err_y=" << fmt(r.err_y)
                    << " err_z=" << fmt(r.err_z) << (r.pass ? " ok" : " FAIL") << "\n";
            }
            record("oracles", pass, json{{"rows", oracle_rows_to_json(rows)}});
        } catch (const std::exception& e) {
            record("oracles", false, json{{"error", e.what()}});
        }
    }

    report["pass"] = all_pass;
    std::filesystem::create_directories(cfg.out_dir);
    write_file(std::filesystem::path(cfg.out_dir) / "report.json", report.dump(2) + "\n");
    out << (all_pass ? "verify: all selected checks passed\n"
                     : "verify: at least one check failed\n");
    err << "verify: wall time "
        << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
        << " s\n";
    return all_pass ? 0 : 1;
}

int cmd_oracles(const CliOptions& opt, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = load_config(opt);
    const auto t0 = std::chrono::steady_clock::now();
    OracleSuiteConfig ocfg;
    ocfg.seed = cfg.seed;
    ocfg.threads = cfg.resolved_threads();
    const std::vector<OracleRow> rows = run_oracle_suite(ocfg);

    out << "problem          N      M    err_y      err_z      status\n";
    bool pass = true;
    for (const OracleRow& r : rows) {
        char line[160];
        std::snprintf(line, sizeof line, "%-15s %4d %6d  %-9.4g  %-9.4g  %s\n", r.name.c_str(),
                      r.N, r.M, r.err_y, r.err_z, r.pass ? "ok" : "FAIL");
        out << line;
        pass = pass && r.pass;
    }
    std::filesystem::create_directories(cfg.out_dir);
    json j;
    j["rows"] = oracle_rows_to_json(rows);
    j["pass"] = pass;
    write_file(std::filesystem::path(cfg.out_dir) / "oracles.json", j.dump(2) + "\n");
    err << "oracles: wall time "
        << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
        << " s\n";
    return pass ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Monte Carlo solver and verification harness for doubly stochastic "
                 "Volterra integral equations"};
    app.require_subcommand(1);

    CliOptions opt;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", opt.config_path, "JSON run configuration")->required();
        sub->add_option("--seed", opt.seed, "Override solver.seed");
        sub->add_option("--out-dir", opt.out_dir, "Override output.dir");
        sub->add_option("--threads", opt.threads, "Override solver.threads (0 = hardware)");
    };

    CLI::App* solve = app.add_subcommand("solve", "Solve the configured problem");
    add_common(solve);
    CLI::App* verify = app.add_subcommand("verify", "Run the verification checks");
    add_common(verify);
    std::string checks_csv;
    verify->add_option("--checks", checks_csv,
                       "Comma-separated subset of "
                       "certificate,apriori,uniqueness,contraction,oracles");
    CLI::App* cert = app.add_subcommand("certificate", "Print the contraction certificate");
    add_common(cert);
    CLI::App* oracles = app.add_subcommand("oracles", "Run the closed-form oracle table");
    add_common(oracles);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 2;
    }
    if (!checks_csv.empty()) {
        std::stringstream ss(checks_csv);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) opt.checks.push_back(item);
    }

    try {
        if (solve->parsed()) return cmd_solve(opt, out, err);
        if (verify->parsed()) return cmd_verify(opt, out, err);
        if (cert->parsed()) return cmd_certificate(opt, out, err);
        if (oracles->parsed()) return cmd_oracles(opt, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace bdsvie::cli
