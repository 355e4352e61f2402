#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

#include "cutofflab/cutoff.hpp"
#include "cutofflab/io.hpp"
#include "cutofflab/scenarios.hpp"
#include "cutofflab/verify.hpp"

namespace {

using namespace cutofflab;

int exit_code(const Error& e) {
    switch (e.code()) {
        case Errc::ConfigError: return 2;
        case Errc::UnstableDrift: return 3;
        case Errc::MomentGate: return 4;
        default: return 1;
    }
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("CUTOFFLAB_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

struct CliArgs {
    std::string configPath;
    std::string outDir;
    std::string scenario;
    std::vector<double> x;
    std::uint64_t seed = 0;
    bool seedSet = false;
    int threads = 0;
    double gamma = 1.0, kappa = 1.0, lambda = 1.0, theta = 3.0;
    double sigma1 = 1.0, sigman = 1.0;
    int n = 5, dim = 3;
};

RunConfig load_config(const CliArgs& args) {
    RunConfig cfg;
    if (!args.configPath.empty()) {
        cfg = parse_config_file(args.configPath);
    } else if (!args.scenario.empty()) {
        cfg.system = build_scenario(args.scenario,
                                    {{"gamma", args.gamma},
                                     {"kappa", args.kappa},
                                     {"lambda", args.lambda},
                                     {"theta", args.theta},
                                     {"sigma1", args.sigma1},
                                     {"sigman", args.sigman},
                                     {"n", static_cast<double>(args.n)},
                                     {"d", static_cast<double>(args.dim)}});
    } else {
        fail(Errc::ConfigError, "provide --config or --scenario");
    }
    if (!args.x.empty()) {
        cfg.system.x = Eigen::Map<const VectorXd>(args.x.data(), args.x.size());
        if (cfg.system.x.size() != cfg.system.Q.rows())
            fail(Errc::ConfigError, "--x does not match the system dimension");
    }
    if (args.seedSet) cfg.seed = args.seed;
    if (args.threads > 0) cfg.threads = args.threads;
    if (!args.outDir.empty()) cfg.outDir = args.outDir;
    cfg.threads = resolve_threads(cfg.threads);
    return cfg;
}

Analysis run_analysis(const RunConfig& cfg) {
    AnalysisOptions opts;
    opts.window = cfg.window;
    opts.horizonT = cfg.horizonT;
    opts.eta = cfg.eta;
    opts.sim.dt = cfg.dt;
    opts.sim.seed = cfg.seed;
    opts.sim.threads = cfg.threads;
    return analyze_system(cfg.system, opts);
}

int cmd_analyze(const CliArgs& args) {
    const RunConfig cfg = load_config(args);
    const Analysis analysis = run_analysis(cfg);
    std::filesystem::create_directories(cfg.outDir);
    write_file(cfg.outDir + "/report.json", report_json(cfg, analysis));
    std::cout << "verdict: " << to_string(analysis.report.verdict) << "\n"
              << "report: " << cfg.outDir << "/report.json\n";
    return 0;
}

int cmd_curve(const CliArgs& args) {
    const RunConfig cfg = load_config(args);
    const Analysis analysis = run_analysis(cfg);
    SimOptions sim;
    sim.dt = cfg.dt;
    sim.seed = cfg.seed;
    sim.threads = cfg.threads;
    const auto rRows =
        profile_curve(cfg.system, analysis, cfg.epsilons, cfg.rGrid, cfg.samples, cfg.pPrime, sim);
    const auto dRows = dichotomy_curve(cfg.system, analysis, cfg.epsilons, cfg.deltaGrid,
                                       cfg.samples, cfg.pPrime, sim);
    std::filesystem::create_directories(cfg.outDir);
    write_file(cfg.outDir + "/report.json", report_json(cfg, analysis));
    write_file(cfg.outDir + "/curve_r.csv", curve_r_csv(rRows));
    write_file(cfg.outDir + "/curve_delta.csv", curve_delta_csv(dRows));
    write_file(cfg.outDir + "/plot_curves.py", plot_script());
    std::cout << "wrote curve_r.csv, curve_delta.csv, plot_curves.py to " << cfg.outDir << "\n";
    return 0;
}

int print_checks(const std::vector<CheckResult>& checks) {
    bool ok = true;
    for (const auto& c : checks) {
        std::cout << (c.pass ? "PASS" : "FAIL") << "  " << c.name;
        if (c.tolerance > 0.0)
            std::cout << "  (expected " << c.expected << ", got " << c.actual << ", tol "
                      << c.tolerance << ")";
        std::cout << "\n";
        ok = ok && c.pass;
    }
    return ok ? 0 : 5;
}

int cmd_reproduce(const std::string& target) {
    if (target == "jacobi-chain") return print_checks(verify_jacobi_chain());
    if (target == "oscillator") return print_checks(verify_oscillator());
    if (target == "entropy-dichotomy") return print_checks(verify_entropy_dichotomy());
    fail(Errc::ConfigError, "unknown reproduction target: " + target);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cutoff thermalization analysis for Levy-driven Ornstein-Uhlenbeck systems"};
    app.require_subcommand(1);

    CliArgs args;
    std::string target;

    auto addCommon = [&](CLI::App* sub) {
        sub->add_option("--config", args.configPath, "JSON run configuration");
        sub->add_option("--out", args.outDir, "output directory");
        sub->add_option("--seed", args.seed, "RNG seed")->each([&](const std::string&) {
            args.seedSet = true;
        });
        sub->add_option("--threads", args.threads, "worker threads (default: all cores)");
        sub->add_option("--scenario", args.scenario,
                        "oscillator | gradient | jacobi-chain | rotation51 | suspension52 | "
                        "jordan-block53");
        sub->add_option("--x", args.x, "initial state override");
        sub->add_option("--gamma", args.gamma, "scenario gamma");
        sub->add_option("--kappa", args.kappa, "scenario kappa");
        sub->add_option("--lambda", args.lambda, "scenario lambda");
        sub->add_option("--theta", args.theta, "scenario theta");
        sub->add_option("--sigma1", args.sigma1, "chain coupling at the first oscillator");
        sub->add_option("--sigman", args.sigman, "chain coupling at the last oscillator");
        sub->add_option("--n", args.n, "chain length");
        sub->add_option("--d", args.dim, "Jordan block dimension");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "spectral analysis and cutoff report");
    addCommon(analyze);
    CLI::App* curve = app.add_subcommand("curve", "verification sweeps as CSV curves");
    addCommon(curve);
    CLI::App* reproduce = app.add_subcommand("reproduce", "pinned worked-example checks");
    reproduce->add_option("target", target, "jacobi-chain | oscillator | entropy-dichotomy")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(analyze)) return cmd_analyze(args);
        if (app.got_subcommand(curve)) return cmd_curve(args);
        return cmd_reproduce(target);
    } catch (const cutofflab::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
