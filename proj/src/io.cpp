#include "cutofflab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cutofflab/scenarios.hpp"

namespace cutofflab {

using nlohmann::json;

namespace {

MatrixXd parse_matrix(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        fail(Errc::ConfigError, what + ": expected a row-major array of arrays");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j[0].size());
    MatrixXd M(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(j[i].size()) != cols)
            fail(Errc::ConfigError, what + ": ragged rows");
        for (int k = 0; k < cols; ++k) M(i, k) = j[i][k].get<double>();
    }
    return M;
}

VectorXd parse_vector(const json& j, const std::string& what) {
    if (!j.is_array()) fail(Errc::ConfigError, what + ": expected an array");
    VectorXd v(j.size());
    for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
}

NoiseSpec parse_noise(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "brownian") return make_noise(Brownian{parse_matrix(j.at("covariance"), "noise")});
    if (type == "alpha_stable")
        return make_noise(AlphaStable{j.at("alpha").get<double>(), j.at("scale").get<double>(),
                                      j.at("dim").get<int>()});
    if (type == "deterministic")
        return make_noise(Deterministic{parse_vector(j.at("drift"), "noise")});
    if (type == "compound_poisson") {
        const double intensity = j.at("intensity").get<double>();
        const json& law = j.at("jumps");
        if (law.contains("atoms")) {
            const json& atoms = law.at("atoms");
            const int count = static_cast<int>(atoms.size());
            if (count == 0) fail(Errc::ConfigError, "compound_poisson: no atoms");
            VectorXd weights(count);
            MatrixXd points(count, atoms[0].at("point").size());
            for (int i = 0; i < count; ++i) {
                weights(i) = atoms[i].at("weight").get<double>();
                points.row(i) = parse_vector(atoms[i].at("point"), "atom").transpose();
            }
            weights /= weights.sum();
            return make_noise(CompoundPoisson{intensity, JumpAtoms{weights, points}});
        }
        if (law.contains("gaussian")) {
            const json& g = law.at("gaussian");
            return make_noise(CompoundPoisson{
                intensity, JumpGaussian{parse_vector(g.at("mean"), "jump mean"),
                                        parse_matrix(g.at("covariance"), "jump covariance")}});
        }
        fail(Errc::ConfigError, "compound_poisson: jumps must be atoms or gaussian");
    }
    if (type == "red_noise") {
        auto inner = std::make_shared<NoiseSpec>(parse_noise(j.at("inner")));
        return make_noise(RedNoise{parse_matrix(j.at("Lambda"), "red noise"), inner});
    }
    fail(Errc::ConfigError, "unknown noise type: " + type);
}

json noise_json(const NoiseSpec& spec);

json matrix_json(const MatrixXd& M) {
    json rows = json::array();
    for (int i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (int k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
        rows.push_back(row);
    }
    return rows;
}

json vector_json(const VectorXd& v) {
    json out = json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json noise_json(const NoiseSpec& spec) {
    json out;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Brownian>) {
                out["type"] = "brownian";
                out["covariance"] = matrix_json(s.covariance);
            } else if constexpr (std::is_same_v<T, CompoundPoisson>) {
                out["type"] = "compound_poisson";
                out["intensity"] = s.intensity;
                if (std::holds_alternative<JumpAtoms>(s.law)) {
                    const auto& a = std::get<JumpAtoms>(s.law);
                    json atoms = json::array();
                    for (int i = 0; i < a.weights.size(); ++i)
                        atoms.push_back({{"weight", a.weights(i)},
                                         {"point", vector_json(a.points.row(i).transpose())}});
                    out["jumps"] = {{"atoms", atoms}};
                } else {
                    const auto& g = std::get<JumpGaussian>(s.law);
                    out["jumps"] = {{"gaussian",
                                     {{"mean", vector_json(g.mean)},
                                      {"covariance", matrix_json(g.covariance)}}}};
                }
            } else if constexpr (std::is_same_v<T, AlphaStable>) {
                out["type"] = "alpha_stable";
                out["alpha"] = s.alpha;
                out["scale"] = s.scale;
                out["dim"] = s.dim;
            } else if constexpr (std::is_same_v<T, Deterministic>) {
                out["type"] = "deterministic";
                out["drift"] = vector_json(s.drift);
            } else if constexpr (std::is_same_v<T, RedNoise>) {
                out["type"] = "red_noise";
                out["Lambda"] = matrix_json(s.Lambda);
                out["inner"] = noise_json(*s.inner);
            }
        },
        spec.value);
    return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        fail(Errc::ConfigError, std::string("config parse error: ") + e.what());
    }
    RunConfig cfg;
    try {
        const json& sys = j.at("system");
        if (sys.contains("Q")) {
            cfg.system.Q = parse_matrix(sys.at("Q"), "system.Q");
            if (cfg.system.Q.rows() != cfg.system.Q.cols())
                fail(Errc::ConfigError, "system.Q must be square");
            // isotropic Brownian unless the config says otherwise
            cfg.system.noise =
                make_noise(Brownian{MatrixXd::Identity(cfg.system.Q.rows(), cfg.system.Q.rows())});
        } else if (sys.contains("scenario")) {
            std::vector<std::pair<std::string, double>> params;
            if (sys.contains("params"))
                for (const auto& [k, v] : sys.at("params").items())
                    params.emplace_back(k, v.get<double>());
            cfg.system = build_scenario(sys.at("scenario").get<std::string>(), params);
        } else {
            fail(Errc::ConfigError, "system needs either Q or scenario");
        }
        if (j.contains("x")) cfg.system.x = parse_vector(j.at("x"), "x");
        if (j.contains("noise")) cfg.system.noise = parse_noise(j.at("noise"));
        if (cfg.system.x.size() != cfg.system.Q.rows())
            fail(Errc::ConfigError, "x does not match the system dimension");
        if (noise_dim(cfg.system.noise) != cfg.system.Q.rows())
            fail(Errc::ConfigError, "noise does not match the system dimension");
        if (j.contains("p")) cfg.system.p = j.at("p").get<double>();
        cfg.pPrime = j.value("p_prime", cfg.system.p);
        if (j.contains("epsilons")) {
            cfg.epsilons.clear();
            for (const auto& e : j.at("epsilons")) cfg.epsilons.push_back(e.get<double>());
        }
        for (double e : cfg.epsilons)
            if (e <= 0.0 || e >= 1.0) fail(Errc::ConfigError, "epsilons must lie in (0,1)");
        if (j.contains("r_grid")) {
            cfg.rGrid.clear();
            for (const auto& r : j.at("r_grid")) cfg.rGrid.push_back(r.get<double>());
        }
        if (j.contains("delta_grid")) {
            cfg.deltaGrid.clear();
            for (const auto& d : j.at("delta_grid")) cfg.deltaGrid.push_back(d.get<double>());
        }
        cfg.window = j.value("window", 1.0);
        cfg.samples = j.value("samples", 1000);
        if (cfg.samples < 100)
            fail(Errc::ConfigError, "samples must be >= 100 for distance estimation");
        cfg.dt = j.value("dt", 0.0);
        cfg.seed = j.value("seed", std::uint64_t{1});
        cfg.threads = j.value("threads", 0);
        cfg.horizonT = j.value("horizon_T", 0.0);
        cfg.eta = j.value("eta", 0.1);
        cfg.outDir = j.value("out_dir", std::string("."));
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        fail(Errc::ConfigError, std::string("config error: ") + e.what());
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::ConfigError, "cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string report_json(const RunConfig& config, const Analysis& analysis) {
    json j;
    j["schema_version"] = "1";
    j["system"] = {{"Q", matrix_json(config.system.Q)},
                   {"x", vector_json(config.system.x)},
                   {"noise", noise_json(config.system.noise)},
                   {"p", config.system.p}};

    const auto& dec = analysis.dec;
    json pairs = json::array();
    for (const auto& p : dec.pairs)
        pairs.push_back(
            {{"theta", p.theta}, {"re", vector_json(p.re)}, {"im", vector_json(p.im)}});
    j["spectral"] = {{"rate", dec.rate},
                     {"ell", dec.ell},
                     {"m", dec.m()},
                     {"v1", dec.hasRealPart() ? vector_json(dec.v1) : json(nullptr)},
                     {"pairs", pairs}};

    const auto& g = analysis.growth;
    j["normal_growth"] = {{"resonant", g.resonant},
                          {"orthogonal", g.orthogonal},
                          {"equal_norms", g.equalNorms},
                          {"profile_exists", g.profileExists},
                          {"omega_on_sphere", g.omegaOnSphere},
                          {"representative_norm", g.representativeNorm}};

    const auto& r = analysis.report;
    j["cutoff"] = {{"verdict", to_string(r.verdict)},
                   {"rate", r.rate},
                   {"ell", r.ell},
                   {"profile_amplitude", r.profileAmplitude},
                   {"window", r.window},
                   {"resonant", r.resonant},
                   {"error_constants",
                    {{"C0", r.consts.C0},
                     {"q_star", r.consts.qStar},
                     {"gap", std::isfinite(r.consts.gap) ? json(r.consts.gap) : json(nullptr)},
                     {"K", r.consts.K},
                     {"stationary_moment", std::isnan(r.consts.Emom) ? json(nullptr)
                                                                     : json(r.consts.Emom)},
                     {"stationary_moment_se", r.consts.EmomSE},
                     {"stationary_moment_bound",
                      std::isnan(r.consts.EmomBound) ? json(nullptr)
                                                     : json(r.consts.EmomBound)}}},
                   {"epsilon_interval",
                    {{"lo", r.epsInterval.lo},
                     {"hi", r.epsInterval.hi},
                     {"empty", r.epsInterval.empty}}}};

    if (analysis.hasWeighted) {
        const auto& wg = analysis.weighted;
        j["weighted_growth"] = {{"orthogonal", wg.orthogonal},
                                {"equal_norms", wg.equalNorms},
                                {"profile_exists", wg.profileExists},
                                {"representative_norm", wg.representativeNorm},
                                {"profile_amplitude", analysis.weightedAmplitude}};
    }
    return j.dump(2) + "\n";
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string curve_r_csv(const std::vector<CurveRow>& rows) {
    std::string out = "epsilon,r,empirical_renormalized_wp,predicted_profile,sandwich_lo,sandwich_hi\n";
    for (const auto& r : rows)
        out += fmt(r.epsilon) + "," + fmt(r.r) + "," + fmt(r.empirical) + "," +
               fmt(r.predicted) + "," + fmt(r.lo) + "," + fmt(r.hi) + "\n";
    return out;
}

std::string curve_delta_csv(const std::vector<CurveRow>& rows) {
    std::string out = "epsilon,delta,empirical_renormalized_wp\n";
    for (const auto& r : rows)
        out += fmt(r.epsilon) + "," + fmt(r.r) + "," + fmt(r.empirical) + "\n";
    return out;
}

std::string plot_script() {
    return R"(#!/usr/bin/env python3
"""Plots the curve CSVs emitted next to this script. Reads only the CSVs."""
import csv
import sys
from collections import defaultdict

import matplotlib.pyplot as plt


def load(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def main(outdir="."):
    fig, axes = plt.subplots(1, 2, figsize=(11, 4))
    try:
        rows = load(f"{outdir}/curve_r.csv")
        by_eps = defaultdict(list)
        for row in rows:
            by_eps[row["epsilon"]].append(row)
        for eps, grp in sorted(by_eps.items()):
            rs = [float(g["r"]) for g in grp]
            axes[0].plot(rs, [float(g["empirical_renormalized_wp"]) for g in grp],
                         "o-", label=f"eps={eps}")
            axes[0].plot(rs, [float(g["predicted_profile"]) for g in grp], "k--", alpha=0.5)
        axes[0].set_xlabel("r"); axes[0].set_ylabel("renormalized distance")
        axes[0].set_title("profile window"); axes[0].legend()
    except FileNotFoundError:
        pass
    try:
        rows = load(f"{outdir}/curve_delta.csv")
        by_delta = defaultdict(list)
        for row in rows:
            by_delta[row["delta"]].append(row)
        for delta, grp in sorted(by_delta.items()):
            es = [float(g["epsilon"]) for g in grp]
            axes[1].loglog(es, [float(g["empirical_renormalized_wp"]) for g in grp],
                           "s-", label=f"delta={delta}")
        axes[1].set_xlabel("epsilon"); axes[1].set_ylabel("renormalized distance")
        axes[1].set_title("delta dichotomy"); axes[1].legend()
    except FileNotFoundError:
        pass
    fig.tight_layout()
    fig.savefig(f"{outdir}/curves.png", dpi=150)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else ".")
)";
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::ConfigError, "cannot write " + path);
    out << content;
}

}  // namespace cutofflab
