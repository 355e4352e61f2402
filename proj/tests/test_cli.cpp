#include <doctest.h>

#include <json.hpp>

#include <fstream>

#include "cutofflab/io.hpp"
#include "cutofflab/verify.hpp"

using namespace cutofflab;

namespace {

const char* kRotationConfig = R"({
  "system": {"scenario": "rotation51", "params": {"lambda": 1.0, "theta": 3.0}},
  "x": [1.0, 0.0],
  "noise": {"type": "brownian", "covariance": [[1.0, 0.0], [0.0, 1.0]]},
  "p": 2.0,
  "epsilons": [0.01],
  "r_grid": [0.0, 1.0],
  "delta_grid": [2.0],
  "samples": 200,
  "seed": 5
})";

Analysis analyze_config(const RunConfig& cfg) {
    AnalysisOptions opts;
    opts.window = cfg.window;
    opts.momentSamples = 2000;
    opts.sim.seed = cfg.seed;
    opts.sim.threads = 1;
    return analyze_system(cfg.system, opts);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config parsing") {
    const RunConfig cfg = parse_config_text(kRotationConfig);
    CHECK(cfg.system.Q.rows() == 2);
    CHECK(cfg.system.Q(0, 1) == doctest::Approx(3.0));
    CHECK(cfg.system.x(0) == 1.0);
    CHECK(cfg.samples == 200);
    CHECK(cfg.pPrime == 2.0);  // defaults to p
}

TEST_CASE("config rejection paths") {
    CHECK_THROWS_AS(parse_config_text("{not json"), Error);
    CHECK_THROWS_AS(parse_config_text(R"({"system": {}})"), Error);
    // eps outside (0,1)
    CHECK_THROWS_AS(parse_config_text(R"({
        "system": {"scenario": "rotation51"},
        "epsilons": [1.5]})"),
                    Error);
    // x dimension mismatch
    CHECK_THROWS_AS(parse_config_text(R"({
        "system": {"scenario": "rotation51"},
        "x": [1.0, 0.0, 0.0]})"),
                    Error);
    try {
        parse_config_text("{}");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ConfigError);
    }
}

TEST_CASE("explicit Q with every noise family parses") {
    const char* text = R"({
      "system": {"Q": [[1.0, 0.0], [0.0, 2.0]]},
      "x": [1.0, 1.0],
      "noise": {"type": "compound_poisson", "intensity": 2.0,
                "jumps": {"atoms": [{"weight": 0.5, "point": [1.0, 0.0]},
                                     {"weight": 0.5, "point": [-1.0, 0.0]}]}}
    })";
    const RunConfig cfg = parse_config_text(text);
    CHECK(noise_dim(cfg.system.noise) == 2);
    CHECK(p_max(cfg.system.noise) > 100.0);

    const char* red = R"({
      "system": {"Q": [[1.0]]},
      "x": [1.0],
      "noise": {"type": "red_noise", "Lambda": [[2.0]],
                "inner": {"type": "alpha_stable", "alpha": 1.5, "scale": 1.0, "dim": 1}}
    })";
    CHECK(p_max(parse_config_text(red).system.noise) == doctest::Approx(1.5));
}

namespace {

// walks the shipped schema's "required"/"properties" tree and checks the
// report instance structurally
void check_required(const nlohmann::json& schema, const nlohmann::json& instance) {
    if (schema.contains("required"))
        for (const auto& key : schema["required"]) {
            INFO("required key: ", key.get<std::string>());
            REQUIRE(instance.contains(key.get<std::string>()));
        }
    if (!schema.contains("properties")) return;
    for (const auto& [key, sub] : schema["properties"].items()) {
        if (!instance.contains(key)) continue;
        const auto& val = instance.at(key);
        if (sub.contains("const")) CHECK(val == sub["const"]);
        if (sub.contains("enum")) {
            bool found = false;
            for (const auto& option : sub["enum"]) found = found || val == option;
            CHECK(found);
        }
        if (sub.value("type", nlohmann::json{}) == "object" || sub.contains("required"))
            if (val.is_object()) check_required(sub, val);
    }
}

}  // namespace

TEST_CASE("report validates against the shipped schema") {
    const RunConfig cfg = parse_config_text(kRotationConfig);
    const Analysis analysis = analyze_config(cfg);
    const std::string text = report_json(cfg, analysis);
    const nlohmann::json j = nlohmann::json::parse(text);

    std::ifstream schemaFile(std::string(CUTOFFLAB_SOURCE_DIR) + "/docs/report.schema.json");
    REQUIRE(schemaFile.good());
    const nlohmann::json schema = nlohmann::json::parse(schemaFile);
    check_required(schema, j);

    CHECK(j.at("schema_version") == "1");
    CHECK(j["cutoff"].at("verdict") == "explicit-profile");
    CHECK(j["spectral"].at("rate").get<double>() == doctest::Approx(1.0));
    CHECK(j.contains("weighted_growth"));  // Brownian run carries the weighted verdict

    // numbers round-trip through the serialization
    const double amp = j["cutoff"]["profile_amplitude"].get<double>();
    CHECK(amp == analysis.report.profileAmplitude);
}

TEST_CASE("fixed seed makes reports and curves byte-identical") {
    const RunConfig cfg = parse_config_text(kRotationConfig);
    const Analysis a1 = analyze_config(cfg);
    const Analysis a2 = analyze_config(cfg);
    CHECK(report_json(cfg, a1) == report_json(cfg, a2));

    SimOptions sim;
    sim.seed = cfg.seed;
    sim.threads = 1;
    const auto rows1 =
        profile_curve(cfg.system, a1, cfg.epsilons, cfg.rGrid, cfg.samples, cfg.pPrime, sim);
    const auto rows2 =
        profile_curve(cfg.system, a2, cfg.epsilons, cfg.rGrid, cfg.samples, cfg.pPrime, sim);
    CHECK(curve_r_csv(rows1) == curve_r_csv(rows2));

    const auto d1 =
        dichotomy_curve(cfg.system, a1, cfg.epsilons, cfg.deltaGrid, cfg.samples, cfg.pPrime, sim);
    CHECK(curve_delta_csv(d1).rfind("epsilon,delta,", 0) == 0);
}

TEST_CASE("curve rows respect the sandwich at modest sample sizes") {
    const RunConfig cfg = parse_config_text(kRotationConfig);
    const Analysis analysis = analyze_config(cfg);
    SimOptions sim;
    sim.seed = 123;
    const auto rows =
        profile_curve(cfg.system, analysis, cfg.epsilons, cfg.rGrid, 400, cfg.pPrime, sim);
    REQUIRE(!rows.empty());
    for (const auto& row : rows) {
        CHECK(row.empirical >= row.lo - 0.1);
        CHECK(row.empirical <= row.hi + 0.1);
        CHECK(std::isfinite(row.predicted));
    }
}

TEST_CASE("delta sweep decays and the window tail sits at the residual level") {
    // 1-D system where the quantile path keeps the empirical floor small
    RunConfig cfg;
    cfg.system.Q = MatrixXd::Identity(1, 1);
    cfg.system.x = VectorXd::Constant(1, 3.0);
    cfg.system.noise = make_noise(Brownian{MatrixXd::Identity(1, 1)});
    cfg.system.p = 2.0;
    SimOptions sim;
    sim.seed = 31;
    const int n = 8000;

    AnalysisOptions opts;
    opts.momentSamples = 4000;
    opts.sim = sim;
    const Analysis an = analyze_system(cfg.system, opts);

    const auto rows =
        dichotomy_curve(cfg.system, an, {1e-2, 1e-3}, {0.5, 2.0}, n, 2.0, sim);
    REQUIRE(rows.size() == 4);
    // delta = 2 rows decrease with eps; delta = 0.5 rows increase
    auto find = [&](double eps, double delta) {
        for (const auto& r : rows)
            if (r.epsilon == eps && r.r == delta) return r.empirical;
        return -1.0;
    };
    CHECK(find(1e-3, 2.0) < find(1e-2, 2.0));
    CHECK(find(1e-3, 0.5) > find(1e-2, 0.5));

    // far right of the window the distance drops to the O_t residual level
    const auto tail = profile_curve(cfg.system, an, {1e-2}, {6.0}, n, 2.0, sim);
    REQUIRE(tail.size() == 1);
    CHECK(tail[0].empirical < 0.02 * cfg.system.x.norm());
    CHECK(tail[0].empirical <= tail[0].hi);
}

TEST_CASE("plot script references only the CSVs") {
    const std::string script = plot_script();
    CHECK(script.find("curve_r.csv") != std::string::npos);
    CHECK(script.find("curve_delta.csv") != std::string::npos);
    CHECK(script.find("report.json") == std::string::npos);
}

TEST_CASE("reproduction harness shapes") {
    const auto checks = verify_entropy_dichotomy();
    CHECK(checks.size() == 2);
    CHECK(all_pass(checks));
}

}  // TEST_SUITE
