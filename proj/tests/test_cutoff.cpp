#include <doctest.h>

#include <cmath>

#include "cutofflab/cutoff.hpp"
#include "cutofflab/scenarios.hpp"
#include "test_util.hpp"

using namespace cutofflab;
using namespace cutofflab::testutil;

namespace {

CutoffReport simple_report(double rate, int ell, double amplitude, double C0, double Emom,
                           double K, double gap) {
    CutoffReport r;
    r.verdict = Verdict::ExplicitProfile;
    r.rate = rate;
    r.ell = ell;
    r.profileAmplitude = amplitude;
    r.window = 1.0;
    r.consts.C0 = C0;
    r.consts.qStar = rate / 2.0;
    r.consts.Emom = Emom;
    r.consts.K = K;
    r.consts.gap = gap;
    return r;
}

}  // namespace

TEST_SUITE("cutoff") {

TEST_CASE("time scale formula") {
    CHECK(cutoff_time(1.0, 1, std::exp(-5.0)) == doctest::Approx(5.0));
    CHECK(cutoff_time(2.0, 1, std::exp(-5.0)) == doctest::Approx(2.5));
    CHECK(cutoff_time(1.0, 2, std::exp(-10.0)) ==
          doctest::Approx(10.0 + std::log(10.0)).epsilon(1e-12));

    // strictly decreasing in eps below 1/e
    double prev = cutoff_time(1.3, 2, 0.3);
    for (double eps : {0.1, 0.03, 0.001, 1e-6}) {
        const double t = cutoff_time(1.3, 2, eps);
        CHECK(t > prev);
        prev = t;
    }

    CHECK_THROWS_AS(cutoff_time(1.0, 1, 1.0), Error);
    CHECK_THROWS_AS(cutoff_time(1.0, 2, 0.5), Error);  // log-log domain
    CHECK_NOTHROW(cutoff_time(1.0, 1, 0.5));
}

TEST_CASE("profile value") {
    CutoffReport r = simple_report(1.0, 1, 1.0, 1.0, 1.0, 1.0, 1.0);
    CHECK(profile_value(r, 0.0) == doctest::Approx(1.0));
    // halves every ln2 / (q w)
    const double h = std::log(2.0);
    CHECK(profile_value(r, h) == doctest::Approx(0.5));
    CHECK(profile_value(r, 2.0 * h) == doctest::Approx(0.25));

    // gradient system Q = diag(1,2), x = (0,1): amplitude |x| = 1, rate 2
    MatrixXd Q{{1.0, 0.0}, {0.0, 2.0}};
    SystemSpec sys{Q, VectorXd{{0.0, 1.0}}, make_noise(Brownian{MatrixXd::Identity(2, 2)}), 2.0};
    AnalysisOptions opts;
    opts.momentSamples = 2000;
    const Analysis an = analyze_system(sys, opts);
    CHECK(an.report.verdict == Verdict::ExplicitProfile);
    CHECK(profile_value(an.report, 0.5) == doctest::Approx(std::exp(-2.0 * 0.5)).epsilon(1e-9));

    r.verdict = Verdict::WindowOnly;
    CHECK_THROWS_AS(profile_value(r, 0.0), Error);
}

TEST_CASE("sandwich bounds") {
    MatrixXd Q = MatrixXd::Identity(2, 2);
    VectorXd x{{1.0, 0.0}};

    Sandwich s = sandwich_bounds(Q, x, 2.0, 0.1, 0.0);
    CHECK(s.lo == doctest::Approx(s.hi));
    CHECK(s.lo == doctest::Approx(std::exp(-2.0) / 0.1));

    s = sandwich_bounds(Q, VectorXd::Zero(2), 2.0, 0.1, 0.3);
    CHECK(s.lo <= 0.0);
    CHECK(s.hi >= 0.0);
    CHECK(s.lo == doctest::Approx(-0.3));

    const double eps = 1e-3;
    s = sandwich_bounds(Q, x, -std::log(eps), eps, 0.2);
    CHECK(s.center == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("delta dichotomy prediction") {
    CHECK(dichotomy_prediction(1.0, 1, 0.5) == Dichotomy::Diverges);
    CHECK(dichotomy_prediction(1.0, 1, 2.0) == Dichotomy::Vanishes);
    CHECK_THROWS_AS(dichotomy_prediction(1.0, 1, 1.0), Error);
}

TEST_CASE("error bound shrinks with eps and uses the spectral gap") {
    MatrixXd Q{{1.0, 0.0}, {0.0, 2.0}};
    SystemSpec sys{Q, VectorXd{{1.0, 1.0}}, make_noise(Brownian{MatrixXd::Identity(2, 2)}), 2.0};
    AnalysisOptions opts;
    opts.momentSamples = 2000;
    const Analysis an = analyze_system(sys, opts);
    CHECK(an.report.consts.gap == doctest::Approx(1.0).epsilon(1e-9));

    // gap/rate = 1, so the bound is proportional to eps
    const double b1 = error_bound(an.report, 1e-2);
    const double b2 = error_bound(an.report, 1e-3);
    const double b3 = error_bound(an.report, 1e-4);
    CHECK(b1 > b2);
    CHECK(b2 > b3);
    CHECK(b1 / 1e-2 == doctest::Approx(b2 / 1e-3).epsilon(1e-9));
}

TEST_CASE("epsilon window endpoints") {
    // q = 1, T = 40, C0 E = 1, K = 1, gap/rate = 1, eta = 0.1 -> [e^{-20}, 0.05]
    CutoffReport r = simple_report(1.0, 1, 1.0, 1.0, 1.0, 1.0, 1.0);
    const EpsilonInterval w = epsilon_window(r, 40.0, 0.1);
    CHECK_FALSE(w.empty);
    CHECK(w.lo == doctest::Approx(std::exp(-20.0)).epsilon(1e-12));
    CHECK(w.hi == doctest::Approx(0.05).epsilon(1e-12));

    // T -> infinity pushes the lower endpoint to zero
    CHECK(epsilon_window(r, 4000.0, 0.1).lo < 1e-300 * 1e300);
    CHECK(epsilon_window(r, 4000.0, 0.1).lo == doctest::Approx(std::exp(-2000.0)));

    // tiny eta with a short horizon crosses over
    const EpsilonInterval empty = epsilon_window(r, 4.0, 1e-9);
    CHECK(empty.empty);
}

TEST_CASE("every eps in the window thermalizes before T") {
    Rng rng(41);
    for (int trial = 0; trial < 25; ++trial) {
        MatrixXd Q = random_stable(rng, 3, 0.4);
        VectorXd x = random_vector(rng, 3);
        if (x.norm() < 1e-3) continue;
        SystemSpec sys{Q, x, make_noise(Brownian{MatrixXd::Identity(3, 3)}), 2.0};
        AnalysisOptions opts;
        opts.momentSamples = 500;
        opts.horizonT = rng.uniform(20.0, 80.0);
        opts.eta = rng.uniform(0.02, 0.5);
        const Analysis an = analyze_system(sys, opts);
        const EpsilonInterval w = an.report.epsInterval;
        if (w.empty) continue;
        for (double f : {0.0, 0.3, 0.7, 1.0}) {
            const double eps = w.lo * std::pow(w.hi / w.lo, f);
            CHECK(2.0 * cutoff_time(an.report.rate, an.report.ell, eps) <= opts.horizonT * (1 + 1e-9));
        }
    }
}

TEST_CASE("window lower endpoint with a log-log correction") {
    // ell = 2: the lower endpoint solves 2 t_eps = T exactly
    CutoffReport r = simple_report(1.0, 2, 1.0, 1.0, 1.0, 0.0, 1.0);
    const double T = 60.0;
    const EpsilonInterval w = epsilon_window(r, T, 0.5);
    REQUIRE_FALSE(w.empty);
    CHECK(2.0 * cutoff_time(r.rate, r.ell, w.lo) == doctest::Approx(T).epsilon(1e-6));
}

TEST_CASE("moment asymptote") {
    CHECK(moment_cutoff_prediction(2.0, 0.5, 4.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(moment_cutoff_prediction(0.0, 0.5, 0.0), Error);
}

TEST_CASE("deterministic profile consistency across the eps grid") {
    // |e^{-Q (t_eps + r w)} x| / eps converges to P(r), error within error_bound
    MatrixXd Q{{1.0, 0.0}, {0.0, 2.0}};
    SystemSpec sys{Q, VectorXd{{1.0, 1.0}}, make_noise(Brownian{MatrixXd::Identity(2, 2)}), 2.0};
    AnalysisOptions opts;
    opts.momentSamples = 2000;
    const Analysis an = analyze_system(sys, opts);
    REQUIRE(an.report.verdict == Verdict::ExplicitProfile);

    for (double r : {-1.0, 0.0, 1.5}) {
        double prevErr = 1e300;
        for (double eps : {1e-2, 1e-3, 1e-4}) {
            const double t = cutoff_time(an.report.rate, an.report.ell, eps) + r;
            const double flow = (matrix_exponential(-t * Q) * sys.x).norm() / eps;
            const double err = std::abs(flow - profile_value(an.report, r));
            CHECK(err <= error_bound(an.report, eps) * std::exp(-r * an.report.rate));
            CHECK(err < prevErr);
            prevErr = err;
        }
    }
}

TEST_CASE("deterministic dichotomy slope") {
    // Q = q I: log(|e^{-Q delta t_eps} x| / eps) / log eps -> delta - 1
    const double q = 1.7;
    MatrixXd Q = q * MatrixXd::Identity(2, 2);
    VectorXd x = VectorXd::Zero(2);
    x(0) = 1.0;
    const double eps = 1e-6;
    for (double delta : {0.5, 2.0}) {
        const double t = delta * cutoff_time(q, 1, eps);
        const double v = (matrix_exponential(-t * Q) * x).norm() / eps;
        CHECK(std::log(v) / std::log(eps) == doctest::Approx(delta - 1.0).epsilon(0.02));
    }
}

TEST_CASE("verdict depends on the moment order") {
    SystemSpec rot = build_rotation51({1.0, 3.0});
    AnalysisOptions opts;
    opts.momentSamples = 1000;
    CHECK(analyze_system(rot, opts).report.verdict == Verdict::ExplicitProfile);

    rot.noise = make_noise(AlphaStable{0.8, 1.0, 2});
    rot.p = 0.7;
    CHECK(analyze_system(rot, opts).report.verdict == Verdict::AbstractProfile);

    const OscillatorScenario sub = build_oscillator(1.0, 1.0);
    CHECK(analyze_system(sub.system, opts).report.verdict == Verdict::WindowOnly);
}

}  // TEST_SUITE
