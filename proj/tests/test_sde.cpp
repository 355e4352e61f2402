#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cutofflab/linalg.hpp"
#include "cutofflab/sde.hpp"
#include "cutofflab/wasserstein.hpp"
#include "test_util.hpp"

using namespace cutofflab;
using namespace cutofflab::testutil;

namespace {

std::pair<double, double> mean_var(const EmpiricalMeasure& m, int col = 0) {
    const double mean = m.samples.col(col).mean();
    const double var =
        (m.samples.col(col).array() - mean).square().sum() / (m.samples.rows() - 1.0);
    return {mean, var};
}

}  // namespace

TEST_SUITE("sde") {

TEST_CASE("degenerate endpoints of the marginal law") {
    MatrixXd Q{{1.0, 0.3}, {0.0, 2.0}};
    VectorXd x{{1.0, -2.0}};
    const NoiseSpec brown = make_noise(Brownian{MatrixXd::Identity(2, 2)});

    // eps = 0: every sample is the deterministic flow
    EmpiricalMeasure m = simulate_marginal(Q, x, 0.0, brown, 0.7, 50);
    const VectorXd flow = matrix_exponential(-0.7 * Q) * x;
    for (int i = 0; i < 50; ++i) CHECK((m.samples.row(i).transpose() - flow).norm() < 1e-12);

    // t = 0: every sample is x
    m = simulate_marginal(Q, x, 0.3, brown, 0.0, 20);
    for (int i = 0; i < 20; ++i) CHECK((m.samples.row(i).transpose() - x).norm() == 0.0);
}

TEST_CASE("gaussian covariance closed forms") {
    MatrixXd Q = 1.3 * MatrixXd::Identity(1, 1);
    MatrixXd S = MatrixXd::Identity(1, 1);
    CHECK(gaussian_covariance(Q, S, 0.0).norm() == 0.0);
    for (double t : {0.1, 0.5, 2.0}) {
        const double expected = (1.0 - std::exp(-2.0 * 1.3 * t)) / (2.0 * 1.3);
        CHECK(gaussian_covariance(Q, S, t)(0, 0) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("gaussian covariance vs quadrature and lyapunov") {
    Rng rng(1);
    MatrixXd Q = random_stable(rng, 3, 0.6);
    MatrixXd S = MatrixXd::Identity(3, 3);

    // Simpson oracle on [0, 2]
    const double t = 2.0;
    const int steps = 2000;
    const double h = t / steps;
    MatrixXd acc = MatrixXd::Zero(3, 3);
    for (int k = 0; k <= steps; ++k) {
        MatrixXd E = matrix_exponential(-(k * h) * Q);
        const double w = (k == 0 || k == steps) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        acc += w * E * S * E.transpose();
    }
    acc *= h / 3.0;
    CHECK((gaussian_covariance(Q, S, t) - acc).norm() <= 1e-7 * acc.norm());

    // long-time limit matches the lyapunov solution
    const MatrixXd SigmaInf = lyapunov_solve(Q, S);
    double minRe = 1e300;
    const VectorXcd ev = Q.eigenvalues();
    for (int i = 0; i < ev.size(); ++i) minRe = std::min(minRe, ev(i).real());
    const MatrixXd late = gaussian_covariance(Q, S, 30.0 / minRe);
    CHECK((late - SigmaInf).norm() <= 1e-6 * SigmaInf.norm());
}

TEST_CASE("stationary sampler matches the lyapunov covariance") {
    const MatrixXd Q = MatrixXd::Identity(2, 2);
    const NoiseSpec brown = make_noise(Brownian{MatrixXd::Identity(2, 2)});
    SimOptions opts;
    opts.seed = 3;
    const EmpiricalMeasure st = stationary_sample(Q, brown, 60000, opts);
    for (int c = 0; c < 2; ++c) {
        const auto [mean, var] = mean_var(st, c);
        CHECK(std::abs(mean) < 0.02);
        CHECK(var == doctest::Approx(0.5).epsilon(0.03));
    }
}

TEST_CASE("deterministic drift has a point-mass equilibrium") {
    const MatrixXd Q = MatrixXd::Identity(2, 2);
    VectorXd b{{0.7, -0.4}};
    const EmpiricalMeasure st = stationary_sample(Q, make_noise(Deterministic{b}), 10);
    for (int i = 0; i < 10; ++i) CHECK((st.samples.row(i).transpose() - b).norm() < 1e-12);
}

TEST_CASE("euler marginals match the exact gaussian law") {
    const MatrixXd Q = MatrixXd::Identity(1, 1);
    VectorXd x{{1.0}};
    const NoiseSpec brown = make_noise(Brownian{MatrixXd::Identity(1, 1)});
    const double t = 1.0, eps = 1.0;
    const int n = 100000;

    SimOptions euler;
    euler.path = SamplePath::Euler;
    euler.dt = 1e-3;
    euler.seed = 4;
    const auto [em, ev] = mean_var(simulate_marginal(Q, x, eps, brown, t, n, euler));

    SimOptions exact;
    exact.seed = 5;
    const auto [xm, xv] = mean_var(simulate_marginal(Q, x, eps, brown, t, n, exact));

    const double seMean = std::sqrt(xv / n);
    CHECK(std::abs(em - xm) <= 3.0 * seMean + 3.0 * 1e-3);  // MC error + O(dt) bias
    CHECK(std::abs(ev - xv) <= 5.0 * xv * std::sqrt(2.0 / n) + 5.0 * 1e-3);
}

TEST_CASE("semigroup property in law") {
    const MatrixXd Q = MatrixXd::Identity(1, 1);
    const NoiseSpec brown = make_noise(Brownian{MatrixXd::Identity(1, 1)});
    const int n = 60000;

    // restart: simulate each path to t1, then feed the endpoints as initial
    // conditions for another t2 (independent seeds)
    SimOptions o1;
    o1.path = SamplePath::Euler;
    o1.dt = 2e-3;
    o1.seed = 6;
    EmpiricalMeasure half = simulate_marginal(Q, VectorXd::Ones(1), 1.0, brown, 0.5, n, o1);
    Rng rng(derive_seed(7, 0));
    IncrementSampler sampler(brown);
    MatrixXd restart(n, 1);
    for (int i = 0; i < n; ++i) {
        double X = half.samples(i, 0);
        for (int k = 0; k < 250; ++k) X += -2e-3 * X + sampler.increment(2e-3, rng)(0);
        restart(i, 0) = X;
    }
    SimOptions o2;
    o2.path = SamplePath::Euler;
    o2.dt = 2e-3;
    o2.seed = 8;
    const auto [dm, dv] = mean_var(simulate_marginal(Q, VectorXd::Ones(1), 1.0, brown, 1.0, n, o2));
    const auto [rm, rv] = mean_var({restart});
    CHECK(std::abs(dm - rm) <= 4.0 * std::sqrt(dv / n) + 5e-3);
    CHECK(std::abs(dv - rv) <= 5.0 * dv * std::sqrt(2.0 / n) + 5e-3);
}

TEST_CASE("marginal is linear in eps (quantile comparison)") {
    const MatrixXd Q = 1.5 * MatrixXd::Identity(1, 1);
    VectorXd x{{2.0}};
    const NoiseSpec brown = make_noise(Brownian{MatrixXd::Identity(1, 1)});
    const double t = 0.8;
    const int n = 50000;
    const double flow = std::exp(-1.5 * t) * 2.0;

    SimOptions oa;
    oa.seed = 9;
    SimOptions ob;
    ob.seed = 10;
    const double eps = 0.05;
    EmpiricalMeasure small = simulate_marginal(Q, x, eps, brown, t, n, oa);
    EmpiricalMeasure unit = simulate_marginal(Q, x, 1.0, brown, t, n, ob);

    std::vector<double> a(n), b(n);
    for (int i = 0; i < n; ++i) {
        a[i] = (small.samples(i, 0) - flow) / eps;
        b[i] = unit.samples(i, 0) - flow;
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (double q : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        const int idx = static_cast<int>(q * n);
        CHECK(std::abs(a[idx] - b[idx]) < 0.03);
    }
}

TEST_CASE("distance to equilibrium decays within the contraction bound") {
    const MatrixXd Q = MatrixXd::Identity(1, 1);
    const NoiseSpec brown = make_noise(Brownian{MatrixXd::Identity(1, 1)});
    SimOptions opts;
    opts.seed = 11;
    const std::vector<double> grid = {0.0, 1.0, 2.5, 5.0, 10.0};
    const int n = 100000;
    const auto decay = ou_distance_decay(Q, brown, grid, n, 1.0, opts);

    // t = 0: distance from the point mass at the origin
    const EmpiricalMeasure st = stationary_sample(Q, brown, n, opts);
    const double firstMoment = empirical_moment(st, 1.0);
    CHECK(decay[0] == doctest::Approx(firstMoment).epsilon(0.02));

    // bound (C0 e^{-q* t}) E|O_inf| with C0 = 1, q* = 1/2 for Q = I, d = 1
    for (size_t i = 1; i < grid.size(); ++i) {
        const double bound = std::exp(-0.5 * grid[i]) * firstMoment;
        CHECK(decay[i] <= bound + 0.012);  // + MC resolution of the estimator
    }
    CHECK(decay[4] <= 1e-2);

    // trend: regression slope of log distance on t is negative
    double sxy = 0.0, sxx = 0.0, mt = 0.0, md = 0.0;
    for (size_t i = 1; i < grid.size(); ++i) {
        mt += grid[i];
        md += std::log(decay[i]);
    }
    mt /= (grid.size() - 1);
    md /= (grid.size() - 1);
    for (size_t i = 1; i < grid.size(); ++i) {
        sxy += (grid[i] - mt) * (std::log(decay[i]) - md);
        sxx += (grid[i] - mt) * (grid[i] - mt);
    }
    CHECK(sxy / sxx < 0.0);
}

TEST_CASE("red-noise-driven marginal matches the augmented gaussian system") {
    // dX = -qX dt + eps dU, dU = -U dt + dB: the pair (X, U) is linear
    // Gaussian, so Var X_t comes from the 2x2 augmented covariance (oracle)
    const double q = 1.0, eps = 0.5, t = 2.0;
    // substituting dU gives d(X,U) = -Gamma (X,U) dt + (eps, 1) dB
    MatrixXd Gamma{{q, eps * 1.0}, {0.0, 1.0}};
    MatrixXd S{{eps * eps, eps}, {eps, 1.0}};
    MatrixXd E = matrix_exponential(-t * Gamma);
    MatrixXd init = MatrixXd::Zero(2, 2);
    init(1, 1) = 0.5;  // stationary variance of U
    const MatrixXd cov = E * init * E.transpose() + gaussian_covariance(Gamma, S, t);
    const double oracleVar = cov(0, 0);

    const NoiseSpec inner = make_noise(Brownian{MatrixXd::Identity(1, 1)});
    const NoiseSpec red =
        make_noise(RedNoise{MatrixXd::Identity(1, 1), std::make_shared<NoiseSpec>(inner)});
    SimOptions opts;
    opts.seed = 13;
    opts.dt = 2e-3;
    const int n = 4000;
    const EmpiricalMeasure m = simulate_marginal(MatrixXd::Constant(1, 1, q), VectorXd::Ones(1),
                                                 eps, red, t, n, opts);
    const auto [mean, var] = mean_var(m);
    CHECK(mean == doctest::Approx(std::exp(-q * t)).epsilon(0.05));
    CHECK(var == doctest::Approx(oracleVar).epsilon(0.1));
}

TEST_CASE("step-size guard") {
    MatrixXd Q = 10.0 * MatrixXd::Identity(1, 1);
    SimOptions opts;
    opts.path = SamplePath::Euler;
    opts.dt = 0.2;  // dt |Q| = 2 > 0.5
    try {
        simulate_marginal(Q, VectorXd::Ones(1), 0.1,
                          make_noise(Brownian{MatrixXd::Identity(1, 1)}), 1.0, 10, opts);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::StepTooLarge);
    }
}

TEST_CASE("fixed seed and worker count reproduce bitwise") {
    Rng rng(12);
    MatrixXd Q = random_stable(rng, 2, 0.5);
    const NoiseSpec brown = make_noise(Brownian{MatrixXd::Identity(2, 2)});
    SimOptions opts;
    opts.seed = 77;
    opts.threads = 2;
    VectorXd x{{1.0, 0.0}};
    const EmpiricalMeasure a = simulate_marginal(Q, x, 0.1, brown, 1.0, 501, opts);
    const EmpiricalMeasure b = simulate_marginal(Q, x, 0.1, brown, 1.0, 501, opts);
    CHECK((a.samples - b.samples).norm() == 0.0);
}

}  // TEST_SUITE
