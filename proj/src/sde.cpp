#include "cutofflab/sde.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <thread>

#include "cutofflab/linalg.hpp"
#include "cutofflab/wasserstein.hpp"

namespace cutofflab {

namespace {

MatrixXd psd_sqrt(const MatrixXd& S) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (S + S.transpose()));
    return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

double min_real_eigenvalue(const MatrixXd& Q) {
    const VectorXcd ev = Q.eigenvalues();
    double m = 1e300;
    for (int i = 0; i < ev.size(); ++i) m = std::min(m, ev(i).real());
    return m;
}

// rows [begin, end) of `out` get one Euler path each
void euler_rows(MatrixXd& out, const MatrixXd& Q, const VectorXd& x0, double eps,
                const NoiseSpec& noise, double t, double dt, std::uint64_t seed, int worker,
                Eigen::Index begin, Eigen::Index end) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(worker)));
    IncrementSampler sampler(noise);
    const long steps = std::max<long>(1, static_cast<long>(std::ceil(t / dt)));
    const double h = t / static_cast<double>(steps);
    for (Eigen::Index i = begin; i < end; ++i) {
        sampler.begin_path(rng);
        VectorXd X = x0;
        for (long k = 0; k < steps; ++k) X += -h * (Q * X) + eps * sampler.increment(h, rng);
        out.row(i) = X.transpose();
    }
}

void gaussian_rows(MatrixXd& out, const VectorXd& mean, const MatrixXd& factor, double eps,
                   std::uint64_t seed, int worker, Eigen::Index begin, Eigen::Index end) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(worker)));
    const int d = static_cast<int>(mean.size());
    VectorXd z(d);
    for (Eigen::Index i = begin; i < end; ++i) {
        for (int j = 0; j < d; ++j) z(j) = rng.gaussian();
        out.row(i) = (mean + eps * (factor * z)).transpose();
    }
}

template <typename Fn>
void run_workers(int threads, Eigen::Index n, Fn&& fn) {
    const int W = std::max(1, threads);
    if (W == 1) {
        fn(0, Eigen::Index(0), n);
        return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < W; ++w) {
        const Eigen::Index b = n * w / W;
        const Eigen::Index e = n * (w + 1) / W;
        pool.emplace_back([&, w, b, e] { fn(w, b, e); });
    }
    for (auto& th : pool) th.join();
}

void gate_moment(const NoiseSpec& noise, double momentOrder) {
    if (momentOrder > 0.0 && !validate_moment(noise, momentOrder))
        fail(Errc::MomentGate,
             "requested moment order exceeds the finite moments of the driving noise");
}

}  // namespace

double default_step(const MatrixXd& Q) {
    return std::min(1e-3, 0.05 / std::max(operator_norm(Q), 1e-12));
}

MatrixXd gaussian_covariance(const MatrixXd& Q, const MatrixXd& S, double t) {
    if (t < 0.0) fail(Errc::DomainError, "gaussian_covariance: t must be nonnegative");
    const int d = static_cast<int>(Q.rows());
    if (t == 0.0) return MatrixXd::Zero(d, d);
    if (is_stable_drift(Q)) {
        const MatrixXd SigmaInf = lyapunov_solve(Q, 0.5 * (S + S.transpose()));
        const MatrixXd E = matrix_exponential(-t * Q);
        MatrixXd out = SigmaInf - E * SigmaInf * E.transpose();
        return 0.5 * (out + out.transpose());
    }
    // Van Loan: exp([[-Q, S], [0, Q^T]] t) upper-right block = int e^{-Qs} S e^{Q^T(t-s)} ds
    MatrixXd M = MatrixXd::Zero(2 * d, 2 * d);
    M.topLeftCorner(d, d) = -Q;
    M.topRightCorner(d, d) = 0.5 * (S + S.transpose());
    M.bottomRightCorner(d, d) = Q.transpose();
    const MatrixXd E = matrix_exponential(t * M);
    MatrixXd out = E.topRightCorner(d, d) * matrix_exponential(-t * Q.transpose());
    return 0.5 * (out + out.transpose());
}

EmpiricalMeasure simulate_marginal(const MatrixXd& Q, const VectorXd& x, double eps,
                                   const NoiseSpec& noise, double t, int n,
                                   const SimOptions& opts, double momentOrder) {
    if (n < 1) fail(Errc::DomainError, "simulate_marginal: need n >= 1");
    if (t < 0.0) fail(Errc::DomainError, "simulate_marginal: t must be nonnegative");
    if (!is_stable_drift(Q)) fail(Errc::UnstableDrift, "simulate_marginal: unstable drift");
    gate_moment(noise, momentOrder);
    const int d = static_cast<int>(Q.rows());
    if (noise_dim(noise) != d) fail(Errc::DimensionError, "simulate_marginal: noise dim mismatch");

    MatrixXd out(n, d);
    const bool brownian = std::holds_alternative<Brownian>(noise.value);
    const bool deterministic = std::holds_alternative<Deterministic>(noise.value);
    const bool exact = opts.path == SamplePath::Exact ||
                       (opts.path == SamplePath::Auto && (brownian || deterministic));
    if (exact && !brownian && !deterministic)
        fail(Errc::DomainError, "exact sampling is only available for Brownian/deterministic noise");

    if (t == 0.0) {
        out.rowwise() = x.transpose();
        return {out};
    }

    if (exact && brownian) {
        const VectorXd mean = matrix_exponential(-t * Q) * x;
        const MatrixXd factor =
            psd_sqrt(gaussian_covariance(Q, std::get<Brownian>(noise.value).covariance, t));
        run_workers(opts.threads, n, [&](int w, Eigen::Index b, Eigen::Index e) {
            gaussian_rows(out, mean, factor, eps, opts.seed, w, b, e);
        });
        return {out};
    }
    if (exact && deterministic) {
        // X_t = e^{-Qt} x + eps Q^{-1} (I - e^{-Qt}) b
        const MatrixXd E = matrix_exponential(-t * Q);
        const VectorXd b = std::get<Deterministic>(noise.value).drift;
        const VectorXd X = E * x + eps * Q.fullPivLu().solve((MatrixXd::Identity(d, d) - E) * b);
        out.rowwise() = X.transpose();
        return {out};
    }

    const double dt = opts.dt > 0.0 ? opts.dt : default_step(Q);
    if (dt * operator_norm(Q) > 0.5)
        fail(Errc::StepTooLarge, "simulate_marginal: dt * |Q| > 0.5");
    {
        IncrementSampler probe(noise);  // surface sampler errors before the workers start
    }
    run_workers(opts.threads, n, [&](int w, Eigen::Index b, Eigen::Index e) {
        euler_rows(out, Q, x, eps, noise, t, dt, opts.seed, w, b, e);
    });
    return {out};
}

EmpiricalMeasure stationary_sample(const MatrixXd& Q, const NoiseSpec& noise, int n,
                                   const SimOptions& opts, double momentOrder) {
    if (!is_stable_drift(Q)) fail(Errc::UnstableDrift, "stationary_sample: unstable drift");
    gate_moment(noise, momentOrder);
    const int d = static_cast<int>(Q.rows());

    if (std::holds_alternative<Brownian>(noise.value) && opts.path != SamplePath::Euler) {
        const MatrixXd SigmaInf = lyapunov_solve(Q, std::get<Brownian>(noise.value).covariance);
        const MatrixXd factor = psd_sqrt(SigmaInf);
        MatrixXd out(n, d);
        run_workers(opts.threads, n, [&](int w, Eigen::Index b, Eigen::Index e) {
            gaussian_rows(out, VectorXd::Zero(d), factor, 1.0, opts.seed, w, b, e);
        });
        return {out};
    }
    if (std::holds_alternative<Deterministic>(noise.value) && opts.path != SamplePath::Euler) {
        const VectorXd point = Q.fullPivLu().solve(std::get<Deterministic>(noise.value).drift);
        MatrixXd out(n, d);
        out.rowwise() = point.transpose();
        return {out};
    }

    const double horizon = 30.0 / min_real_eigenvalue(Q);
    return simulate_marginal(Q, VectorXd::Zero(d), 1.0, noise, horizon, n, opts, momentOrder);
}

std::vector<double> ou_distance_decay(const MatrixXd& Q, const NoiseSpec& noise,
                                      const std::vector<double>& tGrid, int n, double pPrime,
                                      const SimOptions& opts) {
    gate_moment(noise, pPrime);
    std::vector<double> out;
    out.reserve(tGrid.size());
    const VectorXd zero = VectorXd::Zero(Q.rows());
    SimOptions statOpts = opts;
    statOpts.seed = derive_seed(opts.seed, 0xABCD);
    const EmpiricalMeasure stationary = stationary_sample(Q, noise, n, statOpts, pPrime);
    for (size_t i = 0; i < tGrid.size(); ++i) {
        SimOptions o = opts;
        o.seed = derive_seed(opts.seed, i + 1);
        const EmpiricalMeasure ot = simulate_marginal(Q, zero, 1.0, noise, tGrid[i], n, o, pPrime);
        out.push_back(empirical_wasserstein(ot, stationary, pPrime));
    }
    return out;
}

}  // namespace cutofflab
