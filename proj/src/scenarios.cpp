#include "cutofflab/scenarios.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "cutofflab/linalg.hpp"

namespace cutofflab {

namespace {

NoiseSpec brownian_mask(int d, const std::vector<int>& coords) {
    MatrixXd cov = MatrixXd::Zero(d, d);
    for (int c : coords) cov(c, c) = 1.0;
    return make_noise(Brownian{cov});
}

double param(const std::vector<std::pair<std::string, double>>& params, const std::string& key,
             double fallback) {
    for (const auto& [k, v] : params)
        if (k == key) return v;
    return fallback;
}

}  // namespace

OscillatorScenario build_oscillator(double gamma, double kappa) {
    if (gamma <= 0.0 || kappa <= 0.0)
        fail(Errc::DomainError, "build_oscillator: gamma, kappa must be positive");
    OscillatorScenario out;
    out.discriminant = gamma * gamma - 4.0 * kappa;
    out.regime = out.discriminant > 0.0
                     ? OscillatorRegime::Over
                     : (out.discriminant == 0.0 ? OscillatorRegime::Critical
                                                : OscillatorRegime::Sub);
    out.system.Q = MatrixXd{{0.0, -1.0}, {kappa, gamma}};
    out.system.x = VectorXd{{1.0, 0.0}};
    out.system.noise = brownian_mask(2, {1});
    out.system.p = 2.0;
    return out;
}

SystemSpec build_gradient(const std::vector<double>& eigs, const MatrixXd& basis) {
    const int d = static_cast<int>(eigs.size());
    for (double e : eigs)
        if (e <= 0.0) fail(Errc::DomainError, "build_gradient: eigenvalues must be positive");
    VectorXd diag(d);
    for (int i = 0; i < d; ++i) diag(i) = eigs[i];
    SystemSpec out;
    out.Q = basis * diag.asDiagonal() * basis.transpose();
    out.Q = 0.5 * (out.Q + out.Q.transpose());
    out.x = VectorXd::Ones(d);
    out.noise = make_noise(Brownian{MatrixXd::Identity(d, d)});
    out.p = 2.0;
    return out;
}

SystemSpec build_gradient(const std::vector<double>& eigs) {
    const int d = static_cast<int>(eigs.size());
    return build_gradient(eigs, MatrixXd::Identity(d, d));
}

SystemSpec build_jacobi_chain(int n, double gamma, double kappa, double sigma1, double sigman) {
    if (n < 2) fail(Errc::DomainError, "build_jacobi_chain: need n >= 2");
    if (gamma <= 0.0 || kappa <= 0.0 || sigma1 <= 0.0 || sigman <= 0.0)
        fail(Errc::DomainError, "build_jacobi_chain: parameters must be positive");
    const int d = 2 * n;
    MatrixXd Q = MatrixXd::Zero(d, d);
    Q(0, 0) = sigma1;
    Q(n - 1, n - 1) = sigman;
    for (int i = 0; i < n; ++i) {
        Q(i, n + i) = (i == 0 || i == n - 1) ? kappa + gamma : 2.0 * kappa + gamma;
        if (i + 1 < n) {
            Q(i, n + i + 1) = -kappa;
            Q(i + 1, n + i) = -kappa;
        }
    }
    Q.bottomLeftCorner(n, n) = -MatrixXd::Identity(n, n);

    SystemSpec out;
    out.Q = Q;
    out.x = VectorXd::Zero(d);
    out.x(0) = 1.0;
    out.noise = brownian_mask(d, {0, n - 1});
    out.p = 2.0;
    if (!is_stable_drift(out.Q))
        fail(Errc::UnstableDrift, "build_jacobi_chain: chain matrix unexpectedly unstable");
    return out;
}

SystemSpec build_rotation51(const RotationParams& p) {
    if (p.lambda <= 0.0 || p.theta == 0.0)
        fail(Errc::DomainError, "build_rotation51: need lambda > 0, theta != 0");
    SystemSpec out;
    out.Q = MatrixXd{{p.lambda, p.theta}, {-p.theta, p.lambda}};
    out.x = VectorXd{{1.0, 0.0}};
    out.noise = make_noise(Brownian{MatrixXd::Identity(2, 2)});
    out.p = 2.0;
    return out;
}

SystemSpec build_suspension52(const SuspensionParams& p) {
    if (p.lambda <= 0.0 || p.gamma <= 0.0 || p.kappa <= 0.0)
        fail(Errc::DomainError, "build_suspension52: parameters must be positive");
    if (p.gamma * p.gamma >= 4.0 * p.kappa)
        fail(Errc::DomainError, "build_suspension52: oscillator block must be subcritical");
    SystemSpec out;
    out.Q = MatrixXd::Zero(3, 3);
    out.Q(0, 0) = p.lambda;
    out.Q(1, 2) = -1.0;
    out.Q(2, 1) = p.kappa;
    out.Q(2, 2) = p.gamma;
    out.x = VectorXd{{1.0, 1.0, 1.0}};
    out.noise = make_noise(Brownian{MatrixXd::Identity(3, 3)});
    out.p = 2.0;
    return out;
}

SystemSpec build_jordan_block53(const JordanBlockParams& p) {
    if (p.d < 1 || p.lambda <= 0.0)
        fail(Errc::DomainError, "build_jordan_block53: need d >= 1, lambda > 0");
    SystemSpec out;
    out.Q = p.lambda * MatrixXd::Identity(p.d, p.d);
    for (int i = 1; i < p.d; ++i) out.Q(i, i - 1) = 1.0;  // (Q - lambda I) e_k = e_{k+1}
    out.x = VectorXd::Zero(p.d);
    out.x(0) = 1.0;  // deepest chain: l(x) = d - 1
    out.noise = make_noise(Brownian{MatrixXd::Identity(p.d, p.d)});
    out.p = 2.0;
    return out;
}

JacobiQuantities jacobi_quantities(int n, double gamma, double kappa, double sigma1,
                                   double sigman) {
    const SystemSpec sys = build_jacobi_chain(n, gamma, kappa, sigma1, sigman);
    const int d = 2 * n;

    Eigen::ComplexEigenSolver<MatrixXcd> solver(sys.Q.cast<Complex>());
    if (solver.info() != Eigen::Success)
        fail(Errc::NonConvergence, "jacobi_quantities: eigensolver failed");
    VectorXcd lam = solver.eigenvalues();
    MatrixXcd V = solver.eigenvectors();

    std::vector<int> order(d);
    for (int i = 0; i < d; ++i) order[i] = i;
    // conjugate partners agree only to rounding, so the ordering must compare
    // with a tolerance to keep the positive-imaginary member first
    const double tieTol = 1e-9 * (1.0 + lam.cwiseAbs().maxCoeff());
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (std::abs(lam(a).real() - lam(b).real()) > tieTol)
            return lam(a).real() < lam(b).real();
        if (std::abs(std::abs(lam(a).imag()) - std::abs(lam(b).imag())) > tieTol)
            return std::abs(lam(a).imag()) < std::abs(lam(b).imag());
        return lam(a).imag() > lam(b).imag();
    });

    JacobiQuantities out;
    MatrixXcd Vs(d, d);
    for (int i = 0; i < d; ++i) {
        out.eigenvalues.push_back(lam(order[i]));
        Vs.col(i) = V.col(order[i]);
    }
    const Complex lam1 = out.eigenvalues[0].imag() >= 0.0 ? out.eigenvalues[0]
                                                          : std::conj(out.eigenvalues[0]);
    out.rate = lam1.real();
    out.leadingArg = std::arg(lam1);
    out.gap = 1e300;
    for (const auto& l : out.eigenvalues)
        if (l.real() > out.rate + 1e-6) out.gap = std::min(out.gap, l.real() - out.rate);

    // gauge per the worked example: unit norm, third component real positive
    int i1 = 0;
    for (int i = 0; i < d; ++i)
        if (std::abs(out.eigenvalues[i] - lam1) < 1e-9) i1 = i;
    VectorXcd v1 = Vs.col(i1);
    v1 /= v1.norm();
    const Complex phase = std::conj(v1(2)) / std::abs(v1(2));
    v1 *= phase;
    Vs.col(i1) = v1;
    out.v1 = v1;

    VectorXcd x = VectorXcd::Zero(d);
    x(0) = 1.0;
    out.coefficients = Vs.fullPivLu().solve(x);

    const VectorXcd prod = out.coefficients(i1) * v1;
    out.wHat = prod.real();
    out.wCheck = prod.imag();
    out.wHatNorm = out.wHat.norm();
    out.wCheckNorm = out.wCheck.norm();
    out.wInner = out.wHat.dot(out.wCheck);
    return out;
}

SystemSpec build_scenario(const std::string& name,
                          const std::vector<std::pair<std::string, double>>& params) {
    if (name == "oscillator")
        return build_oscillator(param(params, "gamma", 1.0), param(params, "kappa", 1.0)).system;
    if (name == "gradient") {
        std::vector<double> eigs;
        for (const auto& [k, v] : params)
            if (k.rfind("eig", 0) == 0) eigs.push_back(v);
        if (eigs.empty()) eigs = {1.0, 2.0};
        return build_gradient(eigs);
    }
    if (name == "jacobi-chain")
        return build_jacobi_chain(static_cast<int>(param(params, "n", 5)),
                                  param(params, "gamma", 0.01), param(params, "kappa", 1.0),
                                  param(params, "sigma1", 1.0), param(params, "sigman", 1.0));
    if (name == "rotation51")
        return build_rotation51({param(params, "lambda", 1.0), param(params, "theta", 3.0)});
    if (name == "suspension52")
        return build_suspension52({param(params, "lambda", 1.0), param(params, "gamma", 1.0),
                                   param(params, "kappa", 1.0)});
    if (name == "jordan-block53")
        return build_jordan_block53(
            {static_cast<int>(param(params, "d", 3)), param(params, "lambda", 1.0)});
    fail(Errc::ConfigError, "unknown scenario: " + name);
}

}  // namespace cutofflab
