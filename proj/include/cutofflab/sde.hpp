#pragma once

#include <cstdint>
#include <vector>

#include "cutofflab/noise.hpp"
#include "cutofflab/types.hpp"

namespace cutofflab {

/// Full problem instance: dX = -Q X dt + eps dL, X_0 = x, Wasserstein order p.
struct SystemSpec {
    MatrixXd Q;
    VectorXd x;
    NoiseSpec noise;
    double p = 2.0;
};

enum class SamplePath { Auto, Euler, Exact };

struct SimOptions {
    double dt = 0.0;  // 0: default min(1e-3, 0.05 / |Q|)
    std::uint64_t seed = 1;
    int threads = 1;
    SamplePath path = SamplePath::Auto;
};

double default_step(const MatrixXd& Q);

/// n i.i.d. samples of X^eps_t(x). Brownian noise takes the exact Gaussian
/// path N(e^{-Qt}x, eps^2 Sigma_t) unless Euler is forced; deterministic
/// drift uses the closed-form flow.
EmpiricalMeasure simulate_marginal(const MatrixXd& Q, const VectorXd& x, double eps,
                                   const NoiseSpec& noise, double t, int n,
                                   const SimOptions& opts = {}, double momentOrder = 0.0);

/// Sigma_t = int_0^t e^{-Qs} S e^{-Q^T s} ds for diffusion covariance S.
/// Stable Q uses Sigma_inf - e^{-Qt} Sigma_inf e^{-Q^T t}; otherwise the
/// Van Loan block-exponential.
MatrixXd gaussian_covariance(const MatrixXd& Q, const MatrixXd& S, double t);

/// n approximate samples of O_inf (the eps = 1 stationary law); exact for
/// Brownian and deterministic drivers, Euler to horizon 30 / min Re lambda
/// otherwise.
EmpiricalMeasure stationary_sample(const MatrixXd& Q, const NoiseSpec& noise, int n,
                                   const SimOptions& opts = {}, double momentOrder = 0.0);

/// Empirical W_{p'}(O_t, O_inf) on a time grid.
std::vector<double> ou_distance_decay(const MatrixXd& Q, const NoiseSpec& noise,
                                      const std::vector<double>& tGrid, int n, double pPrime,
                                      const SimOptions& opts = {});

}  // namespace cutofflab
