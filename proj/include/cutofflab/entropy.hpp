#pragma once

#include <vector>

#include "cutofflab/spectral.hpp"
#include "cutofflab/types.hpp"

namespace cutofflab {

struct GaussianLaw {
    VectorXd mean;
    MatrixXd covariance;  // symmetric positive definite
};

/// Kullback-Leibler divergence H(a | b) between Gaussian laws, log-det
/// computed in log space.
double relative_entropy(const GaussianLaw& a, const GaussianLaw& b);

/// Exact W_2 between Gaussian laws (Bures metric on covariances).
double gaussian_w2(const GaussianLaw& a, const GaussianLaw& b);

/// Regression slope of ln H(X_{delta t_eps} | mu^eps) on ln eps for the
/// Brownian system (Q, sigma, x). Requires Kalman controllability.
double entropy_dichotomy(const MatrixXd& Q, const MatrixXd& sigma, const VectorXd& x,
                         double delta, const std::vector<double>& epsGrid);

/// Weighted profile value q^{1-ell} e^{-q w r} |SigmaInf^{-1/2} u|; requires
/// the weighted normal-growth verdict to hold.
double entropy_profile(const SpectralDecomposition& dec, const MatrixXd& SigmaInf, double w,
                       double r);

}  // namespace cutofflab
