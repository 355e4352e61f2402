#pragma once

#include <optional>
#include <vector>

#include "cutofflab/linalg.hpp"
#include "cutofflab/types.hpp"

namespace cutofflab {

/// Asymptotic data of e^{-Qt}x: along t -> infinity,
///   (e^{rate t} / t^{ell-1}) e^{-Qt} x  ->  v1 + 2 sum_k Re(e^{i theta_k t} v_k)
/// with {rate +- i theta_k} eigenvalues of Q seen by x at the deepest Jordan
/// level. Each pair stores the member attached to the negative-imaginary
/// eigenvalue, so the real orbit is 2(cos(theta t) re - sin(theta t) im).
struct SpectralDecomposition {
    double rate = 0.0;
    int ell = 1;

    VectorXd v1;  // zero-size when no real eigenvalue participates

    struct Pair {
        double theta;    // > 0
        VectorXd re;     // Re v_k
        VectorXd im;     // Im v_k
    };
    std::vector<Pair> pairs;  // ascending theta

    int m() const { return (v1.size() > 0 ? 1 : 0) + 2 * static_cast<int>(pairs.size()); }
    bool hasRealPart() const { return v1.size() > 0; }

    VectorXd sumAt(double t) const;
    double sumNormBound() const;  // sum_k |v_k| = |v1| + 2 sum |re + i im|
    std::vector<double> angles() const;
    std::vector<VectorXd> realFamily() const;  // (v1, re_2, im_2, ...)
};

struct NormalGrowthVerdict {
    bool resonant = false;
    bool orthogonal = false;
    bool equalNorms = false;
    bool profileExists = false;
    bool omegaOnSphere = false;
    double representativeNorm = 0.0;  // |sum v_k|, or the sampled mean under resonance
};

/// Lemma-2.1-style decomposition of e^{-Qt}x. Requires all Re lambda(Q) > 0
/// and x != 0.
SpectralDecomposition decompose(const MatrixXd& Q, const VectorXd& x, double tol = 1e-8);

/// Same, reusing a precomputed eigendecomposition of Q.
SpectralDecomposition decompose(const EigenStructure& eig, const VectorXd& x, double tol = 1e-8);

/// Integer-relation scan: true iff h1 th1 + ... + hn thn lands in 2 pi Z
/// (residual <= tol) for some 0 < max|h_i| <= hmax.
bool resonance_test(const std::vector<double>& angles, double tol = 1e-9, int hmax = 20);

/// Sampling surrogate for "omega(x) lies on a sphere": the orbit norm is
/// constant over the grid up to tol relative deviation.
bool omega_on_sphere(const SpectralDecomposition& dec, const std::vector<double>& tGrid,
                     double tol);
bool omega_on_sphere(const SpectralDecomposition& dec, double tol = 1e-8);  // default grid

/// Orthogonality + equal norms of the decomplexified family; decides profile
/// existence (sampled fallback when the angles are resonant).
NormalGrowthVerdict normal_growth(const SpectralDecomposition& dec, double tol = 1e-8);

/// d=2 specialization: a(z) = Re((Q - lambda_+ I)z), b(z) = Im((Q - lambda_+ I)z);
/// profile iff |a| = |b| and <a,b> = 0. Requires a strictly complex pair.
NormalGrowthVerdict oscillator_2x2_check(const MatrixXd& Q, const VectorXd& z,
                                         double tol = 1e-8);

/// Normal growth of the family mapped through SigmaInf^{-1/2}.
NormalGrowthVerdict weighted_normal_growth(const SpectralDecomposition& dec,
                                           const MatrixXd& SigmaInf, double tol = 1e-8);

/// Default omega grid: 4096 points covering 64 periods of the slowest angle.
std::vector<double> default_omega_grid(const SpectralDecomposition& dec);

}  // namespace cutofflab
