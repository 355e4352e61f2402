#pragma once

#include <vector>

#include "cutofflab/types.hpp"

namespace cutofflab {

/// One Jordan chain: vectors[0] is a true eigenvector and
/// (Q - lambda I) vectors[k+1] = vectors[k].
struct JordanChain {
    std::vector<VectorXcd> vectors;

    int length() const { return static_cast<int>(vectors.size()); }
};

/// All chains attached to one (clustered) eigenvalue.
struct EigenBlock {
    Complex lambda;
    int algebraic = 0;
    int geometric = 0;
    std::vector<JordanChain> chains;  // longest first
};

/// Full generalized eigendecomposition of a real square matrix.
/// Blocks are sorted ascending by real part, ties by ascending |Im|,
/// conjugate pairs adjacent with the positive-imaginary member first.
struct EigenStructure {
    std::vector<EigenBlock> blocks;
    int dim = 0;

    /// Basis matrix whose columns are all chain vectors in block order,
    /// each chain listed from eigenvector upward.
    MatrixXcd basis() const;

    /// Jordan matrix J with Q = basis * J * basis^{-1}.
    MatrixXcd jordanMatrix() const;

    std::vector<Complex> eigenvalues() const;  // one entry per block
};

double operator_norm(const MatrixXd& A);  // largest singular value

/// Eigenvalues + Jordan chains. Conjugate pairs are made exactly conjugate
/// by averaging; chain residuals are verified against tol.
EigenStructure eigen_structure(const MatrixXd& Q, double tol = 1e-8);

/// e^{A} by scaling-and-squaring (Pade order 13).
MatrixXd matrix_exponential(const MatrixXd& A);

/// Solves Q X + X Q^T = S for symmetric S, all Re lambda(Q) > 0.
/// Bartels-Stewart on the complex Schur form of Q.
MatrixXd lyapunov_solve(const MatrixXd& Q, const MatrixXd& S);

bool is_stable_drift(const MatrixXd& Q);  // Re lambda > 0 for all eigenvalues

/// Rank of the Kalman controllability matrix [s, Qs, ..., Q^{d-1}s].
int kalman_rank(const MatrixXd& Q, const MatrixXd& sigma, double relTol = 1e-10);

/// Symmetric positive (semi)definite inverse square root.
MatrixXd inverse_sqrt_spd(const MatrixXd& S, double relTol = 1e-12);

}  // namespace cutofflab
