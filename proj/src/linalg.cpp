#include "cutofflab/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace cutofflab {

namespace {

// Orthonormal nullspace basis of A, treating singular values below
// max(relTol * sigma_max, absTol) as zero. The absolute floor matters when a
// nilpotent power is numerically zero and sigma_max itself is noise.
MatrixXcd nullspace(const MatrixXcd& A, double relTol, double absTol) {
    Eigen::JacobiSVD<MatrixXcd> svd(A, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = std::max(relTol * std::max(sv(0), 1e-300), absTol);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++rank;
    const int nullDim = static_cast<int>(A.cols()) - rank;
    return svd.matrixV().rightCols(nullDim);
}

// Rotate the phase so the largest-modulus component is real positive,
// then normalize. Deterministic gauge for eigenvectors.
void gauge(VectorXcd& v) {
    int imax = 0;
    double best = 0.0;
    for (int i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > best) {
            best = std::abs(v(i));
            imax = i;
        }
    }
    if (best > 0.0) v *= std::conj(v(imax)) / std::abs(v(imax));
    v.normalize();
}

// Component of each column of C orthogonal to the column span of B.
MatrixXcd project_out(const MatrixXcd& B, const MatrixXcd& C) {
    if (B.cols() == 0) return C;
    Eigen::HouseholderQR<MatrixXcd> qr(B);
    MatrixXcd Qb = qr.householderQ() * MatrixXcd::Identity(B.rows(), B.cols());
    return C - Qb * (Qb.adjoint() * C);
}

std::vector<JordanChain> extract_chains(const MatrixXcd& M, int algebraic, double scale,
                                        double tol) {
    const int d = static_cast<int>(M.rows());

    // N_k = null(M^k); saturation at dim == algebraic multiplicity. A vector
    // annihilated by the exact M^k picks up noise of order
    // k * clusterWidth * |M|^{k-1} under the averaged eigenvalue, which sets
    // the absolute floor below.
    const double clusterWidth = 1e-8 * (1.0 + scale);
    const double normM = std::max(operator_norm(M.real()) + operator_norm(M.imag()), 1.0);
    std::vector<MatrixXcd> nulls;
    MatrixXcd P = MatrixXcd::Identity(d, d);
    int depth = 0;
    for (int k = 1; k <= algebraic; ++k) {
        P = M * P;
        const double absTol = 100.0 * k * clusterWidth * std::pow(normM, k - 1);
        MatrixXcd Nk = nullspace(P, 1e-7, absTol);
        if (static_cast<int>(Nk.cols()) > algebraic) Nk = Nk.rightCols(algebraic);
        nulls.push_back(Nk);
        depth = k;
        if (static_cast<int>(Nk.cols()) >= algebraic) break;
    }
    if (static_cast<int>(nulls.back().cols()) < algebraic)
        fail(Errc::IllConditioned, "Jordan chain extraction: nullspace saturation failed");

    // Heads at level k are independent modulo N_{k-1} plus the level-k vectors
    // of longer chains.
    std::vector<JordanChain> chains;
    std::vector<std::vector<VectorXcd>> byLevel(depth + 1);  // byLevel[k]: chain vectors at level k
    for (int k = depth; k >= 1; --k) {
        const int dimK = static_cast<int>(nulls[k - 1].cols());
        const int dimKm1 = k >= 2 ? static_cast<int>(nulls[k - 2].cols()) : 0;
        const int wanted = dimK - dimKm1 - static_cast<int>(byLevel[k].size());
        if (wanted <= 0) continue;

        MatrixXcd blocker(d, dimKm1 + byLevel[k].size());
        if (dimKm1 > 0) blocker.leftCols(dimKm1) = nulls[k - 2];
        for (size_t j = 0; j < byLevel[k].size(); ++j)
            blocker.col(dimKm1 + static_cast<int>(j)) = byLevel[k][j];

        MatrixXcd residual = project_out(blocker, nulls[k - 1]);
        // greedy pick of the most independent candidates, re-orthogonalizing
        for (int pick = 0; pick < wanted; ++pick) {
            int best = -1;
            double bestNorm = 0.0;
            for (int j = 0; j < residual.cols(); ++j) {
                if (residual.col(j).norm() > bestNorm) {
                    bestNorm = residual.col(j).norm();
                    best = j;
                }
            }
            if (best < 0 || bestNorm < 1e-7)
                fail(Errc::IllConditioned, "Jordan chain extraction: degenerate head candidates");
            VectorXcd head = residual.col(best).normalized();
            for (int j = 0; j < residual.cols(); ++j)
                residual.col(j) -= head * head.dot(residual.col(j));

            JordanChain chain;
            chain.vectors.assign(k, VectorXcd());
            chain.vectors[k - 1] = head;
            for (int lvl = k - 1; lvl >= 1; --lvl)
                chain.vectors[lvl - 1] = M * chain.vectors[lvl];
            // normalize the whole chain so the eigenvector has unit norm
            const double enorm = chain.vectors[0].norm();
            if (enorm < 1e-12)
                fail(Errc::IllConditioned, "Jordan chain extraction: vanishing eigenvector");
            Complex phase = 1.0;
            {
                VectorXcd e = chain.vectors[0];
                int imax = 0;
                for (int i = 0; i < e.size(); ++i)
                    if (std::abs(e(i)) > std::abs(e(imax))) imax = i;
                phase = std::conj(e(imax)) / std::abs(e(imax));
            }
            for (auto& v : chain.vectors) v *= phase / enorm;
            for (int lvl = 1; lvl <= k; ++lvl) byLevel[lvl].push_back(chain.vectors[lvl - 1]);
            chains.push_back(std::move(chain));
        }
    }

    std::sort(chains.begin(), chains.end(),
              [](const JordanChain& a, const JordanChain& b) { return a.length() > b.length(); });

    // verify the chain relations
    for (const auto& ch : chains) {
        if ((M * ch.vectors[0]).norm() > tol * (1.0 + scale))
            fail(Errc::IllConditioned, "eigenvector residual exceeds tolerance");
        for (size_t j = 0; j + 1 < ch.vectors.size(); ++j) {
            const double res = (M * ch.vectors[j + 1] - ch.vectors[j]).norm();
            if (res > tol * (1.0 + scale) * std::max(1.0, ch.vectors[j + 1].norm()))
                fail(Errc::IllConditioned, "Jordan relation residual exceeds tolerance");
        }
    }
    return chains;
}

}  // namespace

double operator_norm(const MatrixXd& A) {
    if (A.size() == 0) return 0.0;
    return A.jacobiSvd().singularValues()(0);
}

MatrixXcd EigenStructure::basis() const {
    MatrixXcd V(dim, dim);
    int col = 0;
    for (const auto& b : blocks)
        for (const auto& ch : b.chains)
            for (const auto& v : ch.vectors) V.col(col++) = v;
    return V;
}

MatrixXcd EigenStructure::jordanMatrix() const {
    MatrixXcd J = MatrixXcd::Zero(dim, dim);
    int col = 0;
    for (const auto& b : blocks)
        for (const auto& ch : b.chains) {
            for (int j = 0; j < ch.length(); ++j) {
                J(col + j, col + j) = b.lambda;
                if (j + 1 < ch.length()) J(col + j, col + j + 1) = 1.0;
            }
            col += ch.length();
        }
    return J;
}

std::vector<Complex> EigenStructure::eigenvalues() const {
    std::vector<Complex> out;
    out.reserve(blocks.size());
    for (const auto& b : blocks) out.push_back(b.lambda);
    return out;
}

EigenStructure eigen_structure(const MatrixXd& Q, double tol) {
    if (Q.rows() != Q.cols()) fail(Errc::DimensionError, "eigen_structure: matrix not square");
    if (!Q.allFinite()) fail(Errc::DomainError, "eigen_structure: non-finite entries");
    const int d = static_cast<int>(Q.rows());
    const double norm = operator_norm(Q);

    Eigen::EigenSolver<MatrixXd> solver(Q, false);
    if (solver.info() != Eigen::Success)
        fail(Errc::NonConvergence, "eigen_structure: QR iteration did not converge");
    VectorXcd raw = solver.eigenvalues();

    const double clusterTol = 1e-8 * (1.0 + norm);
    const double imagTol = clusterTol;

    // cluster raw eigenvalues into distinct values with multiplicities
    std::vector<int> order(d);
    for (int i = 0; i < d; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (raw(a).real() != raw(b).real()) return raw(a).real() < raw(b).real();
        return raw(a).imag() < raw(b).imag();
    });
    struct Cluster {
        Complex lambda;
        int count = 0;
    };
    std::vector<Cluster> clusters;
    std::vector<bool> used(d, false);
    for (int oi = 0; oi < d; ++oi) {
        const int i = order[oi];
        if (used[i]) continue;
        Complex sum = raw(i);
        int count = 1;
        used[i] = true;
        for (int oj = oi + 1; oj < d; ++oj) {
            const int j = order[oj];
            if (used[j]) continue;
            if (std::abs(raw(j) - sum / static_cast<double>(count)) <= clusterTol) {
                sum += raw(j);
                ++count;
                used[j] = true;
            }
        }
        clusters.push_back({sum / static_cast<double>(count), count});
    }

    // snap near-real eigenvalues, then enforce exact conjugacy by averaging
    for (auto& c : clusters)
        if (std::abs(c.lambda.imag()) <= imagTol) c.lambda = Complex(c.lambda.real(), 0.0);
    for (size_t i = 0; i < clusters.size(); ++i) {
        if (clusters[i].lambda.imag() <= imagTol) continue;
        for (size_t j = 0; j < clusters.size(); ++j) {
            if (clusters[j].lambda.imag() >= -imagTol) continue;
            if (std::abs(clusters[i].lambda - std::conj(clusters[j].lambda)) <= 2 * clusterTol &&
                clusters[i].count == clusters[j].count) {
                const Complex avg = 0.5 * (clusters[i].lambda + std::conj(clusters[j].lambda));
                clusters[i].lambda = avg;
                clusters[j].lambda = std::conj(avg);
                break;
            }
        }
    }

    std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
        if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
        if (std::abs(a.lambda.imag()) != std::abs(b.lambda.imag()))
            return std::abs(a.lambda.imag()) < std::abs(b.lambda.imag());
        return a.lambda.imag() > b.lambda.imag();
    });

    EigenStructure out;
    out.dim = d;
    const MatrixXcd Qc = Q.cast<Complex>();
    for (const auto& c : clusters) {
        EigenBlock block;
        block.lambda = c.lambda;
        block.algebraic = c.count;
        if (c.lambda.imag() < -imagTol) {
            // conjugate twin: mirror the chains of the positive member
            const EigenBlock& twin = out.blocks.back();
            block.geometric = twin.geometric;
            for (const auto& ch : twin.chains) {
                JordanChain cc;
                for (const auto& v : ch.vectors) cc.vectors.push_back(v.conjugate());
                block.chains.push_back(std::move(cc));
            }
        } else {
            MatrixXcd M = Qc - c.lambda * MatrixXcd::Identity(d, d);
            block.chains = extract_chains(M, c.count, norm, tol);
            block.geometric = static_cast<int>(block.chains.size());
            if (c.lambda.imag() <= imagTol) {
                // real eigenvalue of a real matrix: chains can be taken real
                for (auto& ch : block.chains) {
                    for (auto& v : ch.vectors) {
                        if (v.imag().norm() > tol * (1.0 + norm) * std::max(1.0, v.norm()))
                            fail(Errc::IllConditioned,
                                 "real eigenvalue produced a genuinely complex chain");
                        v = v.real().cast<Complex>();
                    }
                    const double n0 = ch.vectors[0].norm();
                    for (auto& v : ch.vectors) v /= n0;
                    if (ch.vectors[0].real().sum() < 0.0)
                        for (auto& v : ch.vectors) v = -v;
                }
            }
        }
        out.blocks.push_back(std::move(block));
    }

    int total = 0;
    for (const auto& b : out.blocks) total += b.algebraic;
    if (total != d) fail(Errc::IllConditioned, "eigen_structure: multiplicities do not sum to d");
    return out;
}

MatrixXd matrix_exponential(const MatrixXd& A) {
    if (A.rows() != A.cols()) fail(Errc::DimensionError, "matrix_exponential: not square");
    if (!A.allFinite()) fail(Errc::DomainError, "matrix_exponential: non-finite entries");
    MatrixXd E = A.exp();
    if (!E.allFinite()) fail(Errc::Overflow, "matrix_exponential: result not representable");
    return E;
}

MatrixXd lyapunov_solve(const MatrixXd& Q, const MatrixXd& S) {
    if (Q.rows() != Q.cols() || S.rows() != S.cols() || Q.rows() != S.rows())
        fail(Errc::DimensionError, "lyapunov_solve: dimension mismatch");
    if (!is_stable_drift(Q)) fail(Errc::UnstableDrift, "lyapunov_solve: Re lambda(Q) <= 0");
    const int n = static_cast<int>(Q.rows());

    Eigen::ComplexSchur<MatrixXd> schur(Q, true);
    if (schur.info() != Eigen::Success) fail(Errc::NonConvergence, "lyapunov_solve: Schur failed");
    const MatrixXcd& T = schur.matrixT();
    const MatrixXcd& U = schur.matrixU();

    // T Y + Y T^* = F, solved column by column from the last
    MatrixXcd F = U.adjoint() * S * U;
    MatrixXcd Y = MatrixXcd::Zero(n, n);
    for (int k = n - 1; k >= 0; --k) {
        VectorXcd rhs = F.col(k);
        for (int j = k + 1; j < n; ++j) rhs -= std::conj(T(k, j)) * Y.col(j);
        // (T + conj(T_kk) I) y = rhs, upper-triangular back substitution
        const Complex shift = std::conj(T(k, k));
        for (int i = n - 1; i >= 0; --i) {
            Complex acc = rhs(i);
            for (int j = i + 1; j < n; ++j) acc -= T(i, j) * Y(j, k);
            Y(i, k) = acc / (T(i, i) + shift);
        }
    }
    MatrixXd X = (U * Y * U.adjoint()).real();
    return 0.5 * (X + X.transpose());
}

bool is_stable_drift(const MatrixXd& Q) {
    if (Q.rows() != Q.cols()) return false;
    const VectorXcd lambdas = Q.eigenvalues();
    const double tol = 1e-10 * (1.0 + operator_norm(Q));
    for (int i = 0; i < lambdas.size(); ++i)
        if (lambdas(i).real() <= tol) return false;
    return true;
}

int kalman_rank(const MatrixXd& Q, const MatrixXd& sigma, double relTol) {
    const int d = static_cast<int>(Q.rows());
    MatrixXd K(d, d * sigma.cols());
    MatrixXd block = sigma;
    for (int k = 0; k < d; ++k) {
        K.middleCols(k * sigma.cols(), sigma.cols()) = block;
        block = Q * block;
    }
    Eigen::JacobiSVD<MatrixXd> svd(K);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > relTol * sv(0)) ++rank;
    return rank;
}

MatrixXd inverse_sqrt_spd(const MatrixXd& S, double relTol) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (S + S.transpose()));
    const VectorXd& ev = es.eigenvalues();
    const double cutoff = relTol * std::max(ev(ev.size() - 1), 0.0);
    if (ev(0) <= cutoff)
        fail(Errc::SingularCovariance, "inverse_sqrt_spd: matrix singular within tolerance");
    VectorXd inv = ev.array().rsqrt();
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace cutofflab
