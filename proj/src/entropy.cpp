#include "cutofflab/entropy.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

#include "cutofflab/cutoff.hpp"
#include "cutofflab/linalg.hpp"
#include "cutofflab/sde.hpp"

namespace cutofflab {

namespace {

struct SpdFactors {
    MatrixXd inverse;
    double logDet;
};

SpdFactors spd_factors(const MatrixXd& S) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (S + S.transpose()));
    const VectorXd& ev = es.eigenvalues();
    if (ev(0) <= 1e-14 * std::max(ev(ev.size() - 1), 0.0))
        fail(Errc::SingularCovariance, "covariance singular within tolerance");
    SpdFactors f;
    f.inverse = es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    f.logDet = ev.array().log().sum();
    return f;
}

}  // namespace

double relative_entropy(const GaussianLaw& a, const GaussianLaw& b) {
    if (a.mean.size() != b.mean.size())
        fail(Errc::DimensionError, "relative_entropy: dimension mismatch");
    const int d = static_cast<int>(a.mean.size());
    const SpdFactors fa = spd_factors(a.covariance);
    const SpdFactors fb = spd_factors(b.covariance);
    const VectorXd m = a.mean - b.mean;
    const double quad = m.dot(fb.inverse * m);
    const double trace = (fb.inverse * a.covariance).trace();
    return 0.5 * (quad + trace - d + fb.logDet - fa.logDet);
}

double gaussian_w2(const GaussianLaw& a, const GaussianLaw& b) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (b.covariance + b.covariance.transpose()));
    const MatrixXd rootB =
        es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
        es.eigenvectors().transpose();
    Eigen::SelfAdjointEigenSolver<MatrixXd> cross(rootB * a.covariance * rootB);
    const double bures2 = a.covariance.trace() + b.covariance.trace() -
                          2.0 * cross.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return std::sqrt(std::max((a.mean - b.mean).squaredNorm() + bures2, 0.0));
}

double entropy_dichotomy(const MatrixXd& Q, const MatrixXd& sigma, const VectorXd& x,
                         double delta, const std::vector<double>& epsGrid) {
    const int d = static_cast<int>(Q.rows());
    if (kalman_rank(Q, sigma) < d)
        fail(Errc::DegenerateNoise, "entropy_dichotomy: (Q, sigma) not controllable");
    if (epsGrid.size() < 2) fail(Errc::DomainError, "entropy_dichotomy: need >= 2 grid points");

    const MatrixXd S = sigma * sigma.transpose();
    const MatrixXd SigmaInf = lyapunov_solve(Q, S);
    const SpectralDecomposition dec = decompose(Q, x);

    std::vector<double> lx, ly;
    for (double eps : epsGrid) {
        const double t = delta * cutoff_time(dec.rate, dec.ell, eps);
        const MatrixXd SigmaT = gaussian_covariance(Q, S, t);
        const GaussianLaw marginal{matrix_exponential(-t * Q) * x, eps * eps * SigmaT};
        const GaussianLaw equilibrium{VectorXd::Zero(d), eps * eps * SigmaInf};
        const double H = relative_entropy(marginal, equilibrium);
        if (H <= 0.0) fail(Errc::DomainError, "entropy_dichotomy: vanishing entropy on the grid");
        lx.push_back(std::log(eps));
        ly.push_back(std::log(H));
    }
    // least-squares slope
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= lx.size();
    my /= ly.size();
    double sxy = 0.0, sxx = 0.0;
    for (size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    return sxy / sxx;
}

double entropy_profile(const SpectralDecomposition& dec, const MatrixXd& SigmaInf, double w,
                       double r) {
    const NormalGrowthVerdict v = weighted_normal_growth(dec, SigmaInf);
    if (!v.profileExists)
        fail(Errc::NoProfile, "entropy_profile: weighted normal growth fails");
    return std::pow(dec.rate, 1 - dec.ell) * std::exp(-dec.rate * w * r) * v.representativeNorm;
}

}  // namespace cutofflab
