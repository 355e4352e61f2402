#include "cutofflab/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace cutofflab {

VectorXd SpectralDecomposition::sumAt(double t) const {
    const Eigen::Index d = v1.size() > 0 ? v1.size() : (pairs.empty() ? 0 : pairs[0].re.size());
    VectorXd s = VectorXd::Zero(d);
    if (v1.size() > 0) s = v1;
    for (const auto& p : pairs) s += 2.0 * (std::cos(p.theta * t) * p.re - std::sin(p.theta * t) * p.im);
    return s;
}

double SpectralDecomposition::sumNormBound() const {
    double b = v1.size() > 0 ? v1.norm() : 0.0;
    for (const auto& p : pairs) b += 2.0 * std::sqrt(p.re.squaredNorm() + p.im.squaredNorm());
    return b;
}

std::vector<double> SpectralDecomposition::angles() const {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back(p.theta);
    return out;
}

std::vector<VectorXd> SpectralDecomposition::realFamily() const {
    std::vector<VectorXd> fam;
    if (v1.size() > 0) fam.push_back(v1);
    for (const auto& p : pairs) {
        fam.push_back(p.re);
        fam.push_back(p.im);
    }
    return fam;
}

SpectralDecomposition decompose(const MatrixXd& Q, const VectorXd& x, double tol) {
    return decompose(eigen_structure(Q, tol), x, tol);
}

SpectralDecomposition decompose(const EigenStructure& eig, const VectorXd& x, double tol) {
    const int d = eig.dim;
    if (x.size() != d) fail(Errc::DimensionError, "decompose: x has wrong dimension");
    if (x.norm() == 0.0) fail(Errc::ZeroInitialState, "decompose: x = 0 has no cutoff");
    double minRe = 1e300, maxNorm = 0.0;
    for (const auto& b : eig.blocks) {
        minRe = std::min(minRe, b.lambda.real());
        maxNorm = std::max(maxNorm, std::abs(b.lambda));
    }
    if (minRe <= 1e-10 * (1.0 + maxNorm))
        fail(Errc::UnstableDrift, "decompose: Q violates the stability hypothesis");

    const MatrixXcd V = eig.basis();
    const VectorXcd c = V.fullPivLu().solve(x.cast<Complex>());
    const double partTol = 1e-10 * x.norm();

    // participating depth per block: deepest chain position whose
    // contribution |c_j| |v_j| is above the threshold
    struct BlockInfo {
        int depth = -1;       // -1: x has no component here
        VectorXcd leading;    // sum over chains of c_{chain,depth} * eigenvector
    };
    std::vector<BlockInfo> info(eig.blocks.size());
    int col = 0;
    for (size_t bi = 0; bi < eig.blocks.size(); ++bi) {
        const auto& block = eig.blocks[bi];
        int depth = -1;
        for (const auto& ch : block.chains) {
            for (int j = 0; j < ch.length(); ++j)
                if (std::abs(c(col + j)) * V.col(col + j).norm() > partTol)
                    depth = std::max(depth, j);
            col += ch.length();
        }
        info[bi].depth = depth;
    }
    col = 0;
    for (size_t bi = 0; bi < eig.blocks.size(); ++bi) {
        const auto& block = eig.blocks[bi];
        const int depth = info[bi].depth;
        if (depth >= 0) info[bi].leading = VectorXcd::Zero(d);
        for (const auto& ch : block.chains) {
            if (depth >= 0 && ch.length() > depth)
                info[bi].leading += c(col + depth) * ch.vectors[0];
            col += ch.length();
        }
    }

    double rate = 1e300;
    for (size_t bi = 0; bi < eig.blocks.size(); ++bi)
        if (info[bi].depth >= 0) rate = std::min(rate, eig.blocks[bi].lambda.real());
    const double clusterTol = 1e-8 * (1.0 + maxNorm);

    int ell = 1;
    for (size_t bi = 0; bi < eig.blocks.size(); ++bi)
        if (info[bi].depth >= 0 && eig.blocks[bi].lambda.real() - rate <= clusterTol)
            ell = std::max(ell, info[bi].depth + 1);

    // leading contributions: (-1)^{ell-1} / (ell-1)! * sum_chains c * eigenvector
    double sign = (ell - 1) % 2 == 0 ? 1.0 : -1.0;
    double factorial = 1.0;
    for (int j = 2; j <= ell - 1; ++j) factorial *= j;
    const double scale = sign / factorial;

    SpectralDecomposition out;
    out.rate = rate;
    out.ell = ell;
    const double imagTol = clusterTol;
    VectorXd v1 = VectorXd::Zero(d);
    bool hasReal = false;
    for (size_t bi = 0; bi < eig.blocks.size(); ++bi) {
        const auto& block = eig.blocks[bi];
        if (info[bi].depth != ell - 1) continue;
        if (block.lambda.real() - rate > clusterTol) continue;
        const VectorXcd w = scale * info[bi].leading;
        if (std::abs(block.lambda.imag()) <= imagTol) {
            v1 += w.real();
            hasReal = true;
        } else if (block.lambda.imag() < 0.0) {
            // negative-imaginary member carries the pair (orbit = 2 Re(e^{i theta t} w))
            out.pairs.push_back({-block.lambda.imag(), w.real(), w.imag()});
        }
    }
    if (hasReal) out.v1 = v1;
    std::sort(out.pairs.begin(), out.pairs.end(),
              [](const auto& a, const auto& b) { return a.theta < b.theta; });
    return out;
}

bool resonance_test(const std::vector<double>& angles, double tol, int hmax) {
    const int n = static_cast<int>(angles.size());
    if (n == 0) return false;
    // cap the enumeration so the scan stays bounded in high dimension
    int bound = hmax;
    double combos = 1.0;
    for (int i = 0; i < n; ++i) combos *= 2.0 * bound + 1.0;
    while (combos > 4e6 && bound > 2) {
        --bound;
        combos = 1.0;
        for (int i = 0; i < n; ++i) combos *= 2.0 * bound + 1.0;
    }

    std::vector<int> h(n, -bound);
    while (true) {
        bool allZero = true;
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            if (h[i] != 0) allZero = false;
            s += h[i] * angles[i];
        }
        if (!allZero) {
            const double frac = std::remainder(s, 2.0 * M_PI);
            if (std::abs(frac) <= tol) return true;
        }
        int i = 0;
        while (i < n && h[i] == bound) h[i++] = -bound;
        if (i == n) break;
        ++h[i];
    }
    return false;
}

std::vector<double> default_omega_grid(const SpectralDecomposition& dec) {
    if (dec.pairs.empty()) return {0.0};
    double slowest = dec.pairs[0].theta;
    for (const auto& p : dec.pairs) slowest = std::min(slowest, p.theta);
    const double span = 64.0 * 2.0 * M_PI / slowest;
    std::vector<double> grid(4096);
    for (size_t i = 0; i < grid.size(); ++i)
        grid[i] = span * static_cast<double>(i) / static_cast<double>(grid.size() - 1);
    return grid;
}

bool omega_on_sphere(const SpectralDecomposition& dec, const std::vector<double>& tGrid,
                     double tol) {
    if (tGrid.empty()) fail(Errc::DomainError, "omega_on_sphere: empty grid");
    std::vector<double> norms;
    norms.reserve(tGrid.size());
    for (double t : tGrid) norms.push_back(dec.sumAt(t).norm());
    double mean = 0.0;
    for (double v : norms) mean += v;
    mean /= static_cast<double>(norms.size());
    if (mean == 0.0) return true;
    double dev = 0.0;
    for (double v : norms) dev = std::max(dev, std::abs(v - mean));
    return dev <= tol * mean;
}

bool omega_on_sphere(const SpectralDecomposition& dec, double tol) {
    return omega_on_sphere(dec, default_omega_grid(dec), tol);
}

namespace {

NormalGrowthVerdict growth_verdict(const SpectralDecomposition& dec, double tol) {
    NormalGrowthVerdict v;
    const auto fam = dec.realFamily();
    v.orthogonal = true;
    for (size_t i = 0; i < fam.size(); ++i)
        for (size_t j = i + 1; j < fam.size(); ++j) {
            const double bound = tol * std::max(fam[i].norm() * fam[j].norm(), 1e-300);
            if (std::abs(fam[i].dot(fam[j])) > bound) v.orthogonal = false;
        }
    v.equalNorms = true;
    for (const auto& p : dec.pairs) {
        const double mx = std::max({p.re.norm(), p.im.norm(), 1e-300});
        if (std::abs(p.re.norm() - p.im.norm()) > tol * mx) v.equalNorms = false;
    }
    // a single rotating pair covers its whole circle in continuous time, so
    // the integer-relation condition only matters from two angles upward
    v.resonant = dec.pairs.size() >= 2 && resonance_test(dec.angles());
    if (!v.resonant) {
        v.profileExists = v.orthogonal && v.equalNorms;
        v.omegaOnSphere = v.profileExists;
        v.representativeNorm = dec.sumAt(0.0).norm();
    } else {
        v.omegaOnSphere = omega_on_sphere(dec, std::max(tol, 1e-10));
        v.profileExists = v.omegaOnSphere;
        if (v.omegaOnSphere) {
            const auto grid = default_omega_grid(dec);
            double mean = 0.0;
            for (double t : grid) mean += dec.sumAt(t).norm();
            v.representativeNorm = mean / static_cast<double>(grid.size());
        } else {
            v.representativeNorm = dec.sumAt(0.0).norm();
        }
    }
    return v;
}

}  // namespace

NormalGrowthVerdict normal_growth(const SpectralDecomposition& dec, double tol) {
    return growth_verdict(dec, tol);
}

NormalGrowthVerdict oscillator_2x2_check(const MatrixXd& Q, const VectorXd& z, double tol) {
    if (Q.rows() != 2 || Q.cols() != 2 || z.size() != 2)
        fail(Errc::DimensionError, "oscillator_2x2_check: requires d = 2");
    const double tr = Q.trace();
    const double det = Q.determinant();
    const double disc = tr * tr - 4.0 * det;
    if (disc >= 0.0) fail(Errc::RealSpectrum, "oscillator_2x2_check: spectrum is real");
    const double re = 0.5 * tr;
    const double im = 0.5 * std::sqrt(-disc);  // lambda_+ = re + i im

    const VectorXd a = Q * z - re * z;  // Re((Q - lambda_+ I) z)
    const VectorXd b = -im * z;         // Im((Q - lambda_+ I) z)

    NormalGrowthVerdict v;
    v.resonant = false;
    v.orthogonal = std::abs(a.dot(b)) <= tol * std::max(a.norm() * b.norm(), 1e-300);
    v.equalNorms = std::abs(a.norm() - b.norm()) <= tol * std::max({a.norm(), b.norm(), 1e-300});
    v.profileExists = v.orthogonal && v.equalNorms;
    v.omegaOnSphere = v.profileExists;
    v.representativeNorm = a.norm() / std::abs(im);
    return v;
}

NormalGrowthVerdict weighted_normal_growth(const SpectralDecomposition& dec,
                                           const MatrixXd& SigmaInf, double tol) {
    const MatrixXd W = inverse_sqrt_spd(SigmaInf);
    SpectralDecomposition wdec;
    wdec.rate = dec.rate;
    wdec.ell = dec.ell;
    if (dec.v1.size() > 0) wdec.v1 = W * dec.v1;
    for (const auto& p : dec.pairs) wdec.pairs.push_back({p.theta, W * p.re, W * p.im});
    return growth_verdict(wdec, tol);
}

}  // namespace cutofflab
