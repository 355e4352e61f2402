#include "cutofflab/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cutofflab/rng.hpp"

namespace cutofflab {

double assignment_cost(const MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    if (cost.cols() != n) fail(Errc::DimensionError, "assignment_cost: matrix not square");
    if (n == 0) return 0.0;
    const double inf = std::numeric_limits<double>::infinity();

    // the scan below walks rows; a row-major copy keeps it in cache
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> c = cost;

    // 1-indexed potentials/links, column 0 is the virtual root
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = c(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    double total = 0.0;
    for (int j = 1; j <= n; ++j) total += c(p[j] - 1, j - 1);
    return total;
}

double wasserstein_1d(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double p) {
    if (a.dim() != 1 || b.dim() != 1) fail(Errc::DimensionError, "wasserstein_1d: requires d = 1");
    if (a.size() < 1 || b.size() < 1) fail(Errc::DomainError, "wasserstein_1d: empty measure");
    if (p <= 0.0) fail(Errc::DomainError, "wasserstein_1d: p must be positive");
    if (p < 1.0) return wasserstein_nd(a, b, p);  // concave cost: sorted pairing not optimal

    std::vector<double> xs(a.samples.data(), a.samples.data() + a.size());
    std::vector<double> ys(b.samples.data(), b.samples.data() + b.size());
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());

    const std::size_t na = xs.size(), nb = ys.size();
    // integrate |F_a^{-1} - F_b^{-1}|^p over (0,1); both quantiles are step
    // functions with breakpoints i/na and j/nb
    double acc = 0.0, pos = 0.0;
    std::size_t i = 0, j = 0;
    while (i < na && j < nb) {
        const double nextA = static_cast<double>(i + 1) / static_cast<double>(na);
        const double nextB = static_cast<double>(j + 1) / static_cast<double>(nb);
        const double next = std::min(nextA, nextB);
        acc += (next - pos) * std::pow(std::abs(xs[i] - ys[j]), p);
        pos = next;
        if (nextA <= next + 1e-18) ++i;
        if (nextB <= next + 1e-18) ++j;
    }
    return std::pow(acc, std::min(1.0, 1.0 / p));
}

double wasserstein_nd(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double p) {
    if (a.dim() != b.dim()) fail(Errc::DimensionError, "wasserstein_nd: dimension mismatch");
    if (a.size() != b.size()) fail(Errc::SizeMismatch, "wasserstein_nd: unequal sample counts");
    if (p <= 0.0) fail(Errc::DomainError, "wasserstein_nd: p must be positive");
    const int n = static_cast<int>(a.size());
    if (n > 4096) fail(Errc::TooLarge, "wasserstein_nd: beyond the exact solver cap (4096)");

    MatrixXd cost(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            cost(i, j) = std::pow((a.samples.row(i) - b.samples.row(j)).norm(), p);
    const double mean = assignment_cost(cost) / static_cast<double>(n);
    return std::pow(mean, std::min(1.0, 1.0 / p));
}

double empirical_wasserstein(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double p) {
    if (a.dim() == 1 && b.dim() == 1) return wasserstein_1d(a, b, p);
    return wasserstein_nd(a, b, p);
}

ShiftLinearityResult shift_linearity_check(const EmpiricalMeasure& U, const VectorXd& u,
                                           double p) {
    if (U.dim() != u.size()) fail(Errc::DimensionError, "shift_linearity_check: dim mismatch");
    const Eigen::Index half = U.size() / 2;
    if (half < 1) fail(Errc::DomainError, "shift_linearity_check: need at least 2 samples");
    EmpiricalMeasure first{U.samples.topRows(half)};
    EmpiricalMeasure second{U.samples.middleRows(half, half)};
    if ((p < 1.0 || U.dim() > 1) && half > 2048) {
        // assignment route: cap the instance size, deterministically
        first = subsample(first, 2048, 0xAFAF);
        second = subsample(second, 2048, 0xBFBF);
    }
    first.samples.rowwise() += u.transpose();

    ShiftLinearityResult out;
    out.estimate = empirical_wasserstein(first, second, p);
    if (p >= 1.0) {
        out.predicted = u.norm();
        out.bracketLo = out.bracketHi = u.norm();
    } else {
        const double up = std::pow(u.norm(), p);
        out.bracketHi = up;
        out.bracketLo = std::max(up - 2.0 * empirical_moment(U, p), 0.0);
        out.predicted = up;
    }
    return out;
}

bool contraction_check(const EmpiricalMeasure& U1, const EmpiricalMeasure& U2,
                       const std::function<VectorXd(const VectorXd&)>& T, int outDim, double p,
                       double slack) {
    EmpiricalMeasure t1{MatrixXd(U1.size(), outDim)}, t2{MatrixXd(U2.size(), outDim)};
    for (Eigen::Index i = 0; i < U1.size(); ++i)
        t1.samples.row(i) = T(U1.samples.row(i).transpose()).transpose();
    for (Eigen::Index i = 0; i < U2.size(); ++i)
        t2.samples.row(i) = T(U2.samples.row(i).transpose()).transpose();
    const double lhs = empirical_wasserstein(t1, t2, p);
    const double rhs = empirical_wasserstein(U1, U2, p);
    return lhs <= rhs + slack * (1.0 + rhs);
}

double empirical_moment(const EmpiricalMeasure& U, double pPrime) {
    if (U.size() < 1) fail(Errc::DomainError, "empirical_moment: empty measure");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < U.size(); ++i)
        acc += std::pow(U.samples.row(i).norm(), pPrime);
    return acc / static_cast<double>(U.size());
}

EmpiricalMeasure subsample(const EmpiricalMeasure& U, int m, std::uint64_t seed) {
    Rng rng(seed);
    MatrixXd out(m, U.dim());
    for (int i = 0; i < m; ++i)
        out.row(i) = U.samples.row(static_cast<Eigen::Index>(rng.raw() % U.size()));
    return {out};
}

double bootstrap_se_wasserstein(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double p,
                                int B, std::uint64_t seed, int sub) {
    const int m = sub > 0 ? sub : static_cast<int>(std::min(a.size(), b.size()));
    std::vector<double> vals;
    vals.reserve(B);
    for (int k = 0; k < B; ++k) {
        EmpiricalMeasure ra = subsample(a, m, derive_seed(seed, 2 * k));
        EmpiricalMeasure rb = subsample(b, m, derive_seed(seed, 2 * k + 1));
        vals.push_back(empirical_wasserstein(ra, rb, p));
    }
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= vals.size();
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= std::max<std::size_t>(vals.size() - 1, 1);
    double se = std::sqrt(var);
    if (sub > 0) se *= std::sqrt(static_cast<double>(sub) / static_cast<double>(a.size()));
    return se;
}

}  // namespace cutofflab
