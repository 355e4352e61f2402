#include "cutofflab/cutoff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cutofflab/wasserstein.hpp"

namespace cutofflab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double domain_max_eps(int ell) { return ell > 1 ? std::exp(-1.0) * (1.0 - 1e-12) : 1.0 - 1e-12; }

}  // namespace

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::ExplicitProfile: return "explicit-profile";
        case Verdict::AbstractProfile: return "abstract-profile";
        default: return "window-only";
    }
}

double cutoff_time(double rate, int ell, double eps) {
    if (rate <= 0.0 || ell < 1) fail(Errc::DomainError, "cutoff_time: need rate > 0, ell >= 1");
    if (eps <= 0.0 || eps >= 1.0) fail(Errc::DomainError, "cutoff_time: eps must be in (0,1)");
    const double L = -std::log(eps);
    if (ell > 1 && L <= 1.0)
        fail(Errc::DomainError, "cutoff_time: the log-log term requires eps < 1/e");
    double t = L / rate;
    if (ell > 1) t += (ell - 1) * std::log(L) / rate;
    return t;
}

double profile_value(const CutoffReport& report, double r) {
    if (report.verdict != Verdict::ExplicitProfile)
        fail(Errc::NoProfile, "profile_value: no explicit profile for this system");
    return std::exp(-r * report.rate * report.window) * report.profileAmplitude;
}

Sandwich sandwich_bounds(const MatrixXd& Q, const VectorXd& x, double t, double eps,
                         double wassersteinOfOU, double p, double stationaryMomentP) {
    if (t < 0.0 || eps <= 0.0) fail(Errc::DomainError, "sandwich_bounds: t >= 0, eps > 0 required");
    const double flowNorm = (matrix_exponential(-t * Q) * x).norm();
    Sandwich s;
    if (p >= 1.0) {
        s.center = flowNorm / eps;
        s.lo = s.center - wassersteinOfOU;
        s.hi = s.center + wassersteinOfOU;
    } else {
        // renormalization by eps^p with the shifted-law moment bracket
        const double shifted = std::pow(flowNorm / eps, p);
        s.center = shifted;
        s.lo = std::max(shifted - 2.0 * stationaryMomentP, 0.0) - wassersteinOfOU;
        s.hi = shifted + wassersteinOfOU;
    }
    return s;
}

Dichotomy dichotomy_prediction(double rate, int ell, double delta) {
    (void)rate;
    (void)ell;
    if (delta <= 0.0 || delta == 1.0)
        fail(Errc::DomainError, "dichotomy_prediction: delta must be positive and != 1");
    return delta < 1.0 ? Dichotomy::Diverges : Dichotomy::Vanishes;
}

double error_bound(const CutoffReport& report, double eps) {
    const auto& c = report.consts;
    double subleading = 0.0;
    if (std::isfinite(c.gap) && c.gap > 0.0)
        subleading = c.K * std::pow(eps, c.gap / report.rate);
    return c.C0 * c.Emom * eps + subleading;
}

EpsilonInterval epsilon_window(const CutoffReport& report, double T, double eta) {
    if (T <= 0.0 || eta <= 0.0) fail(Errc::DomainError, "epsilon_window: T > 0, eta > 0 required");
    const auto& c = report.consts;
    EpsilonInterval out;

    const double emax = domain_max_eps(report.ell);
    // lower endpoint: the smallest eps with 2 t_eps <= T
    double lo;
    if (report.ell == 1) {
        lo = std::exp(-report.rate * T / 2.0);
    } else {
        if (2.0 * cutoff_time(report.rate, report.ell, emax) > T) {
            out.lo = out.hi = 0.0;
            out.empty = true;
            return out;
        }
        double a = 1e-300, b = emax;
        for (int it = 0; it < 200; ++it) {
            const double mid = std::sqrt(a * b);
            (2.0 * cutoff_time(report.rate, report.ell, mid) > T ? a : b) = mid;
        }
        lo = b;
    }

    double hi = emax;
    if (c.Emom > 0.0) hi = std::min(hi, eta / (2.0 * c.C0 * c.Emom));
    if (std::isfinite(c.gap) && c.gap > 0.0 && c.K > 0.0)
        hi = std::min(hi, std::pow(eta / (2.0 * c.K), report.rate / c.gap));

    out.lo = lo;
    out.hi = hi;
    out.empty = !(lo <= hi);
    return out;
}

double moment_cutoff_prediction(double pPrime, double stationaryMoment, double r) {
    if (pPrime <= 0.0) fail(Errc::DomainError, "moment_cutoff_prediction: p' must be positive");
    (void)r;  // the asymptote is r-independent; divergence at r -> -inf is the caller's branch
    return stationaryMoment;
}

namespace {

// C0 = sup_{s>=0} max_{0<=j<=d-1} s^j/j! e^{-(q - q*) s}, evaluated at the
// per-j maximizer s = j / (q - q*).
double initial_growth_constant(int d, double q, double qStar) {
    const double a = q - qStar;
    double best = 1.0;
    double factorial = 1.0;
    for (int j = 1; j <= d - 1; ++j) {
        factorial *= j;
        const double s = static_cast<double>(j) / a;
        best = std::max(best, std::pow(s, j) * std::exp(-a * s) / factorial);
    }
    return best;
}

}  // namespace

Analysis analyze_system(const SystemSpec& system, const AnalysisOptions& opts) {
    Analysis out;
    out.eig = eigen_structure(system.Q, opts.tol);
    out.dec = decompose(out.eig, system.x, opts.tol);
    out.growth = normal_growth(out.dec, opts.tol);

    CutoffReport rep;
    rep.rate = out.dec.rate;
    rep.ell = out.dec.ell;
    rep.window = opts.window;
    rep.resonant = out.growth.resonant;
    rep.profileAmplitude =
        out.growth.representativeNorm / std::pow(out.dec.rate, out.dec.ell - 1);
    rep.verdict = out.growth.profileExists
                      ? (system.p >= 1.0 ? Verdict::ExplicitProfile : Verdict::AbstractProfile)
                      : Verdict::WindowOnly;

    // spectral constants
    double qMin = kInf, maxAbs = 0.0;
    for (const auto& b : out.eig.blocks) {
        qMin = std::min(qMin, b.lambda.real());
        maxAbs = std::max(maxAbs, std::abs(b.lambda));
    }
    const double clusterTol = 1e-8 * (1.0 + maxAbs);
    rep.consts.qStar = qMin / 2.0;
    rep.consts.C0 = initial_growth_constant(out.eig.dim, qMin, rep.consts.qStar);
    rep.consts.gap = kInf;
    for (const auto& b : out.eig.blocks)
        if (b.lambda.real() > out.dec.rate + clusterTol)
            rep.consts.gap = std::min(rep.consts.gap, b.lambda.real() - out.dec.rate);

    // K(x) = max_j |c_j(x) v_j| over the unit-normalized generalized basis
    const MatrixXcd V = out.eig.basis();
    const VectorXcd c = V.fullPivLu().solve(system.x.cast<Complex>());
    for (int j = 0; j < c.size(); ++j)
        rep.consts.K = std::max(rep.consts.K, std::abs(c(j)) * V.col(j).norm());

    // stationary first moment: Monte Carlo plus the analytic triplet bound.
    // Exact-path drivers afford the full budget; the Euler drivers are capped
    // (every sample integrates to the 30 / q_min horizon).
    const bool exactPath = std::holds_alternative<Brownian>(system.noise.value) ||
                           std::holds_alternative<Deterministic>(system.noise.value);
    const int momentN = exactPath ? opts.momentSamples : std::min(opts.momentSamples, 2000);
    if (validate_moment(system.noise, 1.0) && momentN > 0) {
        SimOptions so = opts.sim;
        so.seed = derive_seed(opts.sim.seed, 0x5157);
        const EmpiricalMeasure st =
            stationary_sample(system.Q, system.noise, momentN, so, 1.0);
        double mean = 0.0, sq = 0.0;
        for (Eigen::Index i = 0; i < st.size(); ++i) {
            const double v = st.samples.row(i).norm();
            mean += v;
            sq += v * v;
        }
        mean /= static_cast<double>(st.size());
        rep.consts.Emom = mean;
        rep.consts.EmomSE = std::sqrt(
            std::max(sq / st.size() - mean * mean, 0.0) / static_cast<double>(st.size()));
    } else {
        rep.consts.Emom = std::nan("");
    }
    rep.consts.EmomBound =
        stationary_moment_bound(system.noise, rep.consts.C0, rep.consts.qStar);

    const double T = opts.horizonT > 0.0 ? opts.horizonT : 60.0 / rep.rate;
    rep.epsInterval = std::isnan(rep.consts.Emom)
                          ? EpsilonInterval{}
                          : epsilon_window(rep, T, opts.eta);
    out.report = rep;

    if (std::holds_alternative<Brownian>(system.noise.value)) {
        const MatrixXd SigmaInf =
            lyapunov_solve(system.Q, std::get<Brownian>(system.noise.value).covariance);
        try {
            out.weighted = weighted_normal_growth(out.dec, SigmaInf, opts.tol);
            out.weightedAmplitude =
                out.weighted.representativeNorm / std::pow(out.dec.rate, out.dec.ell - 1);
            out.hasWeighted = true;
        } catch (const Error&) {
            // degenerate stationary covariance: no weighted verdict
        }
    }
    return out;
}

namespace {

double renormalized_distance(const SystemSpec& system, double t, double eps, int n,
                             double pPrime, const SimOptions& opts, std::uint64_t salt,
                             double* ouDistance) {
    SimOptions oX = opts;
    oX.seed = derive_seed(opts.seed, salt);
    const EmpiricalMeasure X =
        simulate_marginal(system.Q, system.x, eps, system.noise, t, n, oX, pPrime);

    SimOptions oMu = opts;
    oMu.seed = derive_seed(opts.seed, salt + 1);
    EmpiricalMeasure mu = stationary_sample(system.Q, system.noise, n, oMu, pPrime);
    mu.samples *= eps;

    if (ouDistance != nullptr) {
        SimOptions oT = opts;
        oT.seed = derive_seed(opts.seed, salt + 2);
        const EmpiricalMeasure ot = simulate_marginal(system.Q, VectorXd::Zero(system.Q.rows()),
                                                      1.0, system.noise, t, n, oT, pPrime);
        SimOptions oS = opts;
        oS.seed = derive_seed(opts.seed, salt + 3);
        const EmpiricalMeasure oInf = stationary_sample(system.Q, system.noise, n, oS, pPrime);
        *ouDistance = empirical_wasserstein(ot, oInf, pPrime);
    }
    const double renorm = std::pow(eps, std::min(1.0, pPrime));
    return empirical_wasserstein(X, mu, pPrime) / renorm;
}

}  // namespace

std::vector<CurveRow> profile_curve(const SystemSpec& system, const Analysis& analysis,
                                    const std::vector<double>& epsGrid,
                                    const std::vector<double>& rGrid, int n, double pPrime,
                                    const SimOptions& opts) {
    std::vector<CurveRow> rows;
    std::uint64_t salt = 1;
    const bool explicitProfile = analysis.report.verdict == Verdict::ExplicitProfile;
    const double momP =
        pPrime < 1.0 ? empirical_moment(stationary_sample(system.Q, system.noise,
                                                          std::min(n, 4096), opts, pPrime),
                                        pPrime)
                     : 0.0;
    for (double eps : epsGrid) {
        const double te = cutoff_time(analysis.report.rate, analysis.report.ell, eps);
        for (double r : rGrid) {
            const double t = te + r * analysis.report.window;
            if (t <= 0.0) continue;
            CurveRow row;
            row.epsilon = eps;
            row.r = r;
            double ouDist = 0.0;
            row.empirical = renormalized_distance(system, t, eps, n, pPrime, opts, salt, &ouDist);
            salt += 4;
            const Sandwich s = sandwich_bounds(system.Q, system.x, t, eps, ouDist, pPrime, momP);
            row.lo = s.lo;
            row.hi = s.hi;
            row.predicted = explicitProfile ? profile_value(analysis.report, r) : std::nan("");
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<CurveRow> dichotomy_curve(const SystemSpec& system, const Analysis& analysis,
                                      const std::vector<double>& epsGrid,
                                      const std::vector<double>& deltaGrid, int n, double pPrime,
                                      const SimOptions& opts) {
    std::vector<CurveRow> rows;
    std::uint64_t salt = 0x44;
    for (double eps : epsGrid) {
        const double te = cutoff_time(analysis.report.rate, analysis.report.ell, eps);
        for (double delta : deltaGrid) {
            CurveRow row;
            row.epsilon = eps;
            row.r = delta;
            row.empirical =
                renormalized_distance(system, delta * te, eps, n, pPrime, opts, salt, nullptr);
            salt += 4;
            row.predicted = std::nan("");
            row.lo = row.hi = std::nan("");
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace cutofflab
