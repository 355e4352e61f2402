#pragma once

#include <string>
#include <vector>

#include "cutofflab/sde.hpp"
#include "cutofflab/spectral.hpp"
#include "cutofflab/types.hpp"

namespace cutofflab {

enum class Verdict { ExplicitProfile, AbstractProfile, WindowOnly };

std::string to_string(Verdict v);

struct ErrorConstants {
    double C0 = 1.0;      // |e^{-Qt}| <= C0 e^{-q* t}
    double qStar = 0.0;   // q_min / 2
    double gap = 0.0;     // smallest Re lambda above the rate seen by x (inf if none)
    double K = 0.0;       // max_j |c_j(x) v_j| over the generalized basis
    double Emom = 0.0;    // E|O_inf| (Monte Carlo estimate)
    double EmomSE = 0.0;
    double EmomBound = 0.0;  // analytic triplet bound (NaN when unavailable)
};

struct EpsilonInterval {
    double lo = 0.0;
    double hi = 0.0;
    bool empty = true;
};

struct CutoffReport {
    Verdict verdict = Verdict::WindowOnly;
    double rate = 0.0;
    int ell = 1;
    double profileAmplitude = 0.0;  // |v| / rate^{ell-1}
    double window = 1.0;
    ErrorConstants consts;
    EpsilonInterval epsInterval;
    bool resonant = false;
};

/// t_eps = |ln eps| / q + (ell-1) ln|ln eps| / q. Requires eps in (0,1);
/// for ell > 1 additionally eps < 1/e.
double cutoff_time(double rate, int ell, double eps);

/// Explicit profile P(r) = e^{-r q w} |v| / q^{ell-1}.
double profile_value(const CutoffReport& report, double r);

struct Sandwich {
    double lo = 0.0;
    double hi = 0.0;
    double center = 0.0;  // |e^{-Qt}x| / eps (p >= 1) or its p-th power bracket center
};

/// Two-sided bound on the renormalized distance at time t. For p >= 1 the
/// bracket is |e^{-Qt}x|/eps -+ W(O_t, O_inf); for p in (0,1) the shifted-law
/// term is replaced by the moment bracket and the distance is normalized by
/// eps^p.
Sandwich sandwich_bounds(const MatrixXd& Q, const VectorXd& x, double t, double eps,
                         double wassersteinOfOU, double p = 2.0, double stationaryMomentP = 0.0);

enum class Dichotomy { Diverges, Vanishes };

/// delta < 1 diverges, delta > 1 vanishes; delta = 1 is excluded.
Dichotomy dichotomy_prediction(double rate, int ell, double delta);

/// C0 E|O_inf| eps + K(x) eps^{gap/rate}.
double error_bound(const CutoffReport& report, double eps);

/// eq-style observability interval on [0, T] at error level eta, intersected
/// with the domain of the time scale; the lower endpoint solves 2 t_eps = T
/// exactly (which is e^{-q T / 2} when ell = 1).
EpsilonInterval epsilon_window(const CutoffReport& report, double T, double eta);

/// Large-r asymptote of the renormalized p'-moment (Cor-3.6-style): the
/// stationary moment E|O_inf|^{p'}.
double moment_cutoff_prediction(double pPrime, double stationaryMoment, double r);

struct AnalysisOptions {
    double window = 1.0;
    double horizonT = 0.0;  // 0: default 60 / rate
    double eta = 0.1;
    double tol = 1e-8;
    int momentSamples = 100000;  // Euler drivers are capped at 2000
    SimOptions sim;
};

struct Analysis {
    EigenStructure eig;
    SpectralDecomposition dec;
    NormalGrowthVerdict growth;
    CutoffReport report;
    // Brownian noise only: verdict under the stationary-covariance weight and
    // the matching entropy-profile amplitude
    bool hasWeighted = false;
    NormalGrowthVerdict weighted;
    double weightedAmplitude = 0.0;
};

/// Full pipeline: eigenstructure, Lemma-2.1 data, normal-growth verdict and
/// the quantitative report with error constants and the eps-interval.
Analysis analyze_system(const SystemSpec& system, const AnalysisOptions& opts = {});

struct CurveRow {
    double epsilon;
    double r;  // window offset, or delta for the dichotomy sweep
    double empirical;
    double predicted;  // NaN when no explicit profile
    double lo, hi;     // sandwich
};

/// Empirical renormalized distance along t_eps + r w versus the predicted
/// profile and the sandwich bounds.
std::vector<CurveRow> profile_curve(const SystemSpec& system, const Analysis& analysis,
                                    const std::vector<double>& epsGrid,
                                    const std::vector<double>& rGrid, int n, double pPrime,
                                    const SimOptions& opts);

/// Empirical renormalized distance at t = delta * t_eps.
std::vector<CurveRow> dichotomy_curve(const SystemSpec& system, const Analysis& analysis,
                                      const std::vector<double>& epsGrid,
                                      const std::vector<double>& deltaGrid, int n, double pPrime,
                                      const SimOptions& opts);

}  // namespace cutofflab
