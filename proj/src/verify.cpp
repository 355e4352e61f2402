#include "cutofflab/verify.hpp"

#include <cmath>

#include "cutofflab/cutoff.hpp"
#include "cutofflab/entropy.hpp"
#include "cutofflab/rng.hpp"
#include "cutofflab/scenarios.hpp"
#include "cutofflab/spectral.hpp"

namespace cutofflab {

bool all_pass(const std::vector<CheckResult>& checks) {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

namespace {

CheckResult check(const std::string& name, double expected, double actual, double tol) {
    return {name, std::abs(expected - actual) <= tol, expected, actual, tol};
}

}  // namespace

std::vector<CheckResult> verify_jacobi_chain() {
    // printed spectrum of the n = 5, gamma = 0.01 chain
    const std::vector<Complex> printed = {
        {0.0263377, 1.88656},  {0.0263377, -1.88656}, {0.0264706, 0.0},
        {0.104782, 1.55549},   {0.104782, -1.55549},  {0.234099, 1.06262},
        {0.234099, -1.06262},  {0.395218, 0.517319},  {0.395218, -0.517319},
        {0.452655, 0.0},
    };
    const JacobiQuantities jq = jacobi_quantities();

    std::vector<CheckResult> out;
    double worst = 0.0;
    for (size_t i = 0; i < printed.size(); ++i) {
        double best = 1e300;
        for (const auto& l : jq.eigenvalues) best = std::min(best, std::abs(l - printed[i]));
        worst = std::max(worst, best);
    }
    out.push_back(check("eigenvalues (worst match vs printed table)", 0.0, worst, 1e-4));
    out.push_back(check("rate q = Re lambda_1", 0.0263377, jq.rate, 1e-4));
    out.push_back(check("theta = arg lambda_1", 1.55684, jq.leadingArg, 1e-4));
    out.push_back(check("|w_hat| of c_1(e1) v_1", 0.181073, jq.wHatNorm, 1e-4));
    out.push_back(check("|w_check| of c_1(e1) v_1", 0.140425, jq.wCheckNorm, 1e-4));
    out.push_back(check("<w_hat, w_check>", -0.0130705, jq.wInner, 1e-4));
    out.push_back(check("gap exponent Re lambda_6 - q", 0.0001329, jq.gap, 1e-6));
    return out;
}

std::vector<CheckResult> verify_oscillator(int count, std::uint64_t seed) {
    Rng rng(seed);
    int overOk = 0, critOk = 0, subOk = 0, subLemmaOk = 0;
    int overN = 0, critN = 0, subN = 0;
    for (int it = 0; it < count; ++it) {
        const double gamma = rng.uniform(0.2, 3.0);
        double kappa;
        const int bucket = it % 3;
        if (bucket == 0) {
            kappa = rng.uniform(0.05, 1.0) * gamma * gamma / 4.0;  // overdamped
        } else if (bucket == 1) {
            kappa = gamma * gamma / 4.0;  // critically damped
        } else {
            kappa = rng.uniform(1.1, 4.0) * gamma * gamma / 4.0;  // subcritical
        }
        VectorXd z(2);
        do {
            z << rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);
        } while (z.norm() < 1e-3);

        const OscillatorScenario sc = build_oscillator(gamma, kappa);
        const SpectralDecomposition dec = decompose(sc.system.Q, z);
        const bool profile = normal_growth(dec).profileExists;

        if (sc.regime == OscillatorRegime::Over) {
            ++overN;
            if (profile) ++overOk;
        } else if (sc.regime == OscillatorRegime::Critical) {
            ++critN;
            if (profile) ++critOk;
        } else {
            ++subN;
            if (!profile) ++subOk;
            const NormalGrowthVerdict lemma = oscillator_2x2_check(sc.system.Q, z);
            if (!lemma.profileExists && lemma.profileExists == profile) ++subLemmaOk;
        }
    }
    std::vector<CheckResult> out;
    out.push_back({"overdamped: profile for all draws", overOk == overN,
                   static_cast<double>(overN), static_cast<double>(overOk), 0.0});
    out.push_back({"critical: profile for all draws", critOk == critN,
                   static_cast<double>(critN), static_cast<double>(critOk), 0.0});
    out.push_back({"subcritical: window-only for all draws", subOk == subN,
                   static_cast<double>(subN), static_cast<double>(subOk), 0.0});
    out.push_back({"subcritical: 2x2 quantities violate the profile conditions",
                   subLemmaOk == subN, static_cast<double>(subN),
                   static_cast<double>(subLemmaOk), 0.0});
    return out;
}

std::vector<CheckResult> verify_entropy_dichotomy() {
    const MatrixXd Q = MatrixXd::Identity(1, 1);
    const MatrixXd sigma = MatrixXd::Identity(1, 1);
    const VectorXd x = VectorXd::Ones(1);
    const std::vector<double> eps = {1e-2, 1e-3, 1e-4, 1e-5};
    std::vector<CheckResult> out;
    for (double delta : {0.5, 2.0}) {
        const double slope = entropy_dichotomy(Q, sigma, x, delta, eps);
        out.push_back(check("entropy slope at delta = " + std::to_string(delta),
                            2.0 * (delta - 1.0), slope, 0.05));
    }
    return out;
}

}  // namespace cutofflab
