#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "cutofflab/rng.hpp"
#include "cutofflab/types.hpp"

namespace cutofflab {

struct Brownian {
    MatrixXd covariance;  // increment over dt is N(0, dt * covariance)
};

struct JumpAtoms {
    VectorXd weights;  // nonnegative, summing to 1
    MatrixXd points;   // one atom per row
};

struct JumpGaussian {
    VectorXd mean;
    MatrixXd covariance;
};

using JumpLaw = std::variant<JumpAtoms, JumpGaussian>;

struct CompoundPoisson {
    double intensity;  // jumps per unit time
    JumpLaw law;
};

struct AlphaStable {
    double alpha;  // in (0,2)
    double scale;
    int dim;  // independent symmetric stable per coordinate
};

struct Deterministic {
    VectorXd drift;
};

struct NoiseSpecT;

/// Stationary Ornstein-Uhlenbeck driver dU = -Lambda U dt + dL_inner.
struct RedNoise {
    MatrixXd Lambda;
    std::shared_ptr<NoiseSpecT> inner;
};

using NoiseVariant = std::variant<Brownian, CompoundPoisson, AlphaStable, Deterministic, RedNoise>;

struct NoiseSpecT {
    NoiseVariant value;
};

using NoiseSpec = NoiseSpecT;

NoiseSpec make_noise(NoiseVariant v);

int noise_dim(const NoiseSpec& spec);

/// Largest finite moment order; +infinity except for alpha-stable (p < alpha).
double p_max(const NoiseSpec& spec);

/// Hypothesis check: the driver has finite p-th moments.
bool validate_moment(const NoiseSpec& spec, double p);

/// One-shot increment draw, as specified per family.
VectorXd sample_increment(const NoiseSpec& spec, double dt, Rng& rng);

/// Stateful sampler; white-noise families are stateless, red noise keeps the
/// inner OU state and must call begin_path per independent trajectory
/// (stationary start by burn-in over 20 / min Re lambda(Lambda)).
class IncrementSampler {
  public:
    explicit IncrementSampler(const NoiseSpec& spec);

    void begin_path(Rng& rng);
    VectorXd increment(double dt, Rng& rng);
    const VectorXd& red_noise_state() const { return state_; }

  private:
    NoiseSpec spec_;      // owned copy; samplers outlive caller temporaries
    MatrixXd chol_;       // Brownian / Gaussian-jump factor
    double burnHorizon_ = 0.0;
    double burnStep_ = 0.0;
    VectorXd state_;      // red-noise U
    std::unique_ptr<IncrementSampler> inner_;
};

/// Paper-style analytic bound on E|O_inf| in terms of the noise triplet and
/// the drift constants C0, q_*. NaN when no finite first moment exists.
double stationary_moment_bound(const NoiseSpec& spec, double C0, double qStar);

}  // namespace cutofflab
