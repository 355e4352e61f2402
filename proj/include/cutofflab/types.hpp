#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace cutofflab {

using Eigen::MatrixXd;
using Eigen::MatrixXcd;
using Eigen::VectorXd;
using Eigen::VectorXcd;
using Complex = std::complex<double>;

enum class Errc {
    NonConvergence,
    IllConditioned,
    Overflow,
    UnstableDrift,
    ZeroInitialState,
    SingularCovariance,
    RealSpectrum,
    DomainError,
    NoProfile,
    MomentGate,
    StepTooLarge,
    DimensionError,
    SizeMismatch,
    TooLarge,
    DegenerateNoise,
    ConfigError,
};

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

  private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

/// A probability law represented by n equally weighted atoms (one per row).
struct EmpiricalMeasure {
    Eigen::MatrixXd samples;  // n x d

    Eigen::Index size() const { return samples.rows(); }
    Eigen::Index dim() const { return samples.cols(); }
};

}  // namespace cutofflab
