#pragma once

#include <string>
#include <vector>

#include "cutofflab/sde.hpp"
#include "cutofflab/types.hpp"

namespace cutofflab {

enum class OscillatorRegime { Over, Critical, Sub };

struct OscillatorScenario {
    SystemSpec system;
    OscillatorRegime regime;
    double discriminant;  // gamma^2 - 4 kappa
};

/// Q = [[0,-1],[kappa,gamma]], Brownian noise on the velocity coordinate.
OscillatorScenario build_oscillator(double gamma, double kappa);

/// Symmetric Q = basis diag(eigs) basis^T with isotropic Brownian noise.
SystemSpec build_gradient(const std::vector<double>& eigs, const MatrixXd& basis);
SystemSpec build_gradient(const std::vector<double>& eigs);

/// 2n x 2n chain of oscillators coupled to baths at both ends; noise on the
/// first and n-th momentum coordinates.
SystemSpec build_jacobi_chain(int n, double gamma, double kappa, double sigma1, double sigman);

struct RotationParams {
    double lambda = 1.0;
    double theta = 3.0;
};
struct SuspensionParams {
    double lambda = 1.0;
    double gamma = 1.0;
    double kappa = 1.0;  // subcritical block: gamma^2 < 4 kappa
};
struct JordanBlockParams {
    int d = 3;
    double lambda = 1.0;
};

SystemSpec build_rotation51(const RotationParams& p);
SystemSpec build_suspension52(const SuspensionParams& p);
SystemSpec build_jordan_block53(const JordanBlockParams& p);

/// Pinned desk-scale numbers for the n = 5 chain of the worked example.
struct JacobiQuantities {
    std::vector<Complex> eigenvalues;  // ascending real part, positive imag first
    double rate;                       // Re lambda_1
    double leadingArg;                 // arg lambda_1 (the printed theta)
    double gap;                        // Re lambda_6 - rate
    VectorXcd v1;                      // unit, third component real positive
    VectorXcd coefficients;            // expansion of e_1 in the eigenbasis
    VectorXd wHat, wCheck;             // c_1(e1) v1 = wHat + i wCheck
    double wHatNorm, wCheckNorm, wInner;
};

JacobiQuantities jacobi_quantities(int n = 5, double gamma = 0.01, double kappa = 1.0,
                                   double sigma1 = 1.0, double sigman = 1.0);

/// Builds a named scenario from key/value parameters (CLI entry point).
SystemSpec build_scenario(const std::string& name,
                          const std::vector<std::pair<std::string, double>>& params);

}  // namespace cutofflab
