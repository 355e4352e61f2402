#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cutofflab/types.hpp"

namespace cutofflab {

struct CheckResult {
    std::string name;
    bool pass = false;
    double expected = 0.0;
    double actual = 0.0;
    double tolerance = 0.0;
};

bool all_pass(const std::vector<CheckResult>& checks);

/// Worked-example chain (n = 5): printed eigenvalues, rate, leading argument,
/// the c_1(e1) v_1 products and the spectral gap.
std::vector<CheckResult> verify_jacobi_chain();

/// Damping trichotomy over random (gamma, kappa, z) draws: profile for
/// nonnegative discriminant, window-only below, with the 2x2 check agreeing.
std::vector<CheckResult> verify_oscillator(int count = 500, std::uint64_t seed = 2024);

/// Relative-entropy slopes 2(delta - 1) for Q = I, sigma = I.
std::vector<CheckResult> verify_entropy_dichotomy();

}  // namespace cutofflab
