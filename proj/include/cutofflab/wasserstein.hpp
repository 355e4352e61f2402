#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cutofflab/types.hpp"

namespace cutofflab {

/// Minimum-cost perfect matching on a square cost matrix
/// (Jonker-Volgenant shortest augmenting path). Returns the total cost.
double assignment_cost(const MatrixXd& cost);

/// Exact 1-D W_p. For p >= 1 (convex cost) this is the quantile-function
/// formula, which also handles unequal sample counts exactly. For p in (0,1)
/// the sorted pairing is not optimal (concave cost), so the exact assignment
/// solver is used instead (equal counts, solver cap applies).
double wasserstein_1d(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double p);

/// Exact d-dimensional W_p for equal-size uniform atom sets via optimal
/// assignment on cost |u_i - v_j|^p. Capped at n = 4096.
double wasserstein_nd(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double p);

/// Routes to the 1-D formula when d = 1, otherwise to the assignment solver.
double empirical_wasserstein(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double p);

struct ShiftLinearityResult {
    double estimate;    // empirical W_p(u + U_1, U_2) on independent halves
    double predicted;   // |u| for p >= 1, |u|^p as the upper bracket otherwise
    double bracketLo;   // max(|u|^p - 2 E|U|^p, 0) when p < 1, else |u|
    double bracketHi;   // |u|^p when p < 1, else |u|
};

/// Splits U into two independent halves and estimates W_p(u + U, U).
/// With a single sample set the optimal matching reproduces |u| identically,
/// so the halves keep the check meaningful.
ShiftLinearityResult shift_linearity_check(const EmpiricalMeasure& U, const VectorXd& u,
                                           double p);

/// Empirical Lemma-2.2-g check: W_p(T(U1), T(U2)) <= W_p(U1, U2) + slack.
bool contraction_check(const EmpiricalMeasure& U1, const EmpiricalMeasure& U2,
                       const std::function<VectorXd(const VectorXd&)>& T, int outDim, double p,
                       double slack = 1e-9);

double empirical_moment(const EmpiricalMeasure& U, double pPrime);

/// Bootstrap standard error of an empirical W_p estimate (paired resampling
/// with replacement, B resamples). subsample > 0 evaluates on subsamples of
/// that size and rescales by sqrt(subsample / n).
double bootstrap_se_wasserstein(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double p,
                                int B = 200, std::uint64_t seed = 0x9e3779b9, int subsample = 0);

EmpiricalMeasure subsample(const EmpiricalMeasure& U, int m, std::uint64_t seed);

}  // namespace cutofflab
