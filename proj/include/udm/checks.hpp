#pragma once

#include "udm/cdf.hpp"

#include <array>
#include <cstdint>
#include <string>

namespace udm {

enum class ConditionName {
    scale,
    quantile_scaled,
    elasticity,
    stochastic_relative_values,
};

const char* condition_name_str(ConditionName c);

/** Outcome of one grid-based monotonicity check. `witness` holds the pair of
 *  grid points realizing worst_violation ({a0,a1} then {b0,b1}, meaning
 *  depends on the check); it is empty when the check passed. */
struct MonotonicityReport {
    ConditionName condition_name = ConditionName::scale;
    bool passed = false;
    double worst_violation = 0.0;
    std::array<double, 4> witness{};   // (a0, a1), (b0, b1)
    bool witness_present = false;
    int grid_resolution = 0;

    std::string to_json() const;
};

/** For each omega in a grid over (lo/hi, 1), scans x -> F(omega x)/F(x) over
 *  (lo/omega, hi] and records the largest increase between consecutive grid
 *  points. Ratios are evaluated in log space; F is treated as 0 below the
 *  support. Passes iff the largest increase is <= tol. */
MonotonicityReport scale_monotone_check(const Cdf& F, int omega_grid = 256,
                                        int x_grid = 256, double tol = 1e-9);

/** Dual formulation: for each q in (0,1), solves F(omega y)/F(y) = q for omega
 *  by bisection at every y in the grid and requires omega non-decreasing in y. */
MonotonicityReport quantile_scaled_check(const Cdf& F, int q_grid = 256,
                                         int y_grid = 256, double tol = 1e-9);

/** Checks t f'(t)/f(t) non-decreasing on an interior grid; f' by central
 *  differences. Throws invalid_distribution if the density is nonpositive at
 *  any grid point. */
MonotonicityReport monotone_elasticity_check(const Cdf& F, int grid = 256,
                                             double tol = 1e-9);

/** P(max over b of item values <= omega * y | overall max = y) for the
 *  power-scaled family: (A_bbar/A) * (F(omega y)/F(y))^{A_b} for omega < 1,
 *  and 1 at omega = 1. b is a bitmask; throws std::domain_error when b is
 *  empty or the full set, or y is outside the open support. */
double relative_value_conditional_cdf(const PowerScaledProduct& family,
                                      std::uint32_t b, double omega, double y);

/** For every non-trivial item subset b and a grid of q-hat in (0, A_bbar/A),
 *  solves F(omega y)/F(y) = ((A/A_bbar) q-hat)^{1/A_b} for omega at each grid
 *  y and requires omega non-decreasing in y. */
MonotonicityReport stochastic_relative_values_check(const PowerScaledProduct& family,
                                                    int q_grid = 64, int y_grid = 64,
                                                    double tol = 1e-9);

} // namespace udm
