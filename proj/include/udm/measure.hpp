#pragma once

#include "udm/quadrature.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace udm {

/**
 * Signed measure rewriting expected revenue as an integral of the buyer
 * utility over X = [c, c+1]^n. Components: a +1 point mass at (c,...,c), a
 * uniform volume density of -(n+1) on X, +(c+1) surface density on each top
 * face {x_i = c+1}, and -c surface density on each bottom face {x_i = c}.
 * The positive part is the point mass plus the top faces; the negative part
 * is the volume plus the bottom faces.
 */
struct TransformedMeasure {
    int n = 0;
    double c = 0.0;

    double total_mass() const;     // 1 - (n+1) + n(c+1) - nc, identically 0
    double positive_mass() const;  // 1 + n(c+1)
    double negative_mass() const;  // (n+1) + nc
};

TransformedMeasure make_transformed_measure(int n, double c);

using PointFn = std::function<double(const std::vector<double>&)>;

/**
 * Integral of u against the measure: the point-mass term plus face and
 * volume integrals by Gauss-Legendre of the configured order. Volume and
 * face integrals use the sorted-sector decomposition when spec.sorted_sectors
 * is set, which keeps max-type kinks panel-smooth. Throws numerical_error on
 * non-finite evaluations.
 */
double integrate_against_mu(const PointFn& u, const TransformedMeasure& tm,
                            const QuadratureSpec& spec);

/**
 * Regions of X carved out by a price p in (c, c+1): W = {max in (p, c+1]},
 * Z = {max in [c, p]}, the top boundary B = {max = c+1}, the inner boundary
 * B_Z = {max = p}, the faces B_i = {x_i = c+1 = max} (argmax ties owned by
 * the lowest index), and the sorted sector D_n = {x_1 = c+1 >= x_2 >= ... >=
 * x_n}. Predicates compare exactly; pass exactly-constructed coordinates.
 */
struct RegionGeometry {
    int n = 0;
    double c = 0.0;
    double p = 0.0;

    bool in_X(const std::vector<double>& x) const;
    bool in_W(const std::vector<double>& x) const;
    bool in_Z(const std::vector<double>& x) const;
    bool in_B(const std::vector<double>& x) const;
    bool in_B_Z(const std::vector<double>& x) const;
    bool in_B_i(const std::vector<double>& x, int i) const;
    bool in_D_n(const std::vector<double>& x) const;
};

RegionGeometry make_region_geometry(int n, double c, double p);

/**
 * Density of the pushed measure gamma_1 on the face B_1, evaluated at a point
 * x with x_1 = c+1: (n+1)(c+1-p) once min(x_2..x_n) >= 2c+1-p, otherwise
 * (n+1)(min-c)+c. Throws domain_error when x is not on B_1 (checked to 1e-9).
 */
double pushed_density_eval(const std::vector<double>& x, const RegionGeometry& geom);

/**
 * Permutation-symmetric upper set of the top boundary B, stored as a
 * staircase over the sorted non-max coordinates (descending). For ambient
 * n = 2 a single threshold tau[0] on the off-face coordinate; for n = 3,
 * tau[i] is the third-coordinate threshold over the i-th slab of the second
 * coordinate, non-increasing in i. contains() expects a point of B.
 */
struct UpperSetStaircase {
    int n = 0;
    double lo = 0.0;   // c
    double hi = 0.0;   // c+1
    std::vector<double> tau;
    bool empty_set = false;

    bool contains(const std::vector<double>& x) const;
};

UpperSetStaircase full_boundary_set(int n, double c);
UpperSetStaircase empty_boundary_set(int n, double c);

/** Random staircase with `resolution` slabs; thresholds are sorted uniforms. */
UpperSetStaircase random_staircase(int n, double c, int resolution,
                                   std::uint64_t seed);

/**
 * Whether the diagonal push of y reaches U: true iff y + t*1 lies in U for
 * t = c+1 - max(y), the unique shift landing on the top boundary. Intended
 * for y with max(y) in [p, c+1].
 */
bool push_set_membership(const std::vector<double>& y, const UpperSetStaircase& U,
                         const RegionGeometry& geom);

} // namespace udm
