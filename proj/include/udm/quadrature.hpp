#pragma once

#include <functional>
#include <vector>

namespace udm {

struct GaussLegendre {
    std::vector<double> nodes;   // on [-1, 1], ascending
    std::vector<double> weights;
};

// Nodes/weights for the given order, computed once and cached (thread-safe).
const GaussLegendre& gauss_legendre(int order);

struct QuadratureSpec {
    int order = 32;              // Gauss-Legendre points per panel
    std::vector<double> breaks;  // axis positions where panels must split
    int subdiv = 1;              // extra uniform subdivisions of each panel
    bool sorted_sectors = true;  // cube integrals: decompose into sorted sectors
};

double integrate_1d(const std::function<double(double)>& f, double lo, double hi,
                    const QuadratureSpec& spec);

/** Plain tensor-product rule over [lo,hi]^dim with the spec's panel structure on
 *  every axis. Kinks that are not axis-aligned (e.g. along x_i = x_j) degrade
 *  accuracy to low order; use integrate_box_sorted for max/min-type integrands. */
double integrate_box(const std::function<double(const double*)>& f, int dim,
                     double lo, double hi, const QuadratureSpec& spec);

/** Integral over [lo,hi]^dim via the sorted-sector (Duffy-style) decomposition:
 *  the cube splits into dim! sectors on which the coordinate order is fixed, so
 *  integrands with kinks on {max(x) = b} or the diagonals become panel-smooth.
 *  spec.breaks split the leading (max-carrying) coordinate. */
double integrate_box_sorted(const std::function<double(const double*)>& f, int dim,
                            double lo, double hi, const QuadratureSpec& spec);

} // namespace udm
