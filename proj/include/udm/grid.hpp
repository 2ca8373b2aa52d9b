#pragma once

#include "udm/cdf.hpp"

#include <Eigen/Dense>

#include <memory>
#include <vector>

namespace udm {

/** Cell-centered discretization of an n-item independent value distribution.
 *  Axis j splits [lo_j, hi_j] into `resolution` equal cells; grid points sit at
 *  cell centers and carry the product of per-axis CDF masses. */
struct GridProblem {
    int n = 0;
    std::vector<std::vector<double>> axes;      // per item, ascending cell centers
    std::vector<std::vector<double>> axis_mass; // per item, per cell CDF difference
    Eigen::MatrixXd types;                      // T x n, row-major enumeration
    Eigen::VectorXd weights;                    // T, sums to 1

    int type_count() const { return int(types.rows()); }
    // flat index of the grid point with per-axis cell indices idx
    int flat_index(const std::vector<int>& idx) const;
};

GridProblem build_grid(const std::vector<std::shared_ptr<const Cdf>>& dists, int resolution);

// convenience: n i.i.d. copies of one distribution
GridProblem build_grid_iid(const Cdf& dist, int n, int resolution);

} // namespace udm
