#pragma once

#include "udm/grid.hpp"

#include <Eigen/Dense>
#include <string>

namespace udm {

/**
 * Options for the exact LP oracle.
 *
 * max_types 0 selects the dimension default (1600 for n <= 2, 1728 for
 * n >= 3); pass a larger cap explicitly for bigger grids. sep_tol is the
 * incentive-constraint separation threshold and matches the feasibility
 * guarantee of the returned solution.
 */
struct LpOptions {
    double tol = 1e-9;
    double sep_tol = 1e-8;
    int max_ipm_iters = 200;
    int max_rounds = 80;
    int max_types = 0;
    bool verbose = false;
};

struct LpSolution {
    Eigen::MatrixXd alloc;  // T x n, row t = allocation probabilities a(t)
    Eigen::VectorXd pay;    // T
    Eigen::VectorXd u;      // T, u(t) = t . a(t) - pay(t)
    double objective = 0.0;
    std::string status;     // "optimal" | "unconverged"
    int ic_rounds = 0;
    double max_ic_violation = 0.0;
    double max_ir_violation = 0.0;
};

LpSolution solve_lp_exact(const GridProblem& grid, double tol);
LpSolution solve_lp_exact(const GridProblem& grid, const LpOptions& opt);

} // namespace udm
