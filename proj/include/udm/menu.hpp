#pragma once

#include "udm/cdf.hpp"
#include "udm/grid.hpp"
#include "udm/lp.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace udm {

struct MenuOption {
    Eigen::VectorXd q;  // allocation probabilities, q >= 0, sum <= 1
    double price = 0.0;
};

/**
 * A posted menu. The buyer picks the utility-maximizing option or the
 * implicit null option (zero allocation, zero price); ties go to the higher
 * price. Options are stored literally; solve_menu returns menus already
 * expanded over coordinate permutations of its symmetric representatives.
 */
struct MenuMechanism {
    int n = 0;
    std::vector<MenuOption> options;
};

struct MenuTrainConfig {
    int steps = 3000;
    int batch = 1 << 14;
    double lr0 = 0.05;
    double kappa0 = 10.0;
    double kappa1 = 1000.0;
    int restarts = 3;
    std::uint64_t seed = 1000;
    int eval_resolution = 0;    // 0: 801 for n=2, 101 for n>=3
    int polish_resolution = 0;  // 0: 301 for n=2, 61 for n>=3
    int polish_rounds = 2;
    int scan_points = 48;
    bool verbose = false;
};

struct MechanismEval {
    double revenue = 0.0;
    std::vector<std::int32_t> allocation_map;  // chosen option per type, -1 = null
};

/**
 * First-order menu optimizer. menu_size counts symmetric option
 * representatives; each trains as one (q, price) pair whose utility is the
 * best over all coordinate permutations of q, and the returned menu contains
 * the expanded, deduplicated option list. Softmax-smoothed revenue is ascended
 * with fresh Monte Carlo batches per step and an upward temperature schedule;
 * the best restart under exact grid evaluation wins. Deterministic given
 * cfg.seed.
 */
MenuMechanism solve_menu(const std::vector<std::shared_ptr<const Cdf>>& dists,
                         int menu_size, const MenuTrainConfig& cfg = {});

/** Exact best-response evaluation of a menu on a grid. */
MechanismEval evaluate_mechanism(const MenuMechanism& menu, const GridProblem& grid);

/** Reads an LP solution as a menu: one option per grid type. */
MenuMechanism menu_from_lp(const LpSolution& sol);

struct Heatmap {
    int item = 0;
    int axis_row = 0;                 // free axis indexing rows of values
    int axis_col = 0;                 // free axis indexing columns
    std::vector<double> row_values;   // grid centers along axis_row
    std::vector<double> col_values;   // grid centers along axis_col
    std::map<int, double> slice;      // fixed axes, snapped to grid centers
    Eigen::MatrixXd values;           // allocation probability of `item`
};

/**
 * 2-D allocation slice. `slice` must fix exactly n-2 axes (empty for n=2);
 * fixed coordinates snap to the nearest grid cell center.
 */
Heatmap allocation_heatmap(const LpSolution& sol, const GridProblem& grid,
                           int item, const std::map<int, double>& slice = {});
Heatmap allocation_heatmap(const MenuMechanism& menu, const GridProblem& grid,
                           int item, const std::map<int, double>& slice = {});

} // namespace udm
