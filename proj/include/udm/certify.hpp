#pragma once

#include "udm/measure.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace udm {

struct CertificateCheck {
    std::string name;
    double value = 0.0;
    bool pass = false;
};

enum class Verdict { optimal, not_optimal, inconclusive };
const char* verdict_name(Verdict v);

struct CertificateReport {
    int n = 0;
    double c = 0.0;
    double p = 0.0;  // optimal uniform price used by the certificate
    std::vector<CertificateCheck> checks;
    Verdict verdict = Verdict::inconclusive;
};

/**
 * Closed-form dominance margin (n+1)(c+1-p) - (c+1) at the optimal uniform
 * price; verdict optimal iff the margin is nonnegative (boundary included).
 * Cross-checks that the margin vanishes at the threshold shift within 1e-8.
 */
CertificateReport convex_dominance_closed_form(int n, double c);

/**
 * Samples staircase upper sets of the sorted top-boundary sector and
 * integrates the density difference (pushed density minus c+1) over each,
 * exactly. Verdict optimal when every sampled integral, including the corner
 * seed {min >= 2c+1-p}, stays above -1e-9. Supports n in {2, 3}.
 */
CertificateReport upper_set_dominance_test(int n, double c, int samples,
                                           std::uint64_t seed);

/** Exact integral of (pushed density - (c+1)) over U within the sorted
 *  sector; the building block of upper_set_dominance_test. */
double staircase_integral(const UpperSetStaircase& U, const RegionGeometry& geom);

struct DOrderedResult {
    bool is_d_ordered = false;
    double r = 0.0;
    double worst_inversion = 0.0;  // largest positive-before-negative pair
};

/**
 * Verifies that density_diff on the sorted sector depends only on the
 * minimum coordinate (sampled) and crosses sign at most once, negative to
 * positive; returns the threshold r, preferring the canonical c + 1/(n+1)
 * when it lies in the feasible interval.
 */
DOrderedResult d_ordered_check(
    const std::function<double(const std::vector<double>&)>& density_diff,
    int n, double c, int grid = 256);

struct CylinderReport {
    int k = 0;
    DOrderedResult input;
    DOrderedResult reduced;
    bool pass = false;  // reduction preserved the ordering property
};

/**
 * Integrates out the innermost coordinate of a sorted-sector density and
 * re-runs the ordering check one dimension down; property test of the
 * induction step, k >= 3.
 */
CylinderReport cylinder_reduction_check(
    const std::function<double(const std::vector<double>&)>& density,
    int k, double c, int grid = 128);

struct WitnessGap {
    double int_mu_plus = 0.0;
    double int_gamma1 = 0.0;
    double gap = 0.0;  // int_mu_plus - int_gamma1; positive iff c > c*_n
};

/**
 * Integrals of the hinge witness max(sum(x) - (nc+n+c-p), 0) against the
 * positive measure part (exact Irwin-Hall moments) and against the pushed
 * density on the top faces (panelled quadrature). Supports n in {2, 3}.
 */
WitnessGap necessity_witness_gap(int n, double c);

} // namespace udm
