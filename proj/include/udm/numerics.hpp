#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace udm {

struct RootResult {
    double x = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

/** Safeguarded bisection on [lo, hi]. Requires f(lo) and f(hi) of opposite
 *  sign (or zero); throws numerical_error otherwise. Stops when the bracket
 *  width falls below abs_tol or max_iter is reached. */
RootResult bisect(const std::function<double(double)>& f, double lo, double hi,
                  double abs_tol = 1e-12, int max_iter = 200);

/** Golden-section maximization of f on [lo, hi]. Assumes unimodality; returns
 *  the abscissa of the bracketed maximum after `iters` contractions. */
double golden_max(const std::function<double(double)>& f, double lo, double hi,
                  int iters = 120);

// Central difference d/dx f at x with step h.
double central_diff(const std::function<double(double)>& f, double x, double h);

/** Euclidean projection of q onto {q >= 0, sum q <= 1} (in place). */
void project_subsimplex(std::vector<double>& q);

/** Deterministic uniform-double stream. Wraps a 64-bit mix generator and maps
 *  raw bits to [0,1) as (x >> 11) * 2^-53 so results do not depend on any
 *  library's distribution implementation. */
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed);
    double next_double();                   // U[0,1)
    double next_double(double lo, double hi);
    std::uint64_t next_u64();
private:
    std::uint64_t s_[4];
};

/** E[(S - a)+] where S is the sum of d independent U[0,1] variables
 *  (Irwin-Hall hinge moment), exact piecewise-polynomial evaluation. */
double irwin_hall_hinge(int d, double a);

// Number of hardware threads to use: UDM_THREADS override, else logical cores.
int thread_count();

/** Runs fn(i) for i in [0, count) across thread_count() workers. Each index is
 *  processed exactly once; writers must target disjoint slots so the result is
 *  independent of scheduling. */
void parallel_for(int count, const std::function<void(int)>& fn);

} // namespace udm
