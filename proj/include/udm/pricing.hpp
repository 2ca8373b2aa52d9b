#pragma once

#include "udm/cdf.hpp"

#include <string>
#include <vector>

namespace udm {

struct BundlePriceResult {
    int n = 0;
    double c = 0.0;          // shift parameter when the input is U[c,c+1]; NaN otherwise
    double price = 0.0;
    double revenue = 0.0;    // price * (1 - G(price)^n)
    double residual = 0.0;   // |stationarity value| at the solution
    int iterations = 0;
    std::string method;      // "bisection-h" or "golden-newton"
};

struct ThresholdResult {
    int n = 0;
    double c_star = 0.0;
    double residual = 0.0;   // |T_n(c_star)| relative to |T_n(0)|
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
};

enum class OptimalityRule { threshold_compare, polynomial_sign };

struct OptimalityVerdict {
    int n = 0;
    double c = 0.0;
    bool uniform_pricing_optimal = false;
    double margin = 0.0;     // value of the defining inequality under `rule`
    OptimalityRule rule = OptimalityRule::threshold_compare;
};

// 1 - (p-c)^n - n p (p-c)^{n-1}: the price stationarity function for U[c,c+1].
double h_eval(double c, double p, int n);

/** Revenue-optimal single price for n i.i.d. copies of `dist` sold to a buyer
 *  who takes the best item: maximizes q (1 - G(q)^n). U[c,c+1] inputs go
 *  through a guaranteed-bracket bisection on h; everything else through
 *  golden-section with a Newton polish on the stationarity condition. */
BundlePriceResult bundle_price(const Cdf& dist, int n, double tol = 1e-12);

// Implicit-function derivative of the optimal price: 1 - (p-c)/(2(p-c)+(n-1)p).
double p_prime(double c, double p, int n);

/** Unique root of T_n(c) = (n+1)^n - (n-c)^n - n^2 (c+1)(n-c)^{n-1} in (0, n),
 *  evaluated in log space so large n stays finite. Cross-checked against the
 *  equivalent fixed-point form (n+1)(c*+1-p(c*)) = c*+1. */
ThresholdResult threshold_c_star(int n, double tol = 1e-12);

// Both decision rules evaluated and cross-asserted.
OptimalityVerdict uniform_pricing_optimal(double c, int n);

// c* for n = 2..n_max with the strict-increase and ln(n)/3 bound assertions.
std::vector<ThresholdResult> threshold_table(int n_max);

// p (1 - (p-c)^n), the closed-form U[c,c+1] revenue at price p.
double uniform_revenue(double c, double p, int n);

// Same revenue via quadrature of p * P(max >= p) = p * int_p^hi n G^{n-1} g.
double uniform_revenue_quadrature(const Cdf& dist, double p, int n, int order = 64);

} // namespace udm
