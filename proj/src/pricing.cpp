#include "udm/pricing.hpp"
#include "udm/errors.hpp"
#include "udm/numerics.hpp"
#include "udm/quadrature.hpp"

#include <cassert>
#include <cmath>
#include <limits>

namespace udm {

double h_eval(double c, double p, int n) {
    assert(n >= 2);
    double d = p - c;
    return 1.0 - std::pow(d, n) - n * p * std::pow(d, n - 1);
}

static BundlePriceResult bundle_price_uniform(const UniformShiftCdf& u, int n, double tol) {
    double c = u.shift();
    // h(c,c) = 1 > 0 and h(c,c+1) = -n(c+1) < 0: guaranteed bracket
    assert(h_eval(c, c, n) > 0.0);
    assert(h_eval(c, c + 1.0, n) < 0.0);
    RootResult r = bisect([&](double p) { return h_eval(c, p, n); }, c, c + 1.0, tol, 200);
    BundlePriceResult out;
    out.n = n;
    out.c = c;
    out.price = r.x;
    out.revenue = uniform_revenue(c, r.x, n);
    out.residual = std::abs(h_eval(c, r.x, n));
    out.iterations = r.iterations;
    out.method = "bisection-h";
    return out;
}

BundlePriceResult bundle_price(const Cdf& dist, int n, double tol) {
    if (n < 2) throw std::invalid_argument("bundle_price: n >= 2");
    if (auto* u = dynamic_cast<const UniformShiftCdf*>(&dist))
        return bundle_price_uniform(*u, n, tol);

    double lo = dist.support_lo(), hi = dist.support_hi();
    auto rev = [&](double q) { return q * (1.0 - std::pow(dist.cdf(q), n)); };
    double p = golden_max(rev, lo, hi, 200);

    // Newton polish on the stationarity condition
    // s(q) = 1 - G^n - n q G^{n-1} g, s'(q) by central differences.
    auto stat = [&](double q) {
        double G = dist.cdf(q);
        return 1.0 - std::pow(G, n) - n * q * std::pow(G, n - 1) * dist.pdf(q);
    };
    int newton_its = 0;
    double h = (hi - lo) * 1e-7;
    for (; newton_its < 40; ++newton_its) {
        double s = stat(p);
        if (std::abs(s) <= tol) break;
        double sp = central_diff(stat, p, h);
        if (!(std::abs(sp) > 0.0)) break;
        double step = s / sp;
        double pn = p - step;
        if (!(pn > lo && pn < hi)) break; // keep the golden bracket authoritative
        p = pn;
        if (std::abs(step) < 1e-16 * (1.0 + std::abs(p))) break;
    }

    double resid = std::abs(stat(p));
    // a kinked or flat profile leaves a large stationarity residual: surface it
    if (resid > std::sqrt(tol))
        throw numerical_error("bundle_price: stationarity residual " + std::to_string(resid) +
                              " suggests a non-unimodal revenue profile");
    BundlePriceResult out;
    out.n = n;
    out.c = std::numeric_limits<double>::quiet_NaN();
    out.price = p;
    out.revenue = p * (1.0 - std::pow(dist.cdf(p), n));
    out.residual = resid;
    out.iterations = newton_its;
    out.method = "golden-newton";
    return out;
}

double p_prime(double c, double p, int n) {
    double denom = 2.0 * (p - c) + (n - 1) * p;
    if (!(denom > 0.0)) throw std::domain_error("p_prime: nonpositive denominator");
    return 1.0 - (p - c) / denom;
}

// T_n(c) scaled by (n+1)^n, expressed in log space:
//   scaled_T(c) = 1 - exp(L2 - L1) - exp(L3 - L1)
// with L1 = n ln(n+1), L2 = n ln(n-c), L3 = 2 ln n + ln(c+1) + (n-1) ln(n-c).
static double scaled_T(double c, int n) {
    double L1 = n * std::log(double(n) + 1.0);
    double L2 = n * std::log(double(n) - c);
    double L3 = 2.0 * std::log(double(n)) + std::log(c + 1.0) + (n - 1) * std::log(double(n) - c);
    return 1.0 - std::exp(L2 - L1) - std::exp(L3 - L1);
}

ThresholdResult threshold_c_star(int n, double tol) {
    if (n < 2) throw std::invalid_argument("threshold_c_star: n >= 2");
    double lo = 0.0, hi = double(n) * (1.0 - 1e-12);
    double flo = scaled_T(lo, n);
    double fhi = scaled_T(hi, n);
    if (!(flo < 0.0) || !(fhi > 0.0))
        throw numerical_error("threshold_c_star: bracket sign pattern violated");
    RootResult r = bisect([&](double c) { return scaled_T(c, n); }, lo, hi, tol, 200);

    ThresholdResult out;
    out.n = n;
    out.c_star = r.x;
    // |T_n(c*)| / |T_n(0)|: both computed in the same scaled space
    out.residual = std::abs(scaled_T(r.x, n)) / std::abs(scaled_T(0.0, n));
    out.bracket_lo = lo;
    out.bracket_hi = hi;

    // check against the fixed-point form (n+1)(c+1-p(c)) = c+1; feasible for
    // desk-scale n only (the price solve is itself the expensive part)
    if (n <= 512) {
        BundlePriceResult bp = bundle_price_uniform(UniformShiftCdf(r.x), n, tol);
        double gap = (n + 1.0) * (r.x + 1.0 - bp.price) - (r.x + 1.0);
        if (std::abs(gap) > std::max(1e3 * tol, 1e-9) * (1.0 + r.x))
            throw numerical_error("threshold_c_star: definitions disagree, gap=" +
                                  std::to_string(gap));
    }
    return out;
}

OptimalityVerdict uniform_pricing_optimal(double c, int n) {
    if (n < 2) throw std::invalid_argument("uniform_pricing_optimal: n >= 2");
    if (!(c >= 0.0)) throw std::invalid_argument("uniform_pricing_optimal: c >= 0");

    ThresholdResult th = threshold_c_star(n);
    OptimalityVerdict by_threshold;
    by_threshold.n = n;
    by_threshold.c = c;
    by_threshold.rule = OptimalityRule::threshold_compare;
    by_threshold.margin = th.c_star - c;
    by_threshold.uniform_pricing_optimal = c <= th.c_star;

    OptimalityVerdict by_sign;
    by_sign.n = n;
    by_sign.c = c;
    by_sign.rule = OptimalityRule::polynomial_sign;
    if (c >= double(n)) {
        by_sign.margin = -1.0;
        by_sign.uniform_pricing_optimal = false;
    } else {
        double t = scaled_T(c, n);
        by_sign.margin = -t;
        by_sign.uniform_pricing_optimal = t <= 0.0;
    }

    // the rules may only disagree inside the root-tolerance band around c*
    if (by_sign.uniform_pricing_optimal != by_threshold.uniform_pricing_optimal &&
        std::abs(c - th.c_star) > 1e-9)
        throw numerical_error("uniform_pricing_optimal: rules disagree away from the boundary");
    return by_threshold;
}

std::vector<ThresholdResult> threshold_table(int n_max) {
    if (n_max < 2) throw std::invalid_argument("threshold_table: n_max >= 2");
    std::vector<ThresholdResult> out(size_t(n_max) - 1);
    parallel_for(n_max - 1, [&](int i) { out[size_t(i)] = threshold_c_star(i + 2); });
    for (size_t i = 0; i < out.size(); ++i) {
        int n = int(i) + 2;
        if (i > 0 && !(out[i].c_star > out[i - 1].c_star))
            throw numerical_error("threshold_table: c* not strictly increasing at n=" +
                                  std::to_string(n));
        if (!(out[i].c_star > std::log(double(n)) / 3.0))
            throw numerical_error("threshold_table: ln(n)/3 bound violated at n=" +
                                  std::to_string(n));
    }
    return out;
}

double uniform_revenue(double c, double p, int n) {
    return p * (1.0 - std::pow(p - c, n));
}

double uniform_revenue_quadrature(const Cdf& dist, double p, int n, int order) {
    QuadratureSpec spec;
    spec.order = order;
    auto density_max = [&](double x) {
        return n * std::pow(dist.cdf(x), n - 1) * dist.pdf(x);
    };
    double sell_prob = integrate_1d(density_max, p, dist.support_hi(), spec);
    return p * sell_prob;
}

} // namespace udm
