#include "udm/certify.hpp"

#include "udm/cdf.hpp"
#include "udm/errors.hpp"
#include "udm/numerics.hpp"
#include "udm/pricing.hpp"
#include "udm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace udm {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::optimal: return "optimal";
        case Verdict::not_optimal: return "not_optimal";
        default: return "inconclusive";
    }
}

namespace {

double dominance_margin(int n, double c, double p) {
    return (n + 1.0) * (c + 1.0 - p) - (c + 1.0);
}

// Antiderivatives of the density difference d(t) = f(min=t) - (c+1) on
// [c, c+1]. Below the ridge t = 2c+1-p the pushed density is
// (n+1)(t-c) + c, above it the constant (n+1)(c+1-p); d jumps by -c at the
// ridge but its integral stays continuous.
struct DiffAntiderivatives {
    double c, m, marg;
    int n;

    double G(double x) const {  // int_c^x d
        double lo = std::min(x, m);
        double g = 0.5 * (n + 1.0) * (lo - c) * (lo - c) - (lo - c);
        if (x > m) g += marg * (x - m);
        return g;
    }
    double AG(double x) const {  // int_c^x G
        double lo = std::min(x, m);
        double a = (n + 1.0) * (lo - c) * (lo - c) * (lo - c) / 6.0
                   - 0.5 * (lo - c) * (lo - c);
        if (x > m) {
            double gm = 0.5 * (n + 1.0) * (m - c) * (m - c) - (m - c);
            a += gm * (x - m) + 0.5 * marg * (x - m) * (x - m);
        }
        return a;
    }
};

} // namespace

double staircase_integral(const UpperSetStaircase& U, const RegionGeometry& geom) {
    if (U.n != geom.n)
        throw std::invalid_argument("staircase_integral: dimension mismatch");
    if (U.empty_set) return 0.0;
    const int n = geom.n;
    const double c = geom.c, p = geom.p;
    DiffAntiderivatives ad{c, 2.0 * c + 1.0 - p, dominance_margin(n, c, p), n};

    if (n == 2) {
        double a = std::clamp(U.tau[0], c, c + 1.0);
        return ad.G(c + 1.0) - ad.G(a);
    }
    if (n == 3) {
        const int S = static_cast<int>(U.tau.size());
        const double h = 1.0 / S;
        double total = 0.0;
        for (int i = 0; i < S; ++i) {
            double tp = std::clamp(U.tau[i], c, c + 1.0);
            double a = std::max(c + i * h, tp);
            double b = c + (i + 1) * h;
            if (a < b) total += ad.AG(b) - ad.AG(a) - ad.G(tp) * (b - a);
        }
        return total;
    }
    throw std::domain_error("staircase_integral: supported for n in {2, 3}");
}

CertificateReport convex_dominance_closed_form(int n, double c) {
    if (n < 2) throw std::invalid_argument("convex_dominance_closed_form: n >= 2");
    if (!std::isfinite(c) || c < 0.0)
        throw std::invalid_argument("convex_dominance_closed_form: c >= 0");

    auto bp = bundle_price(UniformShiftCdf(c), n);
    const double margin = dominance_margin(n, c, bp.price);

    auto th = threshold_c_star(n);
    auto bps = bundle_price(UniformShiftCdf(th.c_star), n);
    const double margin_star = dominance_margin(n, th.c_star, bps.price);

    CertificateReport rep;
    rep.n = n;
    rep.c = c;
    rep.p = bp.price;
    rep.checks.push_back({"margin", margin, true});
    rep.checks.push_back({"margin_at_threshold", margin_star,
                          std::abs(margin_star) <= 1e-8});
    bool agree = ((margin >= 0.0) == (c <= th.c_star)) ||
                 std::abs(c - th.c_star) <= 1e-8;
    rep.checks.push_back({"threshold_shift", th.c_star, agree});
    rep.verdict = margin >= 0.0 ? Verdict::optimal : Verdict::not_optimal;
    return rep;
}

CertificateReport upper_set_dominance_test(int n, double c, int samples,
                                           std::uint64_t seed) {
    if (n != 2 && n != 3)
        throw std::domain_error("upper_set_dominance_test: supported for n in {2, 3}");
    if (samples < 100)
        throw std::invalid_argument("upper_set_dominance_test: samples >= 100");
    if (!std::isfinite(c) || c < 0.0)
        throw std::invalid_argument("upper_set_dominance_test: c >= 0");

    auto bp = bundle_price(UniformShiftCdf(c), n);
    auto geom = make_region_geometry(n, c, bp.price);
    const double marg = dominance_margin(n, c, bp.price);
    const double ridge = 2.0 * c + 1.0 - bp.price;
    const double tol = 1e-9;

    UpperSetStaircase corner;
    corner.n = n;
    corner.lo = c;
    corner.hi = c + 1.0;
    corner.empty_set = false;
    corner.tau.assign(n == 2 ? 1 : 32, ridge);
    const double corner_val = staircase_integral(corner, geom);

    double min_val = corner_val;
    for (int k = 0; k < samples; ++k) {
        auto U = random_staircase(n, c, 32, seed + static_cast<std::uint64_t>(k));
        min_val = std::min(min_val, staircase_integral(U, geom));
    }
    const double full_val = staircase_integral(full_boundary_set(n, c), geom);
    min_val = std::min(min_val, full_val);

    CertificateReport rep;
    rep.n = n;
    rep.c = c;
    rep.p = bp.price;
    rep.checks.push_back({"margin", marg, true});
    rep.checks.push_back({"corner_seed_integral", corner_val,
                          (corner_val >= -tol) == (marg >= -tol)});
    rep.checks.push_back({"min_sampled_integral", min_val,
                          (min_val >= -tol) == (marg >= -tol)});
    rep.checks.push_back({"full_set_balance", full_val, std::abs(full_val) <= 1e-8});
    rep.verdict = min_val >= -tol ? Verdict::optimal : Verdict::not_optimal;
    return rep;
}

DOrderedResult d_ordered_check(
    const std::function<double(const std::vector<double>&)>& density_diff,
    int n, double c, int grid) {
    if (n < 2) throw std::invalid_argument("d_ordered_check: n >= 2");
    if (grid < 16) throw std::invalid_argument("d_ordered_check: grid >= 16");
    if (!std::isfinite(c) || c < 0.0)
        throw std::invalid_argument("d_ordered_check: c >= 0");

    const double tol = 1e-9;
    std::vector<double> ms(grid), vals(grid);
    std::vector<double> x(static_cast<std::size_t>(n), c + 1.0);
    for (int i = 0; i < grid; ++i) {
        ms[i] = c + (i + 0.5) / grid;
        x.assign(static_cast<std::size_t>(n), c + 1.0);
        x[static_cast<std::size_t>(n) - 1] = ms[i];
        vals[i] = density_diff(x);
        if (!std::isfinite(vals[i]))
            throw numerical_error("d_ordered_check: non-finite density sample");
    }

    // Spot-check that the value depends on the point only through its minimum.
    if (n >= 3) {
        const int stride = std::max(1, grid / 8);
        for (int i = 0; i < grid; i += stride) {
            const double m = ms[i];
            for (double mid : {m, 0.5 * (m + c + 1.0), c + 1.0}) {
                x.assign(static_cast<std::size_t>(n), mid);
                x[0] = c + 1.0;
                x[static_cast<std::size_t>(n) - 1] = m;
                double v = density_diff(x);
                if (std::abs(v - vals[i]) > 1e-7 * (1.0 + std::abs(vals[i])))
                    throw std::invalid_argument(
                        "d_ordered_check: density is not a function of the minimum");
            }
        }
    }

    int first_pos = -1, last_neg = -1;
    double max_pos_before = 0.0, worst = 0.0;
    for (int i = 0; i < grid; ++i) {
        const double v = vals[i];
        if (v > tol && first_pos < 0) first_pos = i;
        if (v < -tol) {
            last_neg = i;
            if (max_pos_before > tol)
                worst = std::max(worst, std::min(max_pos_before, -v));
        }
        max_pos_before = std::max(max_pos_before, v);
    }

    DOrderedResult res;
    res.worst_inversion = worst;
    res.is_d_ordered = worst <= tol;
    if (!res.is_d_ordered) return res;

    if (last_neg < 0) {
        res.r = c;  // nonnegative everywhere: any threshold at the support floor
    } else if (first_pos < 0) {
        res.r = c + 1.0;  // nonpositive everywhere
    } else {
        const double lo = ms[last_neg], hi = ms[first_pos];
        const double canonical = c + 1.0 / (n + 1.0);
        const double pad = 1.0 / grid;
        res.r = (canonical >= lo - pad && canonical <= hi + pad)
                    ? canonical
                    : 0.5 * (lo + hi);
    }
    return res;
}

CylinderReport cylinder_reduction_check(
    const std::function<double(const std::vector<double>&)>& density,
    int k, double c, int grid) {
    if (k < 3) throw std::invalid_argument("cylinder_reduction_check: k >= 3");

    CylinderReport rep;
    rep.k = k;
    rep.input = d_ordered_check(density, k, c, grid);

    QuadratureSpec spec;
    spec.order = 24;
    spec.subdiv = 2;
    auto reduced_density = [&density, k, c, spec](const std::vector<double>& y) {
        std::vector<double> x(y.begin(), y.end());
        x.push_back(0.0);
        auto f1 = [&x, &density, k](double t) {
            x[static_cast<std::size_t>(k) - 1] = t;
            return density(x);
        };
        return integrate_1d(f1, c, y.back(), spec);
    };
    rep.reduced = d_ordered_check(reduced_density, k - 1, c, grid);
    rep.pass = !rep.input.is_d_ordered || rep.reduced.is_d_ordered;
    return rep;
}

WitnessGap necessity_witness_gap(int n, double c) {
    if (n != 2 && n != 3)
        throw std::domain_error("necessity_witness_gap: supported for n in {2, 3}");
    if (!std::isfinite(c) || c < 0.0)
        throw std::invalid_argument("necessity_witness_gap: c >= 0");

    auto bp = bundle_price(UniformShiftCdf(c), n);
    const double p = bp.price;
    auto geom = make_region_geometry(n, c, p);

    WitnessGap wg;
    // Positive part: point mass at the bottom corner plus density c+1 on the
    // top faces; the face integral is an exact shifted Irwin-Hall moment.
    const double a0 = c + n - 1.0 - p;
    wg.int_mu_plus = n * (c + 1.0) * irwin_hall_hinge(n - 1, a0)
                     + std::max(p - n - c, 0.0);

    QuadratureSpec spec;
    spec.order = 16;
    const double ridge = 2.0 * c + 1.0 - p;
    if (n == 2) {
        // On [ridge, c+1] the hinge is active and the pushed density applies.
        auto f1 = [&geom, c, ridge](double t) {
            std::vector<double> x{c + 1.0, t};
            return (t - ridge) * pushed_density_eval(x, geom);
        };
        wg.int_gamma1 = 2.0 * integrate_1d(f1, ridge, c + 1.0, spec);
    } else {
        const double s0 = 3.0 * c + 2.0 - p;  // activation for the two free coords
        auto inner = [&geom, c, s0, &spec](double x2) {
            const double lo = std::max(s0 - x2, c);
            if (lo >= x2) return 0.0;
            auto f1 = [&geom, c, s0, x2](double x3) {
                std::vector<double> x{c + 1.0, x2, x3};
                return (x2 + x3 - s0) * pushed_density_eval(x, geom);
            };
            return integrate_1d(f1, lo, x2, spec);
        };
        const double lo_outer = std::max(0.5 * s0, c);
        const double per_face = 2.0 * integrate_1d(inner, lo_outer, c + 1.0, spec);
        wg.int_gamma1 = 3.0 * per_face;
    }
    wg.gap = wg.int_mu_plus - wg.int_gamma1;
    return wg;
}

} // namespace udm
