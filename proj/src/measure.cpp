#include "udm/measure.hpp"
#include "udm/errors.hpp"
#include "udm/numerics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace udm {

double TransformedMeasure::total_mass() const {
    return 1.0 - (n + 1.0) + n * (c + 1.0) - n * c;
}

double TransformedMeasure::positive_mass() const { return 1.0 + n * (c + 1.0); }

double TransformedMeasure::negative_mass() const { return (n + 1.0) + n * c; }

TransformedMeasure make_transformed_measure(int n, double c) {
    if (n < 1) throw std::invalid_argument("make_transformed_measure: n >= 1");
    if (c < 0.0) throw std::invalid_argument("make_transformed_measure: c >= 0");
    TransformedMeasure tm{n, c};
    if (std::abs(tm.total_mass()) > 1e-12)
        throw numerical_error("make_transformed_measure: components do not cancel");
    return tm;
}

namespace {

double checked(double v) {
    if (!std::isfinite(v))
        throw numerical_error("integrate_against_mu: non-finite integrand value");
    return v;
}

// integral of u over [c,c+1]^dim with one coordinate of the ambient point
// pinned; fixed < 0 means no pin (volume integral)
double box_integral(const PointFn& u, int n, double c, int fixed, double fixed_value,
                    const QuadratureSpec& spec) {
    const int dim = fixed >= 0 ? n - 1 : n;
    std::vector<double> pt(static_cast<size_t>(n));
    auto f = [&](const double* y) {
        int k = 0;
        for (int j = 0; j < n; ++j)
            pt[size_t(j)] = (j == fixed) ? fixed_value : y[k++];
        return checked(u(pt));
    };
    if (dim == 0) return checked(u(std::vector<double>{fixed_value}));
    return spec.sorted_sectors ? integrate_box_sorted(f, dim, c, c + 1.0, spec)
                               : integrate_box(f, dim, c, c + 1.0, spec);
}

} // namespace

double integrate_against_mu(const PointFn& u, const TransformedMeasure& tm,
                            const QuadratureSpec& spec) {
    const int n = tm.n;
    const double c = tm.c;

    const std::vector<double> corner(size_t(n), c);
    double total = checked(u(corner));

    total -= (n + 1.0) * box_integral(u, n, c, -1, 0.0, spec);
    for (int i = 0; i < n; ++i) {
        total += (c + 1.0) * box_integral(u, n, c, i, c + 1.0, spec);
        total -= c * box_integral(u, n, c, i, c, spec);
    }
    return total;
}

RegionGeometry make_region_geometry(int n, double c, double p) {
    if (n < 2) throw std::invalid_argument("make_region_geometry: n >= 2");
    if (!(p > c && p < c + 1.0))
        throw std::invalid_argument("make_region_geometry: p must lie in (c, c+1)");
    return RegionGeometry{n, c, p};
}

bool RegionGeometry::in_X(const std::vector<double>& x) const {
    if (int(x.size()) != n) return false;
    for (double v : x)
        if (v < c || v > c + 1.0) return false;
    return true;
}

bool RegionGeometry::in_W(const std::vector<double>& x) const {
    if (!in_X(x)) return false;
    const double mx = *std::max_element(x.begin(), x.end());
    return mx > p;
}

bool RegionGeometry::in_Z(const std::vector<double>& x) const {
    if (!in_X(x)) return false;
    const double mx = *std::max_element(x.begin(), x.end());
    return mx <= p;
}

bool RegionGeometry::in_B(const std::vector<double>& x) const {
    if (!in_X(x)) return false;
    return *std::max_element(x.begin(), x.end()) == c + 1.0;
}

bool RegionGeometry::in_B_Z(const std::vector<double>& x) const {
    if (!in_X(x)) return false;
    return *std::max_element(x.begin(), x.end()) == p;
}

bool RegionGeometry::in_B_i(const std::vector<double>& x, int i) const {
    if (i < 0 || i >= n) throw std::invalid_argument("in_B_i: index out of range");
    if (!in_B(x)) return false;
    // argmax ties resolve to the lowest index
    for (int j = 0; j < i; ++j)
        if (x[size_t(j)] == c + 1.0) return false;
    return x[size_t(i)] == c + 1.0;
}

bool RegionGeometry::in_D_n(const std::vector<double>& x) const {
    if (!in_B(x)) return false;
    if (x[0] != c + 1.0) return false;
    for (int j = 1; j + 1 < n; ++j)
        if (x[size_t(j)] < x[size_t(j) + 1]) return false;
    return true;
}

double pushed_density_eval(const std::vector<double>& x, const RegionGeometry& geom) {
    const int n = geom.n;
    const double c = geom.c, p = geom.p;
    if (int(x.size()) != n || std::abs(x[0] - (c + 1.0)) > 1e-9)
        throw std::domain_error("pushed_density_eval: point is not on B_1");
    double mn = c + 1.0;
    for (int j = 1; j < n; ++j) {
        if (x[size_t(j)] < c - 1e-9 || x[size_t(j)] > c + 1.0 + 1e-9)
            throw std::domain_error("pushed_density_eval: point is not on B_1");
        mn = std::min(mn, x[size_t(j)]);
    }
    if (mn >= 2.0 * c + 1.0 - p) return (n + 1.0) * (c + 1.0 - p);
    return (n + 1.0) * (mn - c) + c;
}

bool UpperSetStaircase::contains(const std::vector<double>& x) const {
    if (empty_set) return false;
    if (int(x.size()) != n) return false;
    double mx = x[0];
    for (double v : x) mx = std::max(mx, v);
    if (std::abs(mx - hi) > 1e-9) return false;  // not on the top boundary

    // sorted non-max coordinates, descending; symmetric representation
    std::vector<double> rest;
    rest.reserve(size_t(n) - 1);
    bool max_taken = false;
    for (double v : x) {
        if (!max_taken && v == mx) {
            max_taken = true;
            continue;
        }
        rest.push_back(v);
    }
    std::sort(rest.begin(), rest.end(), std::greater<double>());

    if (n == 2) return rest[0] >= tau[0];

    // n == 3: slab of the larger free coordinate selects the threshold for
    // the smaller one
    const int S = int(tau.size());
    int slab = int((rest[0] - lo) / (hi - lo) * S);
    slab = std::clamp(slab, 0, S - 1);
    return rest[1] >= tau[size_t(slab)];
}

UpperSetStaircase full_boundary_set(int n, double c) {
    UpperSetStaircase u;
    u.n = n;
    u.lo = c;
    u.hi = c + 1.0;
    u.tau.assign(n == 2 ? 1 : 32, c);  // threshold at the support floor
    return u;
}

UpperSetStaircase empty_boundary_set(int n, double c) {
    UpperSetStaircase u = full_boundary_set(n, c);
    u.empty_set = true;
    return u;
}

UpperSetStaircase random_staircase(int n, double c, int resolution, std::uint64_t seed) {
    if (n != 2 && n != 3)
        throw std::domain_error("random_staircase: staircases support n in {2, 3}");
    if (resolution < 1) throw std::invalid_argument("random_staircase: resolution >= 1");
    UpperSetStaircase u;
    u.n = n;
    u.lo = c;
    u.hi = c + 1.0;
    RandomStream rng(seed);
    if (n == 2) {
        u.tau.assign(1, rng.next_double(c, c + 1.0));
        return u;
    }
    u.tau.resize(static_cast<size_t>(resolution));
    for (auto& t : u.tau) t = rng.next_double(c, c + 1.0);
    // non-increasing thresholds make the set coordinatewise upper
    std::sort(u.tau.begin(), u.tau.end(), std::greater<double>());
    return u;
}

bool push_set_membership(const std::vector<double>& y, const UpperSetStaircase& U,
                         const RegionGeometry& geom) {
    if (int(y.size()) != geom.n)
        throw std::invalid_argument("push_set_membership: dimension mismatch");
    const double c = geom.c;
    const double mx = *std::max_element(y.begin(), y.end());
    const double t = c + 1.0 - mx;

    // land exactly on the boundary: argmax coordinates pin to c+1
    std::vector<double> z(y.size());
    for (size_t j = 0; j < y.size(); ++j)
        z[j] = (y[j] == mx) ? c + 1.0 : y[j] + t;
    return U.contains(z);
}

} // namespace udm
