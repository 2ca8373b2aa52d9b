#include "udm/quadrature.hpp"
#include "udm/errors.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace udm {

static GaussLegendre compute_gl(int order) {
    assert(order >= 1);
    GaussLegendre gl;
    gl.nodes.resize(order);
    gl.weights.resize(order);
    // Newton on P_n with the Chebyshev-like initial guess; converges in a few
    // steps to full double precision.
    for (int i = 0; i < (order + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = order * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        gl.nodes[i] = -x;
        gl.nodes[order - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        gl.weights[i] = w;
        gl.weights[order - 1 - i] = w;
    }
    return gl;
}

const GaussLegendre& gauss_legendre(int order) {
    static std::map<int, GaussLegendre> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_gl(order)).first;
    return it->second;
}

// Panel edges for [lo, hi]: interior breaks, each segment split subdiv times.
static std::vector<double> panel_edges(double lo, double hi, const QuadratureSpec& spec) {
    std::vector<double> edges{lo};
    std::vector<double> cuts;
    for (double b : spec.breaks)
        if (b > lo + 1e-15 && b < hi - 1e-15) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(hi);
    for (double e : cuts) {
        double a = edges.back();
        for (int s = 1; s <= spec.subdiv; ++s)
            edges.push_back(a + (e - a) * s / spec.subdiv);
    }
    return edges;
}

double integrate_1d(const std::function<double(double)>& f, double lo, double hi,
                    const QuadratureSpec& spec) {
    if (hi <= lo) return 0.0;
    const auto& gl = gauss_legendre(spec.order);
    auto edges = panel_edges(lo, hi, spec);
    double total = 0.0;
    for (size_t p = 0; p + 1 < edges.size(); ++p) {
        double a = edges[p], b = edges[p + 1];
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double acc = 0.0;
        for (int i = 0; i < spec.order; ++i)
            acc += gl.weights[i] * f(mid + half * gl.nodes[i]);
        total += acc * half;
    }
    return total;
}

double integrate_box(const std::function<double(const double*)>& f, int dim,
                     double lo, double hi, const QuadratureSpec& spec) {
    assert(dim >= 1 && dim <= 6);
    if (dim == 1)
        return integrate_1d([&](double x) { return f(&x); }, lo, hi, spec);
    const auto& gl = gauss_legendre(spec.order);
    auto edges = panel_edges(lo, hi, spec);
    std::vector<double> pt(dim);
    // recursive tensor loop over axes
    std::function<double(int)> rec = [&](int axis) -> double {
        double total = 0.0;
        for (size_t p = 0; p + 1 < edges.size(); ++p) {
            double a = edges[p], b = edges[p + 1];
            double mid = 0.5 * (a + b), half = 0.5 * (b - a);
            double acc = 0.0;
            for (int i = 0; i < spec.order; ++i) {
                pt[axis] = mid + half * gl.nodes[i];
                double inner = (axis + 1 == dim) ? f(pt.data()) : rec(axis + 1);
                acc += gl.weights[i] * inner;
            }
            total += acc * half;
        }
        return total;
    };
    return rec(0);
}

double integrate_box_sorted(const std::function<double(const double*)>& f, int dim,
                            double lo, double hi, const QuadratureSpec& spec) {
    assert(dim >= 1 && dim <= 5);
    if (dim == 1)
        return integrate_1d([&](double x) { return f(&x); }, lo, hi, spec);
    const auto& gl = gauss_legendre(spec.order);
    auto edges = panel_edges(lo, hi, spec);

    // canonical sector: x0 >= x1 >= ... >= x_{dim-1} >= lo, parameterized by
    // x0 in panels and x_k = lo + (x_{k-1} - lo) t_k; Jacobian prod (x_{k-1}-lo).
    std::vector<int> perm(dim);
    for (int i = 0; i < dim; ++i) perm[i] = i;
    std::vector<double> canon(dim), pt(dim);

    // the per-level factor 0.5*scale carries the Jacobian term (x_{k-1} - lo)
    // through the nested returns, so no explicit product is needed
    std::function<double(int)> rec = [&](int k) -> double {
        double scale = canon[k - 1] - lo;
        double acc = 0.0;
        for (int i = 0; i < spec.order; ++i) {
            double t = 0.5 + 0.5 * gl.nodes[i];
            canon[k] = lo + scale * t;
            double inner;
            if (k + 1 == dim) {
                for (int j = 0; j < dim; ++j) pt[perm[j]] = canon[j];
                inner = f(pt.data());
            } else {
                inner = rec(k + 1);
            }
            acc += gl.weights[i] * inner;
        }
        return acc * 0.5 * scale;
    };

    double total = 0.0;
    do {
        for (size_t p = 0; p + 1 < edges.size(); ++p) {
            double a = edges[p], b = edges[p + 1];
            double mid = 0.5 * (a + b), half = 0.5 * (b - a);
            double acc = 0.0;
            for (int i = 0; i < spec.order; ++i) {
                canon[0] = mid + half * gl.nodes[i];
                acc += gl.weights[i] * rec(1);
            }
            total += acc * half;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

} // namespace udm
