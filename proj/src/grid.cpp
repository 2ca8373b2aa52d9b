#include "udm/grid.hpp"
#include "udm/errors.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace udm {

int GridProblem::flat_index(const std::vector<int>& idx) const {
    assert(int(idx.size()) == n);
    int flat = 0;
    for (int j = 0; j < n; ++j) {
        assert(idx[size_t(j)] >= 0 && idx[size_t(j)] < int(axes[size_t(j)].size()));
        flat = flat * int(axes[size_t(j)].size()) + idx[size_t(j)];
    }
    return flat;
}

GridProblem build_grid(const std::vector<std::shared_ptr<const Cdf>>& dists, int resolution) {
    if (dists.empty()) throw std::invalid_argument("build_grid: need at least one item");
    if (resolution < 2) throw std::invalid_argument("build_grid: resolution >= 2");

    GridProblem g;
    g.n = int(dists.size());
    long long total = 1;
    for (const auto& d : dists) {
        if (!d) throw std::invalid_argument("build_grid: null distribution");
        double lo = d->support_lo(), hi = d->support_hi();
        if (!(hi > lo)) throw invalid_distribution("build_grid: degenerate support");
        std::vector<double> centers(static_cast<size_t>(resolution)), mass(static_cast<size_t>(resolution));
        for (int i = 0; i < resolution; ++i) {
            double e0 = lo + (hi - lo) * i / resolution;
            double e1 = lo + (hi - lo) * (i + 1) / resolution;
            centers[size_t(i)] = 0.5 * (e0 + e1);
            mass[size_t(i)] = d->cdf(e1) - d->cdf(e0);
        }
        g.axes.push_back(std::move(centers));
        g.axis_mass.push_back(std::move(mass));
        total *= resolution;
    }
    if (total > 6'000'000) throw std::invalid_argument("build_grid: grid too large");

    int T = int(total);
    g.types.resize(T, g.n);
    g.weights.resize(T);
    std::vector<int> idx(size_t(g.n), 0);
    for (int t = 0; t < T; ++t) {
        double w = 1.0;
        for (int j = 0; j < g.n; ++j) {
            g.types(t, j) = g.axes[size_t(j)][size_t(idx[size_t(j)])];
            w *= g.axis_mass[size_t(j)][size_t(idx[size_t(j)])];
        }
        g.weights(t) = w;
        // odometer increment, last axis fastest (matches flat_index)
        for (int j = g.n - 1; j >= 0; --j) {
            if (++idx[size_t(j)] < resolution) break;
            idx[size_t(j)] = 0;
        }
    }
    double sum = g.weights.sum();
    // summation rounding grows with cell count; scale the gate accordingly
    if (std::abs(sum - 1.0) > std::max(1e-12, 1e-15 * double(T)))
        throw numerical_error("build_grid: weights sum to " + std::to_string(sum));
    return g;
}

GridProblem build_grid_iid(const Cdf& dist, int n, int resolution) {
    // the shared_ptr wrapper below aliases a stack reference; keep it local
    std::shared_ptr<const Cdf> alias(&dist, [](const Cdf*) {});
    std::vector<std::shared_ptr<const Cdf>> ds(size_t(n), alias);
    return build_grid(ds, resolution);
}

} // namespace udm
