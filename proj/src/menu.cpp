#include "udm/menu.hpp"
#include "udm/errors.hpp"
#include "udm/numerics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace udm {
namespace {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

std::vector<std::vector<int>> permutations(int n) {
    std::vector<int> p(static_cast<size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<int>> out;
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

/* Expands orbit representatives (Q row k, price k) into literal options:
   representative q played under permutation g charges q . t_perm, i.e. the
   effective weight vector w has w[g[i]] = q[i]. */
MenuMechanism expand_orbits(const MatrixXd& Q, const VectorXd& pr,
                            const std::vector<std::vector<int>>& perms) {
    MenuMechanism m;
    m.n = int(Q.cols());
    for (int k = 0; k < Q.rows(); ++k) {
        for (const auto& g : perms) {
            VectorXd w = VectorXd::Zero(m.n);
            for (int i = 0; i < m.n; ++i) w(g[size_t(i)]) = Q(k, i);
            m.options.push_back({std::move(w), pr(k)});
        }
    }
    return m;
}

MenuMechanism dedupe(const MenuMechanism& in) {
    MenuMechanism out;
    out.n = in.n;
    for (const auto& o : in.options) {
        bool dup = false;
        for (const auto& kept : out.options) {
            if (std::abs(kept.price - o.price) > 1e-12) continue;
            if ((kept.q - o.q).lpNorm<Eigen::Infinity>() <= 1e-12) {
                dup = true;
                break;
            }
        }
        if (!dup) out.options.push_back(o);
    }
    return out;
}

struct TrainResult {
    MatrixXd Q;
    VectorXd pr;
};

TrainResult train_once(const std::vector<std::shared_ptr<const Cdf>>& dists, int K,
                       const MenuTrainConfig& cfg, std::uint64_t seed, bool structured) {
    const int n = int(dists.size());
    const auto perms = permutations(n);
    const int P = int(perms.size());
    const int B = cfg.batch;
    const int R = K * P;  // live softmax rows; row R is the null option
    RandomStream rng(seed);

    VectorXd lov(n), hiv(n);
    for (int j = 0; j < n; ++j) {
        lov(j) = dists[size_t(j)]->support_lo();
        hiv(j) = dists[size_t(j)]->support_hi();
    }

    MatrixXd Q(K, n);
    VectorXd pr(K);
    if (structured) {
        // alternate favorite-item vertex and equal split, prices laddered
        // across low margins where grid optima actually sit
        Q.setZero();
        for (int k = 0; k < K; ++k) {
            if (k % 2 == 0)
                Q(k, 0) = 1.0;
            else
                Q.row(k).setConstant(1.0 / n);
            const double frac = 0.15 + 0.45 * double(k) / std::max(K - 1, 1);
            pr(k) = Q.row(k).dot(lov) + frac * Q.row(k).dot(hiv - lov);
        }
    } else {
        std::vector<double> buf(static_cast<size_t>(n));
        for (int k = 0; k < K; ++k) {
            for (int j = 0; j < n; ++j) buf[size_t(j)] = rng.next_double(0.1, 0.9);
            project_subsimplex(buf);
            for (int j = 0; j < n; ++j) Q(k, j) = buf[size_t(j)];
            const double frac = rng.next_double(0.3, 0.9);
            pr(k) = std::max(0.0, Q.row(k).dot(lov) + frac * Q.row(k).dot(hiv - lov));
        }
    }

    MatrixXd mq = MatrixXd::Zero(K, n), vq = MatrixXd::Zero(K, n);
    VectorXd mp = VectorXd::Zero(K), vp = VectorXd::Zero(K);
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;

    MatrixXd Tb(B, n);
    MatrixXd U(R + 1, B);
    VectorXd prices_all(R + 1);
    std::vector<double> qbuf(static_cast<size_t>(n));

    for (int step = 0; step < cfg.steps; ++step) {
        for (int b = 0; b < B; ++b)
            for (int j = 0; j < n; ++j)
                Tb(b, j) = dists[size_t(j)]->quantile(rng.next_double());

        const double sched = cfg.steps > 1 ? double(step) / (cfg.steps - 1) : 1.0;
        const double kappa = cfg.kappa0 * std::pow(cfg.kappa1 / cfg.kappa0, sched);
        const double lr =
            cfg.lr0 * (1.0 + std::cos(M_PI * double(step) / cfg.steps)) / 2.0 + 1e-4;

        for (int k = 0; k < K; ++k)
            for (int pi = 0; pi < P; ++pi) {
                auto row = U.row(k * P + pi);
                row.setConstant(-pr(k));
                for (int i = 0; i < n; ++i)
                    row += Q(k, i) * Tb.col(perms[size_t(pi)][size_t(i)]).transpose();
                prices_all(k * P + pi) = pr(k);
            }
        U.row(R).setZero();
        prices_all(R) = 0.0;

        const RowVectorXd colmax = U.colwise().maxCoeff();
        MatrixXd E =
            ((kappa * (U.rowwise() - colmax)).array().max(-700.0)).exp().matrix();
        const RowVectorXd colsum = E.colwise().sum();
        const MatrixXd sig = (E.array().rowwise() / colsum.array()).matrix();
        const RowVectorXd rbar = prices_all.transpose() * sig;

        if (!rbar.allFinite())
            throw numerical_error("solve_menu: smoothed objective diverged at step " +
                                  std::to_string(step));

        MatrixXd gq = MatrixXd::Zero(K, n);
        VectorXd gp = VectorXd::Zero(K);
        for (int k = 0; k < K; ++k)
            for (int pi = 0; pi < P; ++pi) {
                const int r = k * P + pi;
                const RowVectorXd gu =
                    kappa * sig.row(r).cwiseProduct((prices_all(r) - rbar.array()).matrix());
                for (int i = 0; i < n; ++i)
                    gq(k, i) += gu.dot(Tb.col(perms[size_t(pi)][size_t(i)])) / B;
                gp(k) += sig.row(r).mean() - gu.mean();
            }

        mq = b1 * mq + (1.0 - b1) * gq;
        vq = b2 * vq + (1.0 - b2) * gq.cwiseProduct(gq);
        mp = b1 * mp + (1.0 - b1) * gp;
        vp = b2 * vp + (1.0 - b2) * gp.cwiseProduct(gp);
        const double c1 = std::sqrt(1.0 - std::pow(b2, step + 1)) / (1.0 - std::pow(b1, step + 1));

        const MatrixXd qn =
            Q + lr * c1 * (mq.array() / (vq.array().sqrt() + eps)).matrix();
        for (int k = 0; k < K; ++k) {
            for (int j = 0; j < n; ++j) qbuf[size_t(j)] = qn(k, j);
            project_subsimplex(qbuf);
            for (int j = 0; j < n; ++j) Q(k, j) = qbuf[size_t(j)];
        }
        pr = (pr + lr * c1 * (mp.array() / (vp.array().sqrt() + eps)).matrix()).cwiseMax(0.0);
    }
    return {std::move(Q), std::move(pr)};
}

/* Coarse scan before golden refinement: revenue as a function of one price
   has a flat tail once the option goes dead, and golden section alone gets
   stranded there. */
void polish_prices(MatrixXd& Q, VectorXd& pr, const VectorXd& hiv,
                   const GridProblem& pg, const std::vector<std::vector<int>>& perms,
                   const MenuTrainConfig& cfg) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    const int K = int(pr.size());
    auto f = [&](int k, double x) {
        const double keep = pr(k);
        pr(k) = x;
        const double rev = evaluate_mechanism(expand_orbits(Q, pr, perms), pg).revenue;
        pr(k) = keep;
        return rev;
    };
    const int S = cfg.scan_points;
    for (int round = 0; round < cfg.polish_rounds; ++round) {
        for (int k = 0; k < K; ++k) {
            const double hk = std::max(Q.row(k).dot(hiv), pr(k)) + 1e-9;
            std::vector<double> xs(static_cast<size_t>(S)), fs(static_cast<size_t>(S));
            int ibest = 0;
            for (int i = 0; i < S; ++i) {
                xs[size_t(i)] = hk * double(i) / (S - 1);
                fs[size_t(i)] = f(k, xs[size_t(i)]);
                if (fs[size_t(i)] > fs[size_t(ibest)]) ibest = i;
            }
            double a = xs[size_t(std::max(ibest - 1, 0))];
            double b = xs[size_t(std::min(ibest + 1, S - 1))];
            double c = b - gr * (b - a), d = a + gr * (b - a);
            double fc = f(k, c), fd = f(k, d);
            for (int it = 0; it < 32; ++it) {
                if (fc > fd) {
                    b = d; d = c; fd = fc;
                    c = b - gr * (b - a);
                    fc = f(k, c);
                } else {
                    a = c; c = d; fc = fd;
                    d = a + gr * (b - a);
                    fd = f(k, d);
                }
            }
            const double cand = 0.5 * (a + b);
            pr(k) = (f(k, cand) >= fs[size_t(ibest)]) ? cand : xs[size_t(ibest)];
        }
    }
}

Heatmap slice_heatmap(const GridProblem& grid, int item, const std::map<int, double>& slice,
                      const std::function<double(int)>& value_at) {
    const int n = grid.n;
    if (item < 0 || item >= n)
        throw std::invalid_argument("allocation_heatmap: item out of range");
    if (int(slice.size()) != n - 2)
        throw std::invalid_argument("allocation_heatmap: slice must fix exactly n-2 axes");

    std::vector<int> fixed(size_t(n), -1);
    for (const auto& [ax, val] : slice) {
        if (ax < 0 || ax >= n)
            throw std::invalid_argument("allocation_heatmap: slice axis out of range");
        const auto& centers = grid.axes[size_t(ax)];
        int best = 0;
        for (int i = 1; i < int(centers.size()); ++i)
            if (std::abs(centers[size_t(i)] - val) < std::abs(centers[size_t(best)] - val))
                best = i;
        fixed[size_t(ax)] = best;
    }

    std::vector<int> free_axes;
    for (int ax = 0; ax < n; ++ax)
        if (fixed[size_t(ax)] < 0) free_axes.push_back(ax);
    assert(free_axes.size() == 2);

    Heatmap h;
    h.item = item;
    h.axis_row = free_axes[0];
    h.axis_col = free_axes[1];
    h.row_values = grid.axes[size_t(h.axis_row)];
    h.col_values = grid.axes[size_t(h.axis_col)];
    for (const auto& [ax, val] : slice)
        h.slice[ax] = grid.axes[size_t(ax)][size_t(fixed[size_t(ax)])];

    const int rows = int(h.row_values.size());
    const int cols = int(h.col_values.size());
    h.values.resize(rows, cols);
    std::vector<int> idx(size_t(n), 0);
    for (int ax = 0; ax < n; ++ax)
        if (fixed[size_t(ax)] >= 0) idx[size_t(ax)] = fixed[size_t(ax)];
    for (int r = 0; r < rows; ++r) {
        idx[size_t(h.axis_row)] = r;
        for (int c = 0; c < cols; ++c) {
            idx[size_t(h.axis_col)] = c;
            h.values(r, c) = value_at(grid.flat_index(idx));
        }
    }
    return h;
}

} // namespace

MechanismEval evaluate_mechanism(const MenuMechanism& menu, const GridProblem& grid) {
    if (menu.n != grid.n)
        throw std::invalid_argument("evaluate_mechanism: dimension mismatch");
    const int T = grid.type_count();
    const int n = grid.n;
    const int R = int(menu.options.size());

    MatrixXd W(R, n);
    VectorXd P(R);
    for (int r = 0; r < R; ++r) {
        if (int(menu.options[size_t(r)].q.size()) != n)
            throw std::invalid_argument("evaluate_mechanism: option dimension mismatch");
        W.row(r) = menu.options[size_t(r)].q.transpose();
        P(r) = menu.options[size_t(r)].price;
    }

    MechanismEval out;
    out.allocation_map.assign(size_t(T), -1);
    const int chunk = 8192;
    const int nch = (T + chunk - 1) / chunk;
    std::vector<double> partial(size_t(nch), 0.0);

    parallel_for(nch, [&](int ci) {
        const int t0 = ci * chunk;
        const int t1 = std::min(T, t0 + chunk);
        double acc = 0.0;
        for (int t = t0; t < t1; ++t) {
            double bu = 0.0, bp = 0.0;
            int bk = -1;
            for (int r = 0; r < R; ++r) {
                double u = -P(r);
                for (int j = 0; j < n; ++j) u += W(r, j) * grid.types(t, j);
                if (u > bu + 1e-12 || (std::abs(u - bu) <= 1e-12 && P(r) > bp)) {
                    bu = u;
                    bp = P(r);
                    bk = r;
                }
            }
            out.allocation_map[size_t(t)] = bk;
            acc += grid.weights(t) * bp;
        }
        partial[size_t(ci)] = acc;
    });
    // fixed-order reduction keeps the result thread-count independent
    out.revenue = 0.0;
    for (double v : partial) out.revenue += v;
    return out;
}

MenuMechanism solve_menu(const std::vector<std::shared_ptr<const Cdf>>& dists,
                         int menu_size, const MenuTrainConfig& cfg) {
    if (menu_size < 1) throw std::invalid_argument("solve_menu: menu_size >= 1");
    if (dists.empty() || dists.size() > 5)
        throw std::invalid_argument("solve_menu: supports 1 to 5 items");
    for (const auto& d : dists)
        if (!d) throw std::invalid_argument("solve_menu: null distribution");

    const int n = int(dists.size());
    const auto perms = permutations(n);
    const int Rf = cfg.eval_resolution > 0 ? cfg.eval_resolution : (n <= 2 ? 801 : 101);
    const int Rp = cfg.polish_resolution > 0 ? cfg.polish_resolution : (n <= 2 ? 301 : 61);
    const GridProblem fine = build_grid(dists, Rf);
    const GridProblem pg = build_grid(dists, Rp);

    VectorXd hiv(n);
    for (int j = 0; j < n; ++j) hiv(j) = dists[size_t(j)]->support_hi();

    double best_rev = -std::numeric_limits<double>::infinity();
    TrainResult best;
    for (int s = 0; s < cfg.restarts; ++s) {
        TrainResult tr = train_once(dists, menu_size, cfg, cfg.seed + std::uint64_t(s), s == 0);
        polish_prices(tr.Q, tr.pr, hiv, pg, perms, cfg);
        const double rev = evaluate_mechanism(expand_orbits(tr.Q, tr.pr, perms), fine).revenue;
        if (cfg.verbose)
            std::fprintf(stderr, "solve_menu restart %d: revenue %.9f\n", s, rev);
        if (rev > best_rev) {
            best_rev = rev;
            best = std::move(tr);
        }
    }
    return dedupe(expand_orbits(best.Q, best.pr, perms));
}

MenuMechanism menu_from_lp(const LpSolution& sol) {
    MenuMechanism m;
    m.n = int(sol.alloc.cols());
    const int T = int(sol.alloc.rows());
    m.options.reserve(static_cast<size_t>(T));
    for (int t = 0; t < T; ++t)
        m.options.push_back({sol.alloc.row(t).transpose(), sol.pay(t)});
    return m;
}

Heatmap allocation_heatmap(const LpSolution& sol, const GridProblem& grid, int item,
                           const std::map<int, double>& slice) {
    if (int(sol.alloc.rows()) != grid.type_count())
        throw std::invalid_argument("allocation_heatmap: solution does not match grid");
    return slice_heatmap(grid, item, slice,
                         [&](int flat) { return sol.alloc(flat, item); });
}

Heatmap allocation_heatmap(const MenuMechanism& menu, const GridProblem& grid, int item,
                           const std::map<int, double>& slice) {
    const MechanismEval ev = evaluate_mechanism(menu, grid);
    return slice_heatmap(grid, item, slice, [&](int flat) {
        const int k = ev.allocation_map[size_t(flat)];
        return k >= 0 ? menu.options[size_t(k)].q(item) : 0.0;
    });
}

} // namespace udm
