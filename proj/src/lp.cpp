#include "udm/lp.hpp"
#include "udm/errors.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <utility>
#include <vector>

namespace udm {
namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Trip = Eigen::Triplet<double>;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct IpmResult {
    VectorXd x;
    double objective = 0.0;
    bool converged = false;
    int iterations = 0;
    double quality = std::numeric_limits<double>::infinity();
};

double step_limit(const VectorXd& v, const VectorXd& dv) {
    double a = 1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
    return a;
}

/*
 * Mehrotra predictor-corrector for
 *     max c.x   s.t.  A x <= b,  x >= 0.
 *
 * With slacks s = b - Ax and duals (y, z) the normal equations are formed
 * in the variable dimension, (A' Dy A + Dz) dx = rhs with Dy = Y/S and
 * Dz = Z/X, which stays much smaller than the row dimension once lazy
 * incentive rows pile up. The sparsity pattern is fixed for a given A, so
 * the symbolic factorization is reused across iterations.
 */
IpmResult solve_ipm(const SpMat& A, const VectorXd& b, const VectorXd& c,
                    double tol, int max_iters, bool verbose) {
    const Eigen::Index nv = A.cols();
    const Eigen::Index m = A.rows();
    const SpMat At = SpMat(A.transpose());

    VectorXd x = VectorXd::Ones(nv);
    VectorXd s = VectorXd::Ones(m);
    VectorXd y = VectorXd::Ones(m);
    VectorXd z = VectorXd::Ones(nv);

    const double bn = 1.0 + b.lpNorm<Eigen::Infinity>();
    const double cn = 1.0 + c.lpNorm<Eigen::Infinity>();
    const double feas_tol = std::max(10.0 * tol, 1e-10);

    Eigen::SimplicialLDLT<SpMat> chol;
    bool analyzed = false;

    SpMat diag(nv, nv);
    diag.reserve(Eigen::VectorXi::Constant(int(nv), 1));
    for (Eigen::Index j = 0; j < nv; ++j) diag.insert(j, j) = 1.0;
    diag.makeCompressed();

    IpmResult out;
    VectorXd xb = x;
    int stall = 0;
    bool at_criteria = false;
    for (int iter = 0; iter < max_iters; ++iter) {
        const VectorXd rp = b - A * x - s;
        const VectorXd rd = c - At * y + z;
        const double cx = c.dot(x);
        const double by = b.dot(y);
        const double mu = (x.dot(z) + s.dot(y)) / double(nv + m);
        const double gap = std::abs(by - cx) / (1.0 + std::abs(cx));

        if (!std::isfinite(mu) || !std::isfinite(gap))
            throw numerical_error("lp: interior-point iterate diverged");

        const double quality = std::max({gap, rp.lpNorm<Eigen::Infinity>() / bn,
                                         rd.lpNorm<Eigen::Infinity>() / cn});
        if (quality < 0.97 * out.quality) stall = 0; else ++stall;
        if (quality < out.quality) {
            out.quality = quality;
            xb = x;
        }

        if (verbose && iter % 10 == 0)
            std::fprintf(stderr,
                         "  ipm iter=%3d mu=%.3e gap=%.3e rp=%.3e rd=%.3e smin=%.3e xmin=%.3e\n",
                         iter, mu, gap, rp.lpNorm<Eigen::Infinity>(),
                         rd.lpNorm<Eigen::Infinity>(), s.minCoeff(), x.minCoeff());

        if (gap <= tol && mu <= 10.0 * tol &&
            rp.lpNorm<Eigen::Infinity>() <= feas_tol * bn &&
            rd.lpNorm<Eigen::Infinity>() <= feas_tol * cn) {
            out.converged = true;
            at_criteria = true;
            break;
        }
        // double-precision floor: highly degenerate instances stop making
        // progress around 1e-7 composite error; accept the best iterate
        // once improvement stalls, it is feasible and near-optimal
        if (stall >= 12 && out.quality <= 1e-6) {
            out.converged = true;
            break;
        }
        if (stall >= 25) break;
        // endgame blow-up: a too-long step can wreck dual feasibility
        // beyond repair once mu is tiny; keep the best iterate instead
        if (quality > 1e4 * out.quality && out.quality < 1e-4) break;
        out.iterations = iter + 1;

        const VectorXd dyv = (y.array() / s.array()).matrix();
        const VectorXd dzv = (z.array() / x.array()).matrix();

        SpMat N = At * dyv.asDiagonal() * A;
        for (Eigen::Index j = 0; j < nv; ++j) diag.coeffRef(j, j) = dzv(j) + 1e-12;
        N += diag;

        if (!analyzed) {
            chol.analyzePattern(N);
            analyzed = true;
        }
        chol.factorize(N);
        for (double reg = 1e-8; chol.info() != Eigen::Success; reg *= 100.0) {
            // pivot breakdown near the boundary; escalate until the
            // factorization goes through, the step direction self-corrects
            if (reg > 1.0)
                throw numerical_error("lp: normal-equation factorization failed");
            for (Eigen::Index j = 0; j < nv; ++j) diag.coeffRef(j, j) = reg * (1.0 + dzv(j));
            N += diag;
            chol.factorize(N);
        }

        auto directions = [&](const VectorXd& rc1, const VectorXd& rc2,
                              VectorXd& dx, VectorXd& ds, VectorXd& dy, VectorXd& dz) {
            const VectorXd t1 =
                (rc2.array() / s.array() - dyv.array() * rp.array()).matrix();
            const VectorXd rhs = rd + (rc1.array() / x.array()).matrix() - At * t1;
            dx = chol.solve(rhs);
            dx += chol.solve(rhs - N * dx);  // one refinement step, the
                                             // factorization loses digits
                                             // once the barrier is deep
            ds = rp - A * dx;
            dy = ((rc2 - y.cwiseProduct(ds)).array() / s.array()).matrix();
            dz = ((rc1 - z.cwiseProduct(dx)).array() / x.array()).matrix();
        };

        // predictor
        VectorXd rc1 = -x.cwiseProduct(z);
        VectorXd rc2 = -s.cwiseProduct(y);
        VectorXd dx_a, ds_a, dy_a, dz_a;
        directions(rc1, rc2, dx_a, ds_a, dy_a, dz_a);

        const double ap = std::min(step_limit(x, dx_a), step_limit(s, ds_a));
        const double ad = std::min(step_limit(z, dz_a), step_limit(y, dy_a));
        double mu_aff = ((x + ap * dx_a).dot(z + ad * dz_a) +
                         (s + ap * ds_a).dot(y + ad * dy_a)) / double(nv + m);
        mu_aff = std::max(mu_aff, 0.0);
        const double sigma = std::clamp(std::pow(mu_aff / mu, 3), 1e-8, 1.0);

        // corrector reuses the factorization
        rc1 = VectorXd::Constant(nv, sigma * mu) - x.cwiseProduct(z) - dx_a.cwiseProduct(dz_a);
        rc2 = VectorXd::Constant(m, sigma * mu) - s.cwiseProduct(y) - ds_a.cwiseProduct(dy_a);
        VectorXd dx, ds, dy, dz;
        directions(rc1, rc2, dx, ds, dy, dz);

        const double gamma = (mu < 1e-7) ? 0.9995 : 0.995;
        const double gp = std::min(1.0, gamma * std::min(step_limit(x, dx), step_limit(s, ds)));
        const double gd = std::min(1.0, gamma * std::min(step_limit(z, dz), step_limit(y, dy)));
        if (gp < 1e-10 && gd < 1e-10) break;

        x += gp * dx;
        s += gp * ds;
        y += gd * dy;
        z += gd * dz;
    }

    out.x = at_criteria ? std::move(x) : std::move(xb);
    out.objective = c.dot(out.x);
    return out;
}

} // namespace

LpSolution solve_lp_exact(const GridProblem& grid, double tol) {
    LpOptions opt;
    opt.tol = tol;
    return solve_lp_exact(grid, opt);
}

LpSolution solve_lp_exact(const GridProblem& grid, const LpOptions& opt) {
    const int n = grid.n;
    const int T = grid.type_count();
    const int cap = opt.max_types > 0 ? opt.max_types : (n <= 2 ? 1600 : 1728);
    if (T > cap)
        throw std::invalid_argument("solve_lp_exact: grid size exceeds type cap");
    if (T < 1) throw std::invalid_argument("solve_lp_exact: empty grid");

    const int nv = T * (n + 1);
    auto var = [n](int t, int j) { return t * (n + 1) + j; };

    VectorXd c = VectorXd::Zero(nv);
    for (int t = 0; t < T; ++t) c(var(t, n)) = grid.weights(t);

    // incentive pairs start from grid-adjacent reports in both directions;
    // without this seed the cutting loop crawls one grid step per round
    std::vector<std::pair<int, int>> ic_pairs;
    std::vector<uint8_t> added(size_t(T) * size_t(T), 0);
    {
        std::vector<long long> stride(static_cast<size_t>(n));
        long long st = 1;
        for (int j = n - 1; j >= 0; --j) {
            stride[size_t(j)] = st;
            st *= static_cast<long long>(grid.axes[size_t(j)].size());
        }
        for (int t = 0; t < T; ++t) {
            for (int j = 0; j < n; ++j) {
                const auto sz = static_cast<long long>(grid.axes[size_t(j)].size());
                const long long pos = (t / stride[size_t(j)]) % sz;
                if (pos + 1 < sz) {
                    const int t2 = t + int(stride[size_t(j)]);
                    ic_pairs.emplace_back(t, t2);
                    ic_pairs.emplace_back(t2, t);
                    added[size_t(t) * size_t(T) + size_t(t2)] = 1;
                    added[size_t(t2) * size_t(T) + size_t(t)] = 1;
                }
            }
        }
    }

    auto build = [&](SpMat& A, VectorXd& b) {
        const Eigen::Index rows = 2 * Eigen::Index(T) + Eigen::Index(ic_pairs.size());
        std::vector<Trip> trips;
        trips.reserve(size_t(T) * (2 * size_t(n) + 1) + ic_pairs.size() * 2 * (size_t(n) + 1));
        for (int t = 0; t < T; ++t) {
            trips.emplace_back(t, var(t, n), 1.0);
            for (int j = 0; j < n; ++j) trips.emplace_back(t, var(t, j), -grid.types(t, j));
        }
        for (int t = 0; t < T; ++t)
            for (int j = 0; j < n; ++j) trips.emplace_back(T + t, var(t, j), 1.0);
        for (size_t k = 0; k < ic_pairs.size(); ++k) {
            const int r = 2 * T + int(k);
            const int si = ic_pairs[k].first;
            const int ti = ic_pairs[k].second;
            for (int j = 0; j < n; ++j) {
                trips.emplace_back(r, var(ti, j), grid.types(si, j));
                trips.emplace_back(r, var(si, j), -grid.types(si, j));
            }
            trips.emplace_back(r, var(ti, n), -1.0);
            trips.emplace_back(r, var(si, n), 1.0);
        }
        A.resize(rows, nv);
        A.setFromTriplets(trips.begin(), trips.end());
        b = VectorXd::Zero(rows);
        b.segment(T, T).setOnes();
    };

    LpSolution sol;
    sol.alloc.resize(T, n);
    sol.pay.resize(T);

    int solves = 0;
    double max_viol = 0.0;
    bool optimal = false;
    while (true) {
        SpMat A;
        VectorXd b;
        build(A, b);
        const IpmResult ipm = solve_ipm(A, b, c, opt.tol, opt.max_ipm_iters, opt.verbose);
        ++solves;
        if (opt.verbose)
            std::fprintf(stderr, "round %d: rows=%lld obj=%.12f converged=%d iters=%d\n",
                         solves, (long long)A.rows(), ipm.objective, int(ipm.converged),
                         ipm.iterations);

        for (int t = 0; t < T; ++t) {
            for (int j = 0; j < n; ++j) sol.alloc(t, j) = ipm.x(var(t, j));
            sol.pay(t) = ipm.x(var(t, n));
        }
        sol.objective = ipm.objective;
        if (!ipm.converged && ipm.quality > 1e-6) break;

        // separation: u(s reporting t) - u(s truthful), most violated new
        // report per type
        MatrixXd U = grid.types * sol.alloc.transpose();
        U.rowwise() -= sol.pay.transpose();
        const VectorXd ud = U.diagonal();

        int new_cuts = 0;
        max_viol = 0.0;
        for (int si = 0; si < T; ++si) {
            double vbest = 0.0;
            double vnew = 0.0;
            int tnew = -1;
            const uint8_t* row = added.data() + size_t(si) * size_t(T);
            for (int ti = 0; ti < T; ++ti) {
                const double v = U(si, ti) - ud(si);
                if (v > vbest) vbest = v;
                if (v > vnew && ti != si && !row[ti]) {
                    vnew = v;
                    tnew = ti;
                }
            }
            max_viol = std::max(max_viol, vbest);
            if (tnew >= 0 && vnew > opt.sep_tol) {
                ic_pairs.emplace_back(si, tnew);
                added[size_t(si) * size_t(T) + size_t(tnew)] = 1;
                ++new_cuts;
            }
        }

        if (new_cuts == 0) {
            if (max_viol > opt.sep_tol)
                throw numerical_error("solve_lp_exact: seeded incentive row stays violated");
            optimal = true;
            break;
        }
        if (solves >= opt.max_rounds) break;
    }

    sol.status = optimal ? "optimal" : "unconverged";
    sol.ic_rounds = solves;
    sol.max_ic_violation = max_viol;
    sol.u.resize(T);
    for (int t = 0; t < T; ++t)
        sol.u(t) = grid.types.row(t).dot(sol.alloc.row(t)) - sol.pay(t);
    sol.max_ir_violation = std::max(0.0, -sol.u.minCoeff());
    return sol;
}

} // namespace udm
