#include "udm/checks.hpp"
#include "udm/errors.hpp"
#include "udm/numerics.hpp"

#include <json.hpp>

#include <cmath>
#include <stdexcept>

namespace udm {

const char* condition_name_str(ConditionName c) {
    switch (c) {
        case ConditionName::scale: return "scale";
        case ConditionName::quantile_scaled: return "quantile_scaled";
        case ConditionName::elasticity: return "elasticity";
        case ConditionName::stochastic_relative_values: return "stochastic_relative_values";
    }
    return "?";
}

std::string MonotonicityReport::to_json() const {
    nlohmann::json j;
    j["condition_name"] = condition_name_str(condition_name);
    j["passed"] = passed;
    j["worst_violation"] = worst_violation;
    if (witness_present)
        j["witness"] = {{witness[0], witness[1]}, {witness[2], witness[3]}};
    else
        j["witness"] = nlohmann::json::array();
    j["grid_resolution"] = grid_resolution;
    return j.dump();
}

// F(a)/F(b) via log cdf; 0 when a is below the support.
static double cdf_ratio(const Cdf& F, double a, double b) {
    if (a <= F.support_lo()) return 0.0;
    double la = F.log_cdf(a), lb = F.log_cdf(b);
    if (!std::isfinite(la) || !std::isfinite(lb))
        throw invalid_distribution("non-finite CDF ratio");
    return std::exp(la - lb);
}

MonotonicityReport scale_monotone_check(const Cdf& F, int omega_grid, int x_grid, double tol) {
    if (omega_grid < 16 || x_grid < 16)
        throw std::invalid_argument("scale_monotone_check: grids must be >= 16");
    validate_cdf(F);
    double lo = F.support_lo(), hi = F.support_hi();
    double omega_lo = lo / hi; // degenerates to 0 when lo = 0

    MonotonicityReport rep;
    rep.condition_name = ConditionName::scale;
    rep.grid_resolution = x_grid;

    for (int i = 0; i < omega_grid; ++i) {
        double omega = omega_lo + (1.0 - omega_lo) * (i + 0.5) / omega_grid;
        double x_min = lo / omega;
        if (x_min >= hi) continue;
        double prev = 0.0;
        double prev_x = 0.0;
        for (int k = 0; k < x_grid; ++k) {
            double x = x_min + (hi - x_min) * (k + 1) / x_grid; // half-open (x_min, hi]
            double r = cdf_ratio(F, omega * x, x);
            if (k > 0) {
                double inc = r - prev;
                if (inc > rep.worst_violation) {
                    rep.worst_violation = inc;
                    rep.witness = {omega, prev_x, omega, x};
                    rep.witness_present = true;
                }
            }
            prev = r;
            prev_x = x;
        }
    }
    rep.passed = rep.worst_violation <= tol;
    if (rep.passed) {
        rep.witness = {};
        rep.witness_present = false;
    }
    return rep;
}

// solve F(omega y)/F(y) = target for omega in (lo/y, 1); the ratio is 0 at the
// left end and 1 at omega = 1, so the bracket is guaranteed for target in (0,1)
static double solve_omega(const Cdf& F, double y, double target) {
    double lo_end = F.support_lo() / y;
    auto g = [&](double w) { return cdf_ratio(F, w * y, y) - target; };
    RootResult r = bisect(g, lo_end, 1.0, 1e-12, 200);
    return r.x;
}

MonotonicityReport quantile_scaled_check(const Cdf& F, int q_grid, int y_grid, double tol) {
    if (q_grid < 16 || y_grid < 16)
        throw std::invalid_argument("quantile_scaled_check: grids must be >= 16");
    validate_cdf(F);
    double lo = F.support_lo(), hi = F.support_hi();

    MonotonicityReport rep;
    rep.condition_name = ConditionName::quantile_scaled;
    rep.grid_resolution = y_grid;

    for (int i = 0; i < q_grid; ++i) {
        double q = (i + 0.5) / q_grid;
        double prev_omega = 0.0, prev_y = 0.0;
        for (int k = 0; k < y_grid; ++k) {
            double y = lo + (hi - lo) * (k + 1) / y_grid;
            double omega = solve_omega(F, y, q);
            if (k > 0) {
                double dec = prev_omega - omega;
                if (dec > rep.worst_violation) {
                    rep.worst_violation = dec;
                    rep.witness = {q, prev_y, q, y};
                    rep.witness_present = true;
                }
            }
            prev_omega = omega;
            prev_y = y;
        }
    }
    rep.passed = rep.worst_violation <= tol;
    if (rep.passed) {
        rep.witness = {};
        rep.witness_present = false;
    }
    return rep;
}

MonotonicityReport monotone_elasticity_check(const Cdf& F, int grid, double tol) {
    if (grid < 16)
        throw std::invalid_argument("monotone_elasticity_check: grid must be >= 16");
    double lo = F.support_lo(), hi = F.support_hi();
    double h = (hi - lo) * 1e-6;

    MonotonicityReport rep;
    rep.condition_name = ConditionName::elasticity;
    rep.grid_resolution = grid;

    double prev = 0.0, prev_t = 0.0;
    for (int k = 1; k + 1 < grid; ++k) {
        double t = lo + (hi - lo) * k / grid;
        double f = F.pdf(t);
        if (!(f > 0.0))
            throw invalid_distribution("elasticity check: pdf <= 0 at grid point");
        double fp = (F.pdf(t + h) - F.pdf(t - h)) / (2.0 * h);
        double e = t * fp / f;
        if (k > 1) {
            double dec = prev - e;
            if (dec > rep.worst_violation) {
                rep.worst_violation = dec;
                rep.witness = {prev_t, prev, t, e};
                rep.witness_present = true;
            }
        }
        prev = e;
        prev_t = t;
    }
    rep.passed = rep.worst_violation <= tol;
    if (rep.passed) {
        rep.witness = {};
        rep.witness_present = false;
    }
    return rep;
}

double relative_value_conditional_cdf(const PowerScaledProduct& family,
                                      std::uint32_t b, double omega, double y) {
    std::uint32_t full = (family.n() >= 32) ? ~0u : ((1u << family.n()) - 1u);
    if (b == 0 || (b & full) == full)
        throw std::domain_error("relative_value_conditional_cdf: subset must be proper and non-empty");
    const Cdf& F = family.base();
    if (!(y > F.support_lo() && y < F.support_hi()))
        throw std::domain_error("relative_value_conditional_cdf: y outside open support");
    if (omega < 0.0 || omega > 1.0)
        throw std::domain_error("relative_value_conditional_cdf: omega outside [0,1]");
    if (omega == 1.0) return 1.0;
    double A = family.total_alpha();
    double Ab = family.subset_alpha(b);
    double Abbar = A - Ab;
    double ratio = (omega * y <= F.support_lo())
                       ? 0.0
                       : std::exp(F.log_cdf(omega * y) - F.log_cdf(y));
    return (Abbar / A) * std::pow(ratio, Ab);
}

MonotonicityReport stochastic_relative_values_check(const PowerScaledProduct& family,
                                                    int q_grid, int y_grid, double tol) {
    if (q_grid < 16 || y_grid < 16)
        throw std::invalid_argument("stochastic check: grids must be >= 16");
    const Cdf& F = family.base();
    validate_cdf(F);
    double lo = F.support_lo(), hi = F.support_hi();
    double A = family.total_alpha();
    int n = family.n();
    std::uint32_t full = (1u << n) - 1u;

    MonotonicityReport rep;
    rep.condition_name = ConditionName::stochastic_relative_values;
    rep.grid_resolution = y_grid;

    for (std::uint32_t b = 1; b < full; ++b) {
        double Ab = family.subset_alpha(b);
        double Abbar = A - Ab;
        for (int i = 0; i < q_grid; ++i) {
            // q-hat in (0, A_bbar/A): open at 0 where the equation degenerates
            double qhat = (Abbar / A) * (i + 0.5) / q_grid;
            double target = std::pow((A / Abbar) * qhat, 1.0 / Ab);
            double prev_omega = 0.0, prev_y = 0.0;
            for (int k = 0; k < y_grid; ++k) {
                double y = lo + (hi - lo) * (k + 1) / y_grid;
                double omega = solve_omega(F, y, target);
                if (k > 0) {
                    double dec = prev_omega - omega;
                    if (dec > rep.worst_violation) {
                        rep.worst_violation = dec;
                        rep.witness = {qhat, prev_y, qhat, y};
                        rep.witness_present = true;
                    }
                }
                prev_omega = omega;
                prev_y = y;
            }
        }
    }
    rep.passed = rep.worst_violation <= tol;
    if (rep.passed) {
        rep.witness = {};
        rep.witness_present = false;
    }
    return rep;
}

} // namespace udm
