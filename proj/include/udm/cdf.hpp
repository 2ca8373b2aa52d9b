#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace udm {

/** One-dimensional value distribution on a bounded support [lo, hi], lo >= 0,
 *  with continuous strictly increasing CDF and positive interior density.
 *  Implementations must satisfy cdf(lo)=0, cdf(hi)=1 and
 *  quantile(cdf(x)) = x for interior x (validated by validate_cdf). */
class Cdf {
public:
    virtual ~Cdf() = default;
    virtual double support_lo() const = 0;
    virtual double support_hi() const = 0;
    virtual double cdf(double x) const = 0;       // clamped to [0,1] outside support
    virtual double pdf(double x) const = 0;
    virtual double quantile(double q) const = 0;  // q in [0,1]
    // log F(x); overridable where a stable direct form exists. Ratios
    // F(a)/F(b) near the lower support endpoint go through this.
    virtual double log_cdf(double x) const;
    virtual std::string describe() const = 0;
};

// U[c, c+1]
class UniformShiftCdf : public Cdf {
public:
    explicit UniformShiftCdf(double c);
    double support_lo() const override { return c_; }
    double support_hi() const override { return c_ + 1.0; }
    double cdf(double x) const override;
    double pdf(double x) const override;
    double quantile(double q) const override;
    std::string describe() const override;
    double shift() const { return c_; }
private:
    double c_;
};

// F(x) = x^alpha on [0, 1]
class PowerCdf : public Cdf {
public:
    explicit PowerCdf(double alpha);
    double support_lo() const override { return 0.0; }
    double support_hi() const override { return 1.0; }
    double cdf(double x) const override;
    double pdf(double x) const override;
    double quantile(double q) const override;
    double log_cdf(double x) const override;
    std::string describe() const override;
    double alpha() const { return alpha_; }
private:
    double alpha_;
};

// Exponential with the given rate, truncated and renormalized to [lo, hi].
class TruncatedExponentialCdf : public Cdf {
public:
    TruncatedExponentialCdf(double rate, double lo, double hi);
    double support_lo() const override { return lo_; }
    double support_hi() const override { return hi_; }
    double cdf(double x) const override;
    double pdf(double x) const override;
    double quantile(double q) const override;
    std::string describe() const override;
private:
    double rate_, lo_, hi_, norm_;
};

/** Piecewise-linear CDF through (x_i, F_i) control points. Values are
 *  validated (finite, x strictly increasing, F strictly increasing) and F is
 *  renormalized to span [0, 1]. Strict increase is required so the quantile
 *  is a true inverse. */
class TableCdf : public Cdf {
public:
    TableCdf(std::vector<double> xs, std::vector<double> fs);
    double support_lo() const override { return xs_.front(); }
    double support_hi() const override { return xs_.back(); }
    double cdf(double x) const override;
    double pdf(double x) const override;
    double quantile(double q) const override;
    std::string describe() const override;
private:
    std::vector<double> xs_, fs_;
};

/** Checks the Cdf contract on a grid of `grid` interior points: endpoint
 *  values, monotonicity, positive density, quantile round-trip within tol.
 *  Throws invalid_distribution on the first violation. */
void validate_cdf(const Cdf& f, int grid = 256, double tol = 1e-7);

/** Item family with per-item CDF base^{alpha_j}. The max of the item values
 *  then has CDF base^{A} with A = sum alpha_j. */
class PowerScaledProduct {
public:
    PowerScaledProduct(std::shared_ptr<const Cdf> base, std::vector<double> alphas);
    int n() const { return int(alphas_.size()); }
    const Cdf& base() const { return *base_; }
    const std::vector<double>& alphas() const { return alphas_; }
    double total_alpha() const { return total_; }
    // sum of alphas over the subset encoded as a bitmask
    double subset_alpha(std::uint32_t mask) const;
    double complement_alpha(std::uint32_t mask) const { return total_ - subset_alpha(mask); }
    double item_cdf(int j, double x) const;
    double item_pdf(int j, double x) const;
private:
    std::shared_ptr<const Cdf> base_;
    std::vector<double> alphas_;
    double total_;
};

// Distribution spec from JSON text: {"kind": "uniform_shift"|"power"|"table", ...}.
// uniform_shift: {"c": real >= 0}; power: {"alpha": real > 0};
// table: {"x": [...], "F": [...]}. Unknown kinds or fields -> schema_error.
std::shared_ptr<Cdf> cdf_from_json(const std::string& text);

} // namespace udm
