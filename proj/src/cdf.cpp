#include "udm/cdf.hpp"
#include "udm/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>

namespace udm {

double Cdf::log_cdf(double x) const {
    double v = cdf(x);
    return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
}

UniformShiftCdf::UniformShiftCdf(double c) : c_(c) {
    if (!(c >= 0.0) || !std::isfinite(c))
        throw invalid_distribution("uniform_shift: c must be finite and >= 0");
}

double UniformShiftCdf::cdf(double x) const {
    if (x <= c_) return 0.0;
    if (x >= c_ + 1.0) return 1.0;
    return x - c_;
}

double UniformShiftCdf::pdf(double x) const {
    return (x > c_ && x < c_ + 1.0) ? 1.0 : 0.0;
}

double UniformShiftCdf::quantile(double q) const {
    return c_ + std::clamp(q, 0.0, 1.0);
}

std::string UniformShiftCdf::describe() const {
    std::ostringstream os;
    os << "U[" << c_ << "," << c_ + 1.0 << "]";
    return os.str();
}

PowerCdf::PowerCdf(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw invalid_distribution("power: alpha must be finite and > 0");
}

double PowerCdf::cdf(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return std::pow(x, alpha_);
}

double PowerCdf::pdf(double x) const {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return alpha_ * std::pow(x, alpha_ - 1.0);
}

double PowerCdf::quantile(double q) const {
    return std::pow(std::clamp(q, 0.0, 1.0), 1.0 / alpha_);
}

double PowerCdf::log_cdf(double x) const {
    if (x <= 0.0) return -std::numeric_limits<double>::infinity();
    if (x >= 1.0) return 0.0;
    return alpha_ * std::log(x);
}

std::string PowerCdf::describe() const {
    std::ostringstream os;
    os << "x^" << alpha_ << " on [0,1]";
    return os.str();
}

TruncatedExponentialCdf::TruncatedExponentialCdf(double rate, double lo, double hi)
    : rate_(rate), lo_(lo), hi_(hi) {
    if (!(rate != 0.0) || !std::isfinite(rate) || !(lo >= 0.0) || !(hi > lo))
        throw invalid_distribution("trunc_exp: need finite rate != 0, 0 <= lo < hi");
    norm_ = -std::expm1(-rate_ * (hi_ - lo_)); // 1 - e^{-rate (hi-lo)}
}

double TruncatedExponentialCdf::cdf(double x) const {
    if (x <= lo_) return 0.0;
    if (x >= hi_) return 1.0;
    return -std::expm1(-rate_ * (x - lo_)) / norm_;
}

double TruncatedExponentialCdf::pdf(double x) const {
    if (x <= lo_ || x >= hi_) return 0.0;
    return rate_ * std::exp(-rate_ * (x - lo_)) / norm_;
}

double TruncatedExponentialCdf::quantile(double q) const {
    q = std::clamp(q, 0.0, 1.0);
    return lo_ - std::log1p(-q * norm_) / rate_;
}

std::string TruncatedExponentialCdf::describe() const {
    std::ostringstream os;
    os << "Exp(" << rate_ << ") on [" << lo_ << "," << hi_ << "]";
    return os.str();
}

TableCdf::TableCdf(std::vector<double> xs, std::vector<double> fs)
    : xs_(std::move(xs)), fs_(std::move(fs)) {
    if (xs_.size() != fs_.size() || xs_.size() < 2)
        throw invalid_distribution("table: need matching x/F arrays, length >= 2");
    if (xs_.front() < 0.0)
        throw invalid_distribution("table: support must be nonnegative");
    for (size_t i = 0; i < xs_.size(); ++i) {
        if (!std::isfinite(xs_[i]) || !std::isfinite(fs_[i]))
            throw invalid_distribution("table: non-finite entry");
        if (i > 0 && !(xs_[i] > xs_[i - 1]))
            throw invalid_distribution("table: x must be strictly increasing");
        if (i > 0 && !(fs_[i] > fs_[i - 1]))
            throw invalid_distribution("table: F must be strictly increasing");
    }
    // renormalize to [0, 1]
    double f0 = fs_.front(), f1 = fs_.back();
    for (auto& v : fs_) v = (v - f0) / (f1 - f0);
}

double TableCdf::cdf(double x) const {
    if (x <= xs_.front()) return 0.0;
    if (x >= xs_.back()) return 1.0;
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    size_t i = size_t(it - xs_.begin());
    double t = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
    return fs_[i - 1] + t * (fs_[i] - fs_[i - 1]);
}

double TableCdf::pdf(double x) const {
    if (x <= xs_.front() || x >= xs_.back()) return 0.0;
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    size_t i = size_t(it - xs_.begin());
    return (fs_[i] - fs_[i - 1]) / (xs_[i] - xs_[i - 1]);
}

double TableCdf::quantile(double q) const {
    q = std::clamp(q, 0.0, 1.0);
    auto it = std::upper_bound(fs_.begin(), fs_.end(), q);
    if (it == fs_.begin()) return xs_.front();
    if (it == fs_.end()) return xs_.back();
    size_t i = size_t(it - fs_.begin());
    double t = (q - fs_[i - 1]) / (fs_[i] - fs_[i - 1]);
    return xs_[i - 1] + t * (xs_[i] - xs_[i - 1]);
}

std::string TableCdf::describe() const {
    std::ostringstream os;
    os << "table[" << xs_.size() << " pts] on [" << xs_.front() << "," << xs_.back() << "]";
    return os.str();
}

void validate_cdf(const Cdf& f, int grid, double tol) {
    double lo = f.support_lo(), hi = f.support_hi();
    if (!(lo >= 0.0) || !(hi > lo))
        throw invalid_distribution("support must satisfy 0 <= lo < hi");
    if (std::abs(f.cdf(lo)) > tol || std::abs(f.cdf(hi) - 1.0) > tol)
        throw invalid_distribution("cdf endpoints must be 0 and 1");
    double prev = 0.0;
    for (int i = 1; i < grid; ++i) {
        double x = lo + (hi - lo) * i / grid;
        double v = f.cdf(x);
        if (!std::isfinite(v)) throw invalid_distribution("non-finite cdf value");
        if (v + tol < prev) throw invalid_distribution("cdf decreases");
        prev = v;
        if (!(f.pdf(x) > 0.0))
            throw invalid_distribution("pdf must be positive on the open support");
        double back = f.quantile(v);
        if (std::abs(back - x) > tol * (1.0 + std::abs(x)))
            throw invalid_distribution("quantile(cdf(x)) != x");
    }
}

PowerScaledProduct::PowerScaledProduct(std::shared_ptr<const Cdf> base,
                                       std::vector<double> alphas)
    : base_(std::move(base)), alphas_(std::move(alphas)) {
    if (!base_) throw invalid_distribution("family: null base");
    if (alphas_.empty()) throw invalid_distribution("family: need at least one item");
    total_ = 0.0;
    for (double a : alphas_) {
        if (!(a > 0.0) || !std::isfinite(a))
            throw invalid_distribution("family: every alpha must be > 0");
        total_ += a;
    }
}

double PowerScaledProduct::subset_alpha(std::uint32_t mask) const {
    double s = 0.0;
    for (int j = 0; j < n(); ++j)
        if (mask & (1u << j)) s += alphas_[size_t(j)];
    return s;
}

double PowerScaledProduct::item_cdf(int j, double x) const {
    assert(j >= 0 && j < n());
    return std::pow(base_->cdf(x), alphas_[size_t(j)]);
}

double PowerScaledProduct::item_pdf(int j, double x) const {
    assert(j >= 0 && j < n());
    double a = alphas_[size_t(j)];
    double F = base_->cdf(x);
    if (F <= 0.0) return 0.0;
    return a * std::pow(F, a - 1.0) * base_->pdf(x);
}

std::shared_ptr<Cdf> cdf_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw schema_error(std::string("distribution spec: ") + e.what());
    }
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw schema_error("distribution spec: need object with string 'kind'");
    std::string kind = j["kind"];
    auto require_only = [&](std::initializer_list<const char*> keys) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (it.key() == "kind") continue;
            bool known = false;
            for (const char* k : keys)
                if (it.key() == k) known = true;
            if (!known)
                throw schema_error("distribution spec: unknown field '" + it.key() + "'");
        }
        for (const char* k : keys)
            if (!j.contains(k))
                throw schema_error(std::string("distribution spec: missing field '") + k + "'");
    };
    if (kind == "uniform_shift") {
        require_only({"c"});
        if (!j["c"].is_number()) throw schema_error("uniform_shift: 'c' must be a number");
        return std::make_shared<UniformShiftCdf>(j["c"].get<double>());
    }
    if (kind == "power") {
        require_only({"alpha"});
        if (!j["alpha"].is_number()) throw schema_error("power: 'alpha' must be a number");
        return std::make_shared<PowerCdf>(j["alpha"].get<double>());
    }
    if (kind == "table") {
        require_only({"x", "F"});
        if (!j["x"].is_array() || !j["F"].is_array())
            throw schema_error("table: 'x' and 'F' must be arrays");
        std::vector<double> xs, fs;
        for (const auto& v : j["x"]) xs.push_back(v.get<double>());
        for (const auto& v : j["F"]) fs.push_back(v.get<double>());
        return std::make_shared<TableCdf>(std::move(xs), std::move(fs));
    }
    throw schema_error("distribution spec: unknown kind '" + kind + "'");
}

} // namespace udm
