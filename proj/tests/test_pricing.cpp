#include <doctest.h>

#include "udm/cdf.hpp"
#include "udm/errors.hpp"
#include "udm/pricing.hpp"

#include <cmath>

using namespace udm;

TEST_CASE("threshold_c_star: two items give exactly one") {
    auto r = threshold_c_star(2);
    CHECK(r.n == 2);
    CHECK(std::abs(r.c_star - 1.0) < 1e-10);
    CHECK(std::abs(r.residual) < 1e-9);
    CHECK(r.bracket_lo < r.c_star);
    CHECK(r.bracket_hi > r.c_star);
}

TEST_CASE("threshold_c_star: three items give (11 - sqrt(33)) / 4") {
    auto r = threshold_c_star(3);
    CHECK(std::abs(r.c_star - (11.0 - std::sqrt(33.0)) / 4.0) < 1e-10);
}

TEST_CASE("threshold_c_star: frozen values for larger item counts") {
    CHECK(threshold_c_star(4).c_star == doctest::Approx(1.5698110563711125).epsilon(1e-9));
    CHECK(threshold_c_star(5).c_star == doctest::Approx(1.7858496542144402).epsilon(1e-9));
    CHECK(threshold_c_star(10).c_star == doctest::Approx(2.5369935131502603).epsilon(1e-9));
    CHECK(threshold_c_star(50).c_star == doctest::Approx(4.509731655599546).epsilon(1e-9));
}

TEST_CASE("threshold_c_star: fixed-point form agrees with the polynomial root") {
    for (int n : {2, 3, 4, 7, 12, 25, 50}) {
        auto r = threshold_c_star(n);
        UniformShiftCdf dist(r.c_star);
        double p = bundle_price(dist, n).price;
        double lhs = (n + 1) * (r.c_star + 1.0 - p);
        CHECK(std::abs(lhs - (r.c_star + 1.0)) <= 1e-8);
    }
}

TEST_CASE("threshold_c_star: rejects fewer than two items") {
    CHECK_THROWS_AS(threshold_c_star(1), std::invalid_argument);
    CHECK_THROWS_AS(threshold_c_star(0), std::invalid_argument);
}

TEST_CASE("threshold_table: strictly increasing and above log(n)/3") {
    auto table = threshold_table(50);
    REQUIRE(table.size() == 49);  // n = 2..50
    double prev = 0.0;
    for (size_t i = 0; i < table.size(); ++i) {
        int n = int(i) + 2;
        CHECK(table[i].n == n);
        CHECK(table[i].c_star > prev);
        CHECK(table[i].c_star > std::log(double(n)) / 3.0);
        prev = table[i].c_star;
    }
    CHECK(table[0].c_star == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("h_eval: vanishes at the optimal price and brackets it in sign") {
    const double p0 = std::pow(3.0, -0.5);
    CHECK(std::abs(h_eval(0.0, p0, 2)) < 1e-14);
    CHECK(h_eval(0.0, p0 - 0.1, 2) > 0.0);
    CHECK(h_eval(0.0, p0 + 0.1, 2) < 0.0);
    CHECK(h_eval(1.0, 4.0 / 3.0, 2) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("bundle_price: unit uniform closed form for n = 2..10") {
    UniformShiftCdf u(0.0);
    for (int n = 2; n <= 10; ++n) {
        auto r = bundle_price(u, n);
        CHECK(std::abs(r.price - std::pow(n + 1.0, -1.0 / n)) < 1e-10);
        CHECK(r.n == n);
        CHECK(r.c == doctest::Approx(0.0));
        CHECK(r.method == "bisection-h");
        CHECK(std::abs(r.residual) < 1e-10);
    }
}

TEST_CASE("bundle_price: frozen shifted-uniform prices for two items") {
    CHECK(bundle_price(UniformShiftCdf(0.5), 2).price ==
          doctest::Approx(0.9342585459106649).epsilon(1e-11));
    CHECK(bundle_price(UniformShiftCdf(1.0), 2).price ==
          doctest::Approx(4.0 / 3.0).epsilon(1e-11));
    CHECK(bundle_price(UniformShiftCdf(1.5), 2).price ==
          doctest::Approx(1.763762615825973).epsilon(1e-11));
}

TEST_CASE("bundle_price: revenue matches the closed form and the quadrature") {
    for (double c : {0.0, 0.5, 1.5}) {
        UniformShiftCdf dist(c);
        auto r = bundle_price(dist, 2);
        CHECK(r.revenue == doctest::Approx(uniform_revenue(c, r.price, 2)).epsilon(1e-12));
        CHECK(r.revenue ==
              doctest::Approx(uniform_revenue_quadrature(dist, r.price, 2)).epsilon(1e-10));
    }
}

TEST_CASE("bundle_price: frozen two-item revenues") {
    CHECK(bundle_price(UniformShiftCdf(0.0), 2).revenue ==
          doctest::Approx(0.3849001794597505).epsilon(1e-11));
    CHECK(bundle_price(UniformShiftCdf(0.5), 2).revenue ==
          doctest::Approx(0.7580756164910357).epsilon(1e-11));
    CHECK(bundle_price(UniformShiftCdf(1.5), 2).revenue ==
          doctest::Approx(1.6410563851303022).epsilon(1e-11));
}

TEST_CASE("bundle_price: general distributions go through the search path") {
    PowerCdf f(2.0);
    auto r = bundle_price(f, 2);
    CHECK(r.method == "golden-newton");
    CHECK(std::isnan(r.c));
    CHECK(r.price > 0.0);
    CHECK(r.price < 1.0);
    // interior stationarity: d/dq of q (1 - q^(2*2)) has root (1/5)^(1/4)
    CHECK(r.price == doctest::Approx(std::pow(0.2, 0.25)).epsilon(1e-9));
    CHECK(r.revenue == doctest::Approx(r.price * (1.0 - std::pow(r.price, 4.0))).epsilon(1e-10));
}

TEST_CASE("bundle_price: power distribution revenue is maximal at the reported price") {
    PowerCdf f(0.7);
    auto r = bundle_price(f, 3);
    auto revenue_at = [&](double q) { return q * (1.0 - std::pow(f.cdf(q), 3.0)); };
    double best = r.revenue;
    for (double q = 0.02; q < 1.0; q += 0.02) CHECK(revenue_at(q) <= best + 1e-9);
}

TEST_CASE("bundle_price: argument validation") {
    UniformShiftCdf u(0.0);
    CHECK_THROWS_AS(bundle_price(u, 0), std::invalid_argument);
    CHECK_THROWS_AS(bundle_price(u, -3), std::invalid_argument);
}

TEST_CASE("p_prime: matches a finite difference of the implicit price curve") {
    for (double c : {0.0, 0.7, 1.8}) {
        const double h = 1e-6;
        double p = bundle_price(UniformShiftCdf(c), 2).price;
        double pl = bundle_price(UniformShiftCdf(c - h > 0 ? c - h : 0.0), 2).price;
        double ph = bundle_price(UniformShiftCdf(c + h), 2).price;
        double fd = (ph - pl) / (c - h > 0 ? 2.0 * h : h);
        CHECK(p_prime(c, p, 2) == doctest::Approx(fd).epsilon(1e-4));
    }
}

TEST_CASE("uniform_pricing_optimal: verdict flips exactly at the threshold") {
    for (int n : {2, 3, 4}) {
        double cs = threshold_c_star(n).c_star;
        auto below = uniform_pricing_optimal(cs - 1e-4, n);
        auto above = uniform_pricing_optimal(cs + 1e-4, n);
        CHECK(below.uniform_pricing_optimal);
        CHECK(!above.uniform_pricing_optimal);
        CHECK(below.margin > 0.0);
        CHECK(above.margin < 0.0);
        CHECK(below.n == n);
        CHECK(below.c == doctest::Approx(cs - 1e-4));
    }
}

TEST_CASE("uniform_pricing_optimal: boundary counts as optimal") {
    double cs = threshold_c_star(2).c_star;
    CHECK(uniform_pricing_optimal(cs, 2).uniform_pricing_optimal);
    CHECK(uniform_pricing_optimal(0.0, 2).uniform_pricing_optimal);
}

TEST_CASE("uniform_revenue: closed form sanity") {
    CHECK(uniform_revenue(0.0, 0.5, 2) == doctest::Approx(0.5 * (1.0 - 0.25)));
    CHECK(uniform_revenue(1.0, 2.0, 2) == doctest::Approx(2.0 * (1.0 - 1.0)));
    CHECK(uniform_revenue(1.0, 1.0, 3) == doctest::Approx(1.0));
}

TEST_CASE("uniform_revenue_quadrature: agrees with the closed form off-optimum") {
    UniformShiftCdf dist(0.5);
    for (double p : {0.6, 0.9, 1.2}) {
        CHECK(uniform_revenue_quadrature(dist, p, 2) ==
              doctest::Approx(uniform_revenue(0.5, p, 2)).epsilon(1e-12));
    }
    PowerCdf pw(2.0);
    // p * (1 - F(p)^(2n)) for the power family
    CHECK(uniform_revenue_quadrature(pw, 0.5, 2) ==
          doctest::Approx(0.5 * (1.0 - std::pow(0.25, 2.0))).epsilon(1e-10));
}
