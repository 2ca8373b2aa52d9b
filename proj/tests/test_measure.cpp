#include <doctest.h>

#include "udm/errors.hpp"
#include "udm/measure.hpp"
#include "udm/numerics.hpp"
#include "udm/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

using namespace udm;

TEST_CASE("make_transformed_measure: component masses cancel exactly") {
    for (int n : {1, 2, 3, 5}) {
        for (double c : {0.0, 0.5, 1.0, 2.5}) {
            auto tm = make_transformed_measure(n, c);
            CHECK(tm.total_mass() == 0.0);
            CHECK(tm.positive_mass() == doctest::Approx(1.0 + n * (c + 1.0)).epsilon(1e-15));
            CHECK(tm.negative_mass() == doctest::Approx((n + 1.0) + n * c).epsilon(1e-15));
            CHECK(tm.positive_mass() - tm.negative_mass() == doctest::Approx(0.0));
        }
    }
    CHECK_THROWS_AS(make_transformed_measure(0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(make_transformed_measure(2, -0.1), std::invalid_argument);
}

TEST_CASE("integrate_against_mu: constants integrate to zero") {
    QuadratureSpec spec;
    for (int n : {1, 2, 3}) {
        auto tm = make_transformed_measure(n, 0.75);
        double v = integrate_against_mu([](const std::vector<double>&) { return 1.0; },
                                        tm, spec);
        CHECK(std::abs(v) < 1e-12);
    }
}

TEST_CASE("integrate_against_mu: linear functions match the closed form") {
    QuadratureSpec spec;
    for (int n : {2, 3}) {
        for (double c : {0.0, 1.0}) {
            auto tm = make_transformed_measure(n, c);
            double v = integrate_against_mu(
                [](const std::vector<double>& x) { return x[0]; }, tm, spec);
            double expect = c                                     // point mass at the corner
                            - (n + 1.0) * (c + 0.5)               // volume
                            + (c + 1.0) * (c + 1.0)               // top face pinning x1
                            + (n - 1.0) * (c + 1.0) * (c + 0.5)   // remaining top faces
                            - c * c                               // bottom face pinning x1
                            - (n - 1.0) * c * (c + 0.5);          // remaining bottom faces
            CHECK(v == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("integrate_against_mu: posted-price surplus recovers posted revenue") {
    // the defining identity of the measure: integrating the buyer's surplus
    // u(x) = max(max_i x_i - p, 0) yields p * Pr[max >= p], at any price
    auto surplus_integral = [](int n, double c, double p) {
        auto tm = make_transformed_measure(n, c);
        QuadratureSpec spec;
        spec.breaks = {p};
        return integrate_against_mu(
            [&](const std::vector<double>& x) {
                double mx = *std::max_element(x.begin(), x.end());
                return std::max(mx - p, 0.0);
            },
            tm, spec);
    };
    for (int n : {1, 2, 3}) {
        for (double c : {0.0, 0.5, 1.0}) {
            double p = c + 0.6;
            double rhs = p * (1.0 - std::pow(p - c, n));
            CHECK(surplus_integral(n, c, p) == doctest::Approx(rhs).epsilon(1e-9));
        }
    }
    // and at the revenue-maximizing bundle price, where it equals the optimum
    for (int n : {2, 3}) {
        for (double c : {0.0, 0.5}) {
            auto res = bundle_price(UniformShiftCdf(c), n);
            CHECK(surplus_integral(n, c, res.price) ==
                  doctest::Approx(res.revenue).epsilon(1e-9));
        }
    }
}

TEST_CASE("integrate_against_mu: non-finite integrand values are rejected") {
    auto tm = make_transformed_measure(2, 0.0);
    QuadratureSpec spec;
    CHECK_THROWS_AS(integrate_against_mu(
                        [](const std::vector<double>&) {
                            return std::numeric_limits<double>::quiet_NaN();
                        },
                        tm, spec),
                    numerical_error);
}

TEST_CASE("make_region_geometry: price must separate the box interior") {
    CHECK_THROWS_AS(make_region_geometry(1, 0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(make_region_geometry(2, 0.5, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(make_region_geometry(2, 0.5, 1.5), std::invalid_argument);
    CHECK_NOTHROW(make_region_geometry(2, 0.5, 0.9));
}

TEST_CASE("RegionGeometry: membership predicates partition by the max coordinate") {
    auto g = make_region_geometry(2, 0.5, 0.9);

    CHECK(g.in_X({0.7, 1.2}));
    CHECK(!g.in_X({0.4, 1.0}));
    CHECK(!g.in_X({0.7, 1.6}));
    CHECK(!g.in_X({0.7}));

    CHECK(g.in_W({0.7, 1.2}));
    CHECK(!g.in_W({0.6, 0.8}));
    CHECK(!g.in_W({0.6, 0.9}));  // max exactly at the price belongs to Z

    CHECK(g.in_Z({0.6, 0.9}));
    CHECK(g.in_Z({0.6, 0.8}));
    CHECK(!g.in_Z({0.95, 0.6}));

    CHECK(g.in_B({1.5, 0.7}));
    CHECK(g.in_B({0.7, 1.5}));
    CHECK(!g.in_B({1.2, 0.7}));

    CHECK(g.in_B_Z({0.9, 0.6}));
    CHECK(!g.in_B_Z({0.6, 0.6}));
    CHECK(!g.in_B_Z({1.5, 0.9}));

    // W and Z cover X disjointly
    for (double a : {0.5, 0.7, 0.9, 1.1, 1.5}) {
        for (double b : {0.5, 0.8, 1.5}) {
            std::vector<double> x = {a, b};
            CHECK((g.in_W(x) != g.in_Z(x)));
        }
    }
}

TEST_CASE("RegionGeometry: argmax face ownership breaks ties to the lowest index") {
    auto g = make_region_geometry(2, 0.5, 0.9);
    CHECK(g.in_B_i({1.5, 0.7}, 0));
    CHECK(!g.in_B_i({1.5, 0.7}, 1));
    CHECK(g.in_B_i({0.7, 1.5}, 1));
    CHECK(!g.in_B_i({0.7, 1.5}, 0));
    CHECK(g.in_B_i({1.5, 1.5}, 0));
    CHECK(!g.in_B_i({1.5, 1.5}, 1));
    CHECK_THROWS_AS(g.in_B_i({1.5, 0.7}, 2), std::invalid_argument);
    CHECK_THROWS_AS(g.in_B_i({1.5, 0.7}, -1), std::invalid_argument);
}

TEST_CASE("RegionGeometry: sorted sector of the top boundary") {
    auto g = make_region_geometry(3, 0.0, 0.6);
    CHECK(g.in_D_n({1.0, 0.9, 0.7}));
    CHECK(g.in_D_n({1.0, 0.7, 0.7}));
    CHECK(g.in_D_n({1.0, 1.0, 1.0}));
    CHECK(!g.in_D_n({1.0, 0.7, 0.9}));  // free coordinates not descending
    CHECK(!g.in_D_n({0.9, 1.0, 0.7}));  // first coordinate not the max
}

TEST_CASE("pushed_density_eval: plateau and ramp branches") {
    // plateau height (n+1)(c+1-p) once the off-face minimum clears 2c+1-p,
    // below that a linear ramp (n+1)(min-c)+c
    auto g = make_region_geometry(2, 0.5, 0.9);
    const double plateau = 3.0 * (1.5 - 0.9);
    CHECK(pushed_density_eval({1.5, 1.3}, g) == doctest::Approx(plateau).epsilon(1e-15));
    CHECK(pushed_density_eval({1.5, 1.1}, g) == doctest::Approx(plateau).epsilon(1e-15));
    CHECK(pushed_density_eval({1.5, 0.8}, g) ==
          doctest::Approx(3.0 * 0.3 + 0.5).epsilon(1e-15));
    CHECK(pushed_density_eval({1.5, 0.5}, g) == doctest::Approx(0.5).epsilon(1e-15));

    auto g3 = make_region_geometry(3, 0.0, 0.6);
    CHECK(pushed_density_eval({1.0, 0.9, 0.5}, g3) ==
          doctest::Approx(4.0 * (1.0 - 0.6)).epsilon(1e-15));
    CHECK(pushed_density_eval({1.0, 0.9, 0.2}, g3) ==
          doctest::Approx(4.0 * 0.2).epsilon(1e-15));
}

TEST_CASE("pushed_density_eval: rejects points off the first top face") {
    auto g = make_region_geometry(2, 0.5, 0.9);
    CHECK_THROWS_AS(pushed_density_eval({1.2, 0.8}, g), std::domain_error);
    CHECK_THROWS_AS(pushed_density_eval({1.5, 0.2}, g), std::domain_error);
    CHECK_THROWS_AS(pushed_density_eval({1.5}, g), std::domain_error);
}

TEST_CASE("UpperSetStaircase: full and empty boundary sets") {
    auto full = full_boundary_set(2, 0.5);
    CHECK(full.contains({1.5, 0.5}));
    CHECK(full.contains({1.5, 1.5}));
    CHECK(full.contains({0.9, 1.5}));
    CHECK(!full.contains({1.2, 0.7}));  // not on the top boundary

    auto empty = empty_boundary_set(2, 0.5);
    CHECK(!empty.contains({1.5, 1.5}));
    CHECK(!empty.contains({1.5, 0.5}));

    auto full3 = full_boundary_set(3, 0.0);
    CHECK(full3.contains({1.0, 0.0, 0.0}));
    CHECK(full3.contains({0.2, 1.0, 0.7}));
}

TEST_CASE("random_staircase: two items reduce to a single threshold") {
    auto u = random_staircase(2, 0.0, 1, 2024);
    REQUIRE(u.tau.size() == 1);
    const double tau = u.tau[0];
    CHECK(tau > 0.0);
    CHECK(tau < 1.0);
    CHECK(u.contains({1.0, tau + 0.01}));
    CHECK(u.contains({tau + 0.01, 1.0}));
    CHECK(!u.contains({1.0, tau - 0.01}));
    CHECK(u.contains({1.0, tau}));  // threshold itself is inside

    CHECK_THROWS_AS(random_staircase(4, 0.0, 4, 1), std::domain_error);
    CHECK_THROWS_AS(random_staircase(2, 0.0, 0, 1), std::invalid_argument);
}

TEST_CASE("random_staircase: three-item thresholds are non-increasing and symmetric") {
    auto u = random_staircase(3, 0.5, 8, 7);
    REQUIRE(u.tau.size() == 8);
    for (size_t i = 1; i < u.tau.size(); ++i) CHECK(u.tau[i] <= u.tau[i - 1]);

    // membership depends only on the multiset of coordinates
    const double a = 0.95 + 0.5, b = 0.6 + 0.5;
    CHECK(u.contains({1.5, a, b}) == u.contains({a, 1.5, b}));
    CHECK(u.contains({1.5, a, b}) == u.contains({b, a, 1.5}));
    CHECK(u.contains({1.5, a, b}) == u.contains({1.5, b, a}));

    // slab lookup: the larger free coordinate picks the threshold row
    for (double r0 : {0.51, 0.8, 1.05, 1.3, 1.49}) {
        int slab = std::clamp(int((r0 - 0.5) / 1.0 * 8), 0, 7);
        double t = u.tau[size_t(slab)];
        if (t - 0.01 >= u.lo) CHECK(!u.contains({1.5, r0, t - 0.01}));
        if (t + 0.01 <= r0) CHECK(u.contains({1.5, r0, t + 0.01}));
    }
}

TEST_CASE("push_set_membership: diagonal shift lands on the staircase") {
    auto g = make_region_geometry(2, 0.0, 0.6);
    UpperSetStaircase u = random_staircase(2, 0.0, 1, 99);
    const double tau = u.tau[0];

    // max(y) = 0.8 shifts by 0.2; membership iff the other coordinate + 0.2
    // clears the threshold
    CHECK(push_set_membership({0.8, tau - 0.2 + 0.01}, u, g));
    CHECK(!push_set_membership({0.8, tau - 0.2 - 0.01}, u, g));

    // argmax coordinates pin exactly to the top
    CHECK(push_set_membership({0.8, 0.8}, u, g) == u.contains({1.0, 1.0}));
    CHECK(push_set_membership({1.0, tau + 0.01}, u, g));

    CHECK(!push_set_membership({0.7, 0.4}, empty_boundary_set(2, 0.0), g));
    CHECK(push_set_membership({0.7, 0.4}, full_boundary_set(2, 0.0), g));

    CHECK_THROWS_AS(push_set_membership({0.7, 0.4, 0.2}, u, g), std::invalid_argument);
}

TEST_CASE("push_set_membership: three items agree with direct computation") {
    auto g = make_region_geometry(3, 0.0, 0.6);
    auto u = random_staircase(3, 0.0, 6, 31);
    RandomStream rng(5150);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> y = {rng.next_double(0.6, 1.0), rng.next_double(),
                                 rng.next_double()};
        double mx = *std::max_element(y.begin(), y.end());
        double t = 1.0 - mx;
        std::vector<double> z(3);
        for (int j = 0; j < 3; ++j) z[size_t(j)] = (y[size_t(j)] == mx) ? 1.0 : y[size_t(j)] + t;
        CHECK(push_set_membership(y, u, g) == u.contains(z));
    }
}
