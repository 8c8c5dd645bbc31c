#include "doctest.h"

#include <cmath>

#include "wcddd/weights.hpp"

using namespace wcddd;

TEST_CASE("power weight masses in closed form") {
    auto w = power_weight(0.0, -0.5);
    CHECK(w->mass(Box::interval(0, 1)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(w->mass(Box::interval(-1, 4)) == doctest::Approx(2.0 + 4.0).epsilon(1e-12));
    auto v = power_weight(0.5, 2.0);
    CHECK(v->mass(Box::interval(0, 1)) == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
    CHECK(power_integral_1d(-1, 1, -1.0) == INFINITY);
    CHECK_THROWS_AS(power_weight(0.0, -1.5)->mass(Box::interval(-1, 1)), DomainError);
}

TEST_CASE("A_p ratios of power weights") {
    // |x|^{-1/2} on [0, r]: mean 2 r^{-1/2}, ess inf r^{-1/2}.
    auto w = power_weight(0.0, -0.5);
    CHECK(ap_ratio(*w, Box::interval(0, 1), 1.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(ap_ratio(*w, Box::interval(0, 16), 1.0) == doctest::Approx(2.0).epsilon(1e-12));
    for (double a : {-0.5, 0.3, 0.8}) {
        auto v = power_weight(0.0, a);
        double expect = 1.0 / ((1.0 + a) * (1.0 - a));
        CHECK(ap_ratio(*v, Box::interval(0, 3), 2.0) == doctest::Approx(expect).epsilon(1e-10));
    }
    CHECK(ap_ratio(*power_weight(0.0, 0.5), Box::interval(0, 1), 1.0) == INFINITY);
    CHECK(ap_ratio(*constant_weight(3.0), Box::interval(-2, 5), 2.0) == doctest::Approx(1.0));
}

TEST_CASE("analytic A_p membership") {
    CHECK(power_in_ap(-0.5, 1.0));
    CHECK_FALSE(power_in_ap(0.5, 1.0));
    CHECK(power_in_ap(0.5, 2.0));
    CHECK_FALSE(power_in_ap(1.0, 2.0));
    CHECK_FALSE(power_in_ap(-1.0, 2.0));
}

TEST_CASE("A_p constant estimate is a lower bound above one") {
    auto w = power_weight(0.0, -0.5);
    auto win = make_window({Rational(-2)}, {Rational(2)}, -4, 1, Shift::all(1));
    auto est = ap_constant(*w, 1.0, default_probes(*w, win));
    CHECK(est.value >= 2.0 - 1e-12);
    CHECK(est.value < 4.0);
    CHECK_FALSE(est.unbounded);
    auto bad = ap_constant(*power_weight(0.0, 0.5), 1.0, default_probes(*w, win));
    CHECK(bad.unbounded);
}

TEST_CASE("dual characterization on a cube") {
    for (double a : {-0.5, 0.4}) {
        auto r = dual_ratio_check(*power_weight(0.25, a), Box::interval(0, 1), 2.0);
        CHECK(r.rel < 1e-9);
    }
}

TEST_CASE("tabulated and product weights") {
    auto t = tabulated_weight({0, 1, 3}, {2, 5});
    CHECK(t->mass(Box::interval(0, 3)) == doctest::Approx(12.0));
    CHECK(t->mass(Box::interval(-1, 0)) == doctest::Approx(2.0));
    auto p = product_weight({power_weight(0.0, 1.0), constant_weight(2.0)});
    CHECK(p->dim() == 2);
    CHECK(p->mass(Box{Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 3)}) == doctest::Approx(3.0));
}

TEST_CASE("weights from json") {
    auto w = weight_from_json({{"kind", "power"}, {"center", 0.5}, {"exponent", -0.75}});
    REQUIRE(w->power_form().has_value());
    CHECK(w->power_form()->first == 0.5);
    CHECK(w->power_form()->second == -0.75);
    CHECK(weight_from_json({{"kind", "constant"}, {"c", 2.0}})->value(Point::Zero(1)) == 2.0);
    CHECK_THROWS_AS(weight_from_json({{"kind", "bogus"}}), std::invalid_argument);
}

TEST_CASE("mass cache") {
    MassCache c;
    Box b = Box::interval(0, 1);
    CHECK_FALSE(c.find(b, 1.0).has_value());
    c.insert(b, 1.0, 3.5);
    CHECK(*c.find(b, 1.0) == 3.5);
    CHECK(c.size() == 1);
}
