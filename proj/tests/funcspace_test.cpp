#include "doctest.h"

#include <cmath>

#include "wcddd/funcspace.hpp"
#include "wcddd/omega.hpp"

using namespace wcddd;

namespace {

// Midpoint double sum for omega on an interval.
double omega_bruteforce(const TestFunction& f, double a, double b, int N) {
    double h = (b - a) / N, s = 0.0;
    std::vector<double> v(N);
    for (int i = 0; i < N; ++i) v[i] = f.value1(a + (i + 0.5) * h);
    for (int i = 0; i < N; ++i)
        for (int k = 0; k < N; ++k) s += std::abs(v[i] - v[k]);
    double len = b - a;
    return s * h * h / (len * len);
}

}  // namespace

TEST_CASE("catalog values and gradients") {
    auto t = tent();
    CHECK(t->value1(1.0) == doctest::Approx(1.0));
    CHECK(t->value1(0.5) == doctest::Approx(0.5));
    CHECK(t->value1(3.0) == 0.0);
    CHECK(t->gradient(Point::Constant(1, 0.5))[0] == doctest::Approx(1.0));
    CHECK(t->lipschitz() == doctest::Approx(1.0));
    auto r = linear_ramp(1.0, 10.0);
    CHECK(r->value1(3.0) == doctest::Approx(3.0));
    CHECK(r->value1(12.0) == doctest::Approx(10.0));
    CHECK(r->value1(-12.0) == doctest::Approx(-10.0));
    auto ind = indicator({0.0}, {1.0});
    CHECK(ind->value1(0.5) == 1.0);
    CHECK_FALSE(ind->continuous());
    for (const auto& name : catalog_names()) CHECK(catalog(name)->name().size() > 0);
    CHECK_THROWS(catalog("nope"));
}

TEST_CASE("weighted seminorms") {
    auto t = tent();
    auto one = constant_weight(1.0);
    CHECK(sobolev_seminorm(*t, *one, 1.0, Box::interval(-4, 4)).norm == doctest::Approx(2.0).epsilon(1e-9));
    auto w = power_weight(0.0, -0.5);
    // int_0^2 x^{-1/2} dx
    CHECK(sobolev_seminorm(*t, *w, 1.0, Box::interval(-4, 4)).norm ==
          doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-7));
    // (int_0^2 1 dx)^{1/2}
    CHECK(sobolev_seminorm(*t, *one, 2.0, Box::interval(-4, 4)).norm == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
    CHECK(lp_norm(*t, *one, 1.0, Box::interval(-4, 4)).norm == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("ball means") {
    auto l = linear_function({2.0});
    CHECK(ball_mean(*l, Point::Constant(1, 0.7), 0.3) == doctest::Approx(1.4).epsilon(1e-10));
    auto l2 = linear_function({1.0, -1.0});
    Point c(2);
    c << 0.2, 0.5;
    CHECK(ball_mean(*l2, c, 0.25) == doctest::Approx(-0.3).epsilon(1e-8));
}

TEST_CASE("omega closed forms") {
    auto l = linear_function({-3.0});
    Cube Q = make_cube(Shift({1}), -1, {2});
    CHECK(omega(*l, Q).value == doctest::Approx(3.0 * 0.5 / 3.0).epsilon(1e-12));
    auto ind = indicator({0.3}, {0.8});
    Box B = Box::interval(0, 1);
    CHECK(omega(*ind, B).value == doctest::Approx(2.0 * 0.5 * 0.5).epsilon(1e-12));
    auto sq = indicator({0.0, 0.0}, {0.5, 1.0});
    Box B2{Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1)};
    CHECK(omega(*sq, B2).value == doctest::Approx(2.0 * 0.25).epsilon(1e-9));
}

TEST_CASE("omega against a midpoint double sum") {
    for (const auto& f : {tent(), smoothed_indicator(0.5), linear_ramp(1.0, 1.0)}) {
        double a = -0.6, b = 1.4;
        double brute = omega_bruteforce(*f, a, b, 1600);
        CHECK(omega(*f, Box::interval(a, b)).value == doctest::Approx(brute).epsilon(1e-5));
    }
}

TEST_CASE("omega sweep matches single cubes") {
    auto f = tent();
    auto win = make_window({Rational(-1)}, {Rational(3)}, -3, 1, {Shift::zero(1), Shift({2})});
    auto table = omega_window(*f, win);
    REQUIRE(table.size() == window_count(win));
    for (std::size_t i = 0; i < table.size(); i += 7)
        CHECK(table[i].omega == doctest::Approx(omega(*f, table[i].cube).value).epsilon(1e-9).scale(1e-12));
}
