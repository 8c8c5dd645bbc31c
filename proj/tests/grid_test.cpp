#include "doctest.h"

#include <cmath>
#include <random>

#include "wcddd/grid.hpp"

using namespace wcddd;

namespace {

double corner(int j, std::int64_t m, int third) {
    double sgn = (j % 2 == 0) ? 1.0 : -1.0;
    return std::ldexp(static_cast<double>(m) + sgn * third / 3.0, j);
}

AxisCube axis_cube(std::vector<Rational> lo, Rational edge) { return AxisCube{std::move(lo), edge}; }

}  // namespace

TEST_CASE("cube corners follow the alternating shift") {
    for (int j = -4; j <= 4; ++j)
        for (int a = 0; a < 3; ++a)
            for (std::int64_t m = -3; m <= 3; ++m) {
                Cube Q = make_cube(Shift({a}), j, {m});
                CHECK(Q.lower_d(0) == doctest::Approx(corner(j, m, a)).epsilon(1e-15));
                CHECK(Q.edge_d() == std::ldexp(1.0, j));
            }
    CHECK(make_cube(Shift({1}), 1, {0}).lower(0) == Rational(-2, 3));
    CHECK(make_cube(Shift({1}), 2, {0}).lower(0) == Rational(4, 3));
}

TEST_CASE("shift validation") {
    CHECK_THROWS_AS(Shift({3}), std::invalid_argument);
    CHECK(Shift::all(1).size() == 3);
    CHECK(Shift::all(2).size() == 9);
    CHECK(Shift::all(2).front() == Shift::zero(2));
}

TEST_CASE("same-shift relations are a trichotomy") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> jd(-4, 4), ad(0, 2);
    std::uniform_int_distribution<std::int64_t> md(-8, 8);
    for (int it = 0; it < 2000; ++it) {
        Shift s({ad(rng)});
        Cube P = make_cube(s, jd(rng), {md(rng)});
        Cube Q = make_cube(s, jd(rng), {md(rng)});
        Relation r = relate(P, Q);
        CHECK(r != Relation::Incomparable);
        Rational pl = P.lower(0), pu = P.upper(0), ql = Q.lower(0), qu = Q.upper(0);
        bool disjoint = pu <= ql || qu <= pl;
        CHECK(disjoint == (r == Relation::Disjoint));
        if (r == Relation::PInsideQ) CHECK((ql <= pl && pu <= qu));
    }
}

TEST_CASE("children partition the parent") {
    for (int n = 1; n <= 2; ++n) {
        Cube Q = make_cube(Shift(std::vector<int>(n, 1)), 3, std::vector<std::int64_t>(n, -2));
        auto kids = children(Q);
        REQUIRE(kids.size() == (n == 1 ? 2u : 4u));
        Rational total = 0;
        for (const auto& c : kids) {
            CHECK(parent(c) == Q);
            CHECK(relate(c, Q) == Relation::PInsideQ);
            Rational v = 1;
            for (int k = 0; k < n; ++k) v *= c.edge();
            total += v;
        }
        Rational vq = 1;
        for (int k = 0; k < n; ++k) vq *= Q.edge();
        CHECK(total == vq);
        for (std::size_t a = 0; a < kids.size(); ++a)
            for (std::size_t b = a + 1; b < kids.size(); ++b) CHECK(relate(kids[a], kids[b]) == Relation::Disjoint);
    }
}

TEST_CASE("dominating cube examples") {
    auto d = dominating_cube(axis_cube({Rational(0)}, Rational(1)));
    CHECK(d.shift == Shift::zero(1));
    CHECK(d.cube.lower(0) == 0);
    CHECK(d.cube.edge() == 2);
    auto e = dominating_cube(axis_cube({Rational(6, 5)}, Rational(1)));
    CHECK(e.shift == Shift({2}));
    CHECK(e.cube.lower(0) == Rational(2, 3));
    CHECK(e.cube.upper(0) == Rational(8, 3));
    auto f = dominating_cube(axis_cube({Rational(0), Rational(0)}, Rational(1)));
    CHECK(f.cube.edge() == 2);
    CHECK(contains(f.cube, axis_cube({Rational(0), Rational(0)}, Rational(1))));
}

TEST_CASE("dominating cubes contain P with edge in (3l/2, 3l]") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> num(-200, 200), den(1, 30), ed(1, 40);
    for (int it = 0; it < 500; ++it) {
        int n = 1 + it % 2;
        std::vector<Rational> lo;
        for (int k = 0; k < n; ++k) lo.emplace_back(num(rng), den(rng));
        Rational l(ed(rng), den(rng));
        AxisCube P = axis_cube(lo, l);
        auto d = dominating_cube(P);
        CHECK(contains(d.cube, P));
        CHECK(d.cube.edge() > l * 3 / 2);
        CHECK(d.cube.edge() <= l * 3);
    }
}

TEST_CASE("dom multiplicity bound") {
    CHECK(dom_multiplicity({axis_cube({Rational(0)}, Rational(1))}) == 1);
    std::vector<AxisCube> three;
    for (int i = 0; i < 3; ++i) three.push_back(axis_cube({Rational(i)}, Rational(1)));
    CHECK(dom_multiplicity(three) <= 3);
    std::vector<AxisCube> dilated;
    for (int i = 0; i < 10; ++i) dilated.push_back(dilate(axis_cube({Rational(i)}, Rational(1)), Rational(3)));
    CHECK(dom_multiplicity(dilated) <= 9);
    CHECK_THROWS_AS(dom_multiplicity({}), std::invalid_argument);
}

TEST_CASE("enumeration counts") {
    auto w = make_window({Rational(0)}, {Rational(1)}, -1, 0, {Shift::zero(1)});
    auto cubes = enumerate(w);
    REQUIRE(cubes.size() == 3);
    CHECK(cubes[0].j == 0);
    CHECK(cubes[1].lower(0) == 0);
    CHECK(cubes[2].lower(0) == Rational(1, 2));
    for (int k = 1; k <= 6; ++k) {
        auto wk = make_window({Rational(0)}, {Rational(1)}, -k, 0, {Shift::zero(1)});
        CHECK(window_count(wk) == (std::size_t(2) << k) - 1);
        CHECK(enumerate(wk).size() == window_count(wk));
    }
    auto big = make_window({Rational(0)}, {Rational(1)}, -40, 0, {Shift::zero(1)});
    CHECK_THROWS_AS(enumerate(big), BudgetError);
}

TEST_CASE("containing index") {
    CHECK(containing_index(0.5, 0, 0) == 0);
    CHECK(containing_index(-0.5, 0, 0) == -1);
    // D^{1/3} at j = 1 has corners 2m - 2/3.
    CHECK(containing_index(Rational(-2, 3), 1, 1) == 0);
    CHECK(containing_index(Rational(-1, 1), 1, 1) == -1);
}
