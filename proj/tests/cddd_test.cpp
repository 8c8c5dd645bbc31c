#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "wcddd/cddd.hpp"

using namespace wcddd;

namespace {

CdddConfig ramp_config() {
    CdddConfig cfg;
    cfg.p = 1.0;
    cfg.beta = 2.0;
    cfg.weight = constant_weight(1.0);
    cfg.window = make_window({Rational(-8)}, {Rational(8)}, -6, 3, Shift::all(1));
    return cfg;
}

}  // namespace

TEST_CASE("admissible beta sets") {
    CHECK(in_omega_set(1.0, 2.0, 1));
    CHECK(in_omega_set(1.0, -1.0, 1));
    CHECK_FALSE(in_omega_set(1.0, 0.5, 1));
    CHECK(alpha_exponent(2.0, 0.0) == doctest::Approx(2.0));
    CHECK(alpha_exponent(2.0, 2.0) == 1.0);
    auto cfg = ramp_config();
    cfg.beta = 0.5;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg.exploratory = true;
    CHECK_NOTHROW(validate(cfg));
}

TEST_CASE("level sets of a linear function") {
    auto f = linear_function({1.0});
    auto win = make_window({Rational(-4)}, {Rational(4)}, -5, 2, {Shift::zero(1)});
    for (double lambda : {0.05, 0.2, 0.6}) {
        auto ls = level_set(*f, win, lambda, 0.0);
        std::size_t expect = 0;
        for (const auto& Q : enumerate(win)) expect += Q.edge_d() > 3.0 * lambda;
        CHECK(ls.members.size() == expect);
    }
    auto c = constant_function(2.0);
    CHECK(level_set(*c, win, 1e-6, 0.0).members.empty());
}

TEST_CASE("level sets shrink as lambda grows") {
    auto f = tent();
    auto win = make_window({Rational(-2)}, {Rational(3)}, -4, 1, Shift::all(1));
    auto table = omega_window(*f, win);
    std::size_t prev = SIZE_MAX;
    for (double lambda : {0.01, 0.05, 0.1, 0.5, 1.0}) {
        auto n = level_set(table, lambda, 1.0).members.size();
        CHECK(n <= prev);
        prev = n;
    }
}

TEST_CASE("exact supremum matches a brute-force enumeration") {
    auto cfg = ramp_config();
    auto f = linear_ramp(1.0, 100.0);
    auto prof = cddd_functional(cfg, *f);
    // omega = h/3, threshold ratio t = 1/(3h), term weight h^2.
    std::map<double, double> mass_by_edge;
    for (const auto& Q : enumerate(cfg.window)) mass_by_edge[Q.edge_d()] += Q.edge_d() * Q.edge_d();
    double best = 0.0, acc = 0.0;
    for (const auto& [h, m] : mass_by_edge) {
        acc += m;
        best = std::max(best, acc / (3.0 * h));
    }
    CHECK(prof.exact_sup == doctest::Approx(best).epsilon(1e-12));
    CHECK(prof.sup <= prof.exact_sup * (1 + 1e-12));
    for (std::size_t i = 1; i < prof.lambdas.size(); ++i) CHECK(prof.n_cubes[i] <= prof.n_cubes[i - 1]);
}

TEST_CASE("constant function gives a zero profile and passes") {
    auto cfg = ramp_config();
    auto c = constant_function(1.0);
    auto rec = verify_cddd(cfg, *c);
    CHECK(rec.lhs == 0.0);
    CHECK(rec.passed());
}

TEST_CASE("tent ratio is stable under window doubling") {
    auto cfg = ramp_config();
    auto f = tent();
    cfg.window = make_window({Rational(-2)}, {Rational(4)}, -6, 2, Shift::all(1));
    auto a = verify_cddd(cfg, *f);
    cfg.window = make_window({Rational(-5)}, {Rational(7)}, -6, 3, Shift::all(1));
    auto b = verify_cddd(cfg, *f);
    CHECK(a.passed());
    CHECK(b.ratio == doctest::Approx(a.ratio).epsilon(0.2));
}

TEST_CASE("mean functional of an indicator against enumeration") {
    auto f = indicator({0.0}, {1.0});
    auto w = constant_weight(1.0);
    auto win = make_window({Rational(-2)}, {Rational(3)}, -4, 1, {Shift::zero(1)});
    CHECK_THROWS_AS(mean_functional(*f, *w, 1.0, 0.5, win), std::invalid_argument);
    auto prof = mean_functional(*f, *w, 1.0, 2.0, win);
    // Mean |Q cap (0,1)|/|Q| > lambda |Q|; weight |Q| v(Q) = h^2.
    std::vector<std::pair<double, double>> terms;
    for (const auto& Q : enumerate(win)) {
        double h = Q.edge_d();
        double in = std::max(0.0, std::min(Q.upper_d(0), 1.0) - std::max(Q.lower_d(0), 0.0));
        if (in > 0) terms.emplace_back(in / h / h, h * h);
    }
    std::sort(terms.begin(), terms.end(), [](auto& a, auto& b) { return a.first > b.first; });
    double best = 0.0, acc = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        acc += terms[i].second;
        if (i + 1 == terms.size() || terms[i + 1].first < terms[i].first) best = std::max(best, acc * terms[i].first);
    }
    CHECK(prof.exact_sup == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("good cubes on the small families") {
    auto w = constant_weight(1.0);
    Shift z = Shift::zero(1);
    Cube Q = make_cube(z, 0, {0}), L = make_cube(z, -1, {0}), R = make_cube(z, -1, {1});
    auto single = classify_good({Q}, 0.5, *w);
    CHECK(single.is_good[0]);
    auto two = classify_good({Q, L}, 1.0, *w);
    CHECK(two.is_good[0]);
    auto three = classify_good({Q, L, R}, 0.0, *w);
    CHECK_FALSE(three.is_good[0]);
    CHECK(three.is_good[1]);
    CHECK(three.descendants[0] == doctest::Approx(2.0));
    CHECK(cube_weight(L, 0.0, *w) == doctest::Approx(1.0));
}

TEST_CASE("domination inequalities on the three-cube family") {
    auto w = constant_weight(1.0);
    Shift z = Shift::zero(1);
    std::vector<Cube> S{make_cube(z, 0, {0}), make_cube(z, -1, {0}), make_cube(z, -1, {1})};
    auto r1 = check_domination(S, 0.0, -1.0, *w, Domination::LemGoodI);
    CHECK(r1.passed());
    CHECK(r1.lhs <= r1.rhs * (1 + 1e-9));
    auto r2 = check_domination(S, 0.0, 1.0, *w, Domination::LemGoodII);
    CHECK(r2.passed());
}

TEST_CASE("dynamic program agrees with brute force on random families") {
    std::mt19937_64 rng(3);
    auto w = power_weight(0.3, -0.5);
    for (int it = 0; it < 40; ++it) {
        std::uniform_int_distribution<int> jd(-4, 0);
        std::uniform_real_distribution<double> xd(0.0, 1.0), sd(-1.0, 1.0);
        std::set<Cube> fam;
        while (fam.size() < 9) {
            int j = jd(rng);
            fam.insert(make_cube(Shift::zero(1), j, {containing_index(xd(rng), 0, j)}));
        }
        std::vector<Cube> S(fam.begin(), fam.end());
        double sigma = sd(rng);
        CHECK(classify_good(S, sigma, *w).is_good == classify_good_brute(S, sigma, *w).is_good);
    }
}

TEST_CASE("sparse chains for the linear ramp") {
    auto f = linear_ramp(1.0, 4.0);
    auto win = make_window({Rational(-4)}, {Rational(4)}, -6, 1, {Shift::zero(1)});
    std::vector<Point> pts;
    for (double x : {-1.3, 0.2, 2.7}) pts.push_back(Point::Constant(1, x));
    auto rep = sparse_chain_check(*f, 0.1, 0.0, 1.0, 1.0, pts, win);
    CHECK(rep.violations == 0);
}
