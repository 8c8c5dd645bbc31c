#include "doctest.h"

#include <cmath>

#include "wcddd/experiments.hpp"

using namespace wcddd;

TEST_CASE("dyadic grid and case names") {
    auto g = dyadic_grid(2, 4);
    REQUIRE(g.size() == 3);
    CHECK(g[0] == 0.25);
    CHECK(g[2] == 0.0625);
    CHECK(sweep_case_from("beta_limit") == SweepCase::BetaLimit);
    CHECK(std::string(to_string(SweepCase::Ap)) == "ap");
    CHECK_THROWS_AS(sweep_case_from("x"), std::invalid_argument);
}

TEST_CASE("log-log fit recovers a power law") {
    std::vector<double> x, y;
    for (int k = 1; k <= 8; ++k) {
        x.push_back(std::ldexp(1.0, -k));
        y.push_back(5.0 * std::pow(x.back(), -2.5));
    }
    auto fit = loglog_fit(x, y);
    CHECK(fit.slope == doctest::Approx(-2.5).epsilon(1e-12));
    CHECK(std::exp(fit.intercept) == doctest::Approx(5.0).epsilon(1e-10));
    CHECK(fit.residual < 1e-12);
    CHECK_THROWS_AS(loglog_fit({1.0, 2.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("A1 sharpness sweep") {
    auto res = sharpness_sweep(SweepCase::A1, 1.0, dyadic_grid(2, 8));
    CHECK(res.slope == doctest::Approx(-1.0).epsilon(0.05));
    CHECK(res.all_certified);
    CHECK(res.verdict == "pass");
    for (const auto& pt : res.points) {
        double d = pt.param;
        CHECK(pt.lower_mass == doctest::Approx(std::pow(3.5, d) / d).epsilon(1e-12));
        CHECK(pt.lambda == doctest::Approx(std::pow(4.0, -2.0 - 3.0 + 1.0)).epsilon(1e-14));
    }
    auto t = res.table();
    CHECK(t.columns.size() == 10);
    CHECK(t.rows.size() == 7);
}

TEST_CASE("classifier on the constant weight") {
    ClassifierOptions opt;
    opt.with_bsvy = false;
    opt.doublings = 2;
    auto rep = weight_classifier(constant_weight(1.0), 1.0, {tent()}, opt);
    CHECK(rep.verdict == "consistent with A_p");
    CHECK(rep.max_growth <= 1.05);
    REQUIRE(rep.series.size() == 2);
    CHECK(rep.series[0].windows.size() == 3);
}

TEST_CASE("classifier reports the analytic answer for power weights") {
    ClassifierOptions opt;
    opt.with_bsvy = false;
    opt.doublings = 1;
    auto rep = weight_classifier(power_weight(0.0, 0.5), 1.0, {tent()}, opt);
    REQUIRE(rep.analytic.has_value());
    CHECK_FALSE(*rep.analytic);
}
