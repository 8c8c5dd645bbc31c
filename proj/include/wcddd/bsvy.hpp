#pragma once

#include <functional>
#include <string>
#include <tuple>
#include <vector>

#include "wcddd/cddd.hpp"
#include "wcddd/funcspace.hpp"
#include "wcddd/records.hpp"
#include "wcddd/weights.hpp"

namespace wcddd {

// Gamma_{p,q}: (-inf,-q) u (0,inf) for p = 1, nonzero reals for p > 1.
bool in_gamma_set(double p, double q, double gamma);
// n (1/p - 1/q) < 1.
bool scale_condition(int n, double p, double q);

struct BsvyConfig {
    double p = 1.0;
    double q = 1.0;
    double gamma = 1.0;
    WeightPtr weight;
    Box window;
    LambdaGrid lambdas{1e2, 1e4, 16};
    bool exploratory = false;
    // u-samples per direction (uniform and log-spaced each) and directions on the circle.
    int samples = 256;
    int directions = 64;
    // Outer integral tolerance.
    double outer_tol = 1e-7;
    // Width in decades of the lambda tail used for the liminf, and the lower-bound tolerance.
    double decade = 1.0;
    double tol = 0.02;
    double ceiling = 100.0;
};

// Throws std::invalid_argument naming Gamma_{p,q} or the scale condition unless exploratory.
void validate(const BsvyConfig& cfg);

// |f(x) - f(y)| / |x - y|^{1+s} > lambda.
bool in_level_set(const TestFunction& f, const Point& x, const Point& y, double lambda, double s);

struct InnerResult {
    double value = 0.0;
    bool truncated = false;
    double tail_bound = 0.0;
};

// Measure (du / |gamma|, u = t^gamma) of {t in (t_lo, t_hi) : member(t)}, with transitions
// located by bisection between u-samples.
double radial_measure(const std::function<bool(double)>& member, double gamma, double t_lo,
                      double t_hi, int samples, const std::vector<double>& extra_t = {});

// int 1_E(x,y) |x-y|^{gamma-n} dy over R^n.
InnerResult inner_integral(const TestFunction& f, const Point& x, double lambda, const BsvyConfig& cfg);

struct BsvyProfile {
    std::vector<double> lambdas;
    std::vector<double> values;
    std::vector<bool> truncated;
    double sup = 0.0;
    double argmax_lambda = 0.0;

    Table table() const;
};

BsvyProfile bsvy_functional(const BsvyConfig& cfg, const TestFunction& f);

// [2 Gamma((q+1)/2) pi^{(n-1)/2} / (|gamma| Gamma((q+n)/2))]^{1/q}.
double lower_constant(int n, double q, double gamma);

VerificationRecord verify_bsvy(const BsvyConfig& cfg, const TestFunction& f);

struct SplitMembership {
    bool in_e = false;
    bool in_e1 = false;
    bool in_e2 = false;
    double mean = 0.0;
};

// Membership in E_{lambda,s}, E1_{lambda/2,s}, E2_{lambda/2,s} with the mean over B(y, |x-y|/20).
SplitMembership split_and_mean_sets(const TestFunction& f, const Point& x, const Point& y,
                                    double lambda, double s);

struct PointDominationOptions {
    double c_lambda = 0.125;    // lambda(j) = c lambda 2^{j[1 + n(beta - 1/p) - eps]}
    double constant = 64.0;     // asserted C in LHS <= C RHS
    int j_terms = 60;
    double tail_tol = 1e-6;
    GridWindow grid;            // cube window for the right side
    OmegaOptions omega;
};

VerificationRecord point_domination_check(const TestFunction& f, const WeightPtr& w, double p,
                                          double q, double beta, double lambda, const Box& window,
                                          double eps, const PointDominationOptions& opt);

}  // namespace wcddd
