#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace wcddd {

struct Quadrature {
    enum class Scheme { GaussKronrod, TensorGauss, Midpoint };
    Scheme scheme = Scheme::GaussKronrod;
    double rel_tol = 1e-8;
    double abs_tol = 1e-14;
    unsigned max_depth = 18;
    // Nodes per panel and panels per axis for TensorGauss; Midpoint doubles panels up to
    // 2^max_depth.
    int gauss_order = 20;
    int panels = 8;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
};

using Fn1 = std::function<double(double)>;
using Fn2 = std::function<double(double, double)>;

// Sorted unique points strictly inside (a,b), endpoints added.
std::vector<double> panel_edges(double a, double b, const std::vector<double>& breaks);

// Adaptive integral of f over [a,b] split at breaks. Panels touching a point of
// `singular` use tanh-sinh, the rest Gauss-Kronrod.
QuadResult integrate(const Fn1& f, double a, double b, const Quadrature& q = {},
                     const std::vector<double>& breaks = {},
                     const std::vector<double>& singular = {});

// Iterated integral over [ax,bx] x [ay,by].
QuadResult integrate2(const Fn2& f, double ax, double bx, double ay, double by,
                      const Quadrature& q = {}, const std::vector<double>& breaks_x = {},
                      const std::vector<double>& breaks_y = {});

// Gauss-Legendre nodes and weights on [-1,1]; orders 2, 3, 4, 5, 8, 10, 16, 20, 30.
const std::vector<std::pair<double, double>>& gauss_legendre(int order);

// Fixed-order composite Gauss rule on [a,b] split at breaks.
double gauss_composite(const Fn1& f, double a, double b, int order, int panels,
                       const std::vector<double>& breaks = {});

}  // namespace wcddd
