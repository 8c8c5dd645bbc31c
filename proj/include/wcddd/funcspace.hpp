#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "wcddd/quadrature.hpp"
#include "wcddd/weights.hpp"

namespace wcddd {

// |f'(x)| = coef |x - center|^exponent on (lo, hi); n = 1.
struct GradientPiece {
    double lo, hi, coef, center, exponent;
};

class TestFunction {
public:
    virtual ~TestFunction() = default;
    virtual int dim() const = 0;
    virtual double eval(const double* x) const = 0;
    virtual void grad(const double* x, double* g) const = 0;
    // Kinks and jumps along an axis.
    virtual std::vector<double> breakpoints(int /*axis*/) const { return {}; }
    // Global Lipschitz bound; +inf when f is discontinuous or has unbounded slope.
    virtual double lipschitz() const = 0;
    // The gradient vanishes outside B(0, R).
    virtual double support_radius() const = 0;
    virtual double sup_abs() const = 0;
    // Closed-form omega_Q when available.
    virtual std::optional<double> exact_omega(const Box& /*Q*/) const { return std::nullopt; }
    // Nondecreasing in n = 1.
    virtual bool monotone() const { return false; }
    virtual bool continuous() const { return std::isfinite(lipschitz()); }
    virtual std::optional<std::vector<GradientPiece>> gradient_pieces() const { return std::nullopt; }
    // Points where the gradient is singular (n = 1).
    virtual std::vector<double> singular_points() const { return {}; }
    virtual std::string name() const = 0;
    virtual nlohmann::json params() const = 0;

    double value(const Point& x) const { return eval(x.data()); }
    Point gradient(const Point& x) const {
        Point g(dim());
        grad(x.data(), g.data());
        return g;
    }
    double value1(double x) const { return eval(&x); }
};

using FunctionPtr = std::shared_ptr<const TestFunction>;

FunctionPtr constant_function(double c, int n = 1);
FunctionPtr linear_function(std::vector<double> slope);
FunctionPtr linear_ramp(double slope, double cutoff);
FunctionPtr tent(double center = 1.0, double radius = 1.0, int n = 1);
FunctionPtr indicator(std::vector<double> a, std::vector<double> b);
FunctionPtr smoothed_indicator(double width, int n = 1);
FunctionPtr sharp1_bump();
// x^e / e on (0,1), 0 left of 0, 1/e right of 1.
FunctionPtr power_ramp(double e);
FunctionPtr sharp2_fdelta(double delta);
FunctionPtr sharp3_fbeta(double beta, double p);
FunctionPtr callable_function(int n, std::function<double(const double*)> f,
                              std::function<void(const double*, double*)> g, double lipschitz,
                              double support, std::vector<double> breaks = {},
                              std::string label = "callable");

// Named entries: constant, linear, linear_ramp, tent, indicator, smoothed_indicator,
// sharp1_bump, sharp2_fdelta, sharp3_fbeta.
FunctionPtr catalog(const std::string& name, const nlohmann::json& params = nlohmann::json::object(),
                    int n = 1);
std::vector<std::string> catalog_names();

struct SeminormResult {
    double norm = 0.0;   // || |grad f| ||_{L^p_v(window)}
    double pth = 0.0;    // norm^p
    bool closed_form = false;
    bool converged = true;
};

SeminormResult sobolev_seminorm(const TestFunction& f, const Weight& w, double p, const Box& window,
                                const Quadrature& q = {});

// || f ||_{L^p_v(window)}
SeminormResult lp_norm(const TestFunction& f, const Weight& w, double p, const Box& window,
                       const Quadrature& q = {});

// Ball average f_B (n = 1 interval, n = 2 disc).
double ball_mean(const TestFunction& f, const Point& center, double radius);

}  // namespace wcddd
