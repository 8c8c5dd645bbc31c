#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "wcddd/grid.hpp"

namespace wcddd {

using Point = Eigen::VectorXd;

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct Box {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    int dim() const { return static_cast<int>(lo.size()); }
    double edge(int k) const { return hi[k] - lo[k]; }
    double volume() const { return (hi - lo).prod(); }
    bool contains(const Point& x) const;
    static Box from(const Cube& Q);
    static Box interval(double a, double b);
    static Box cube(const Point& lower, double edge);
};

struct Ball {
    Point center;
    double radius = 0.0;
};

double ball_volume(int n, double r);

// Integral of |u|^e over [lo, hi]; +inf when e <= -1 and 0 lies in [lo, hi].
double power_integral_1d(double lo, double hi, double e);

class Weight {
public:
    virtual ~Weight() = default;
    virtual int dim() const = 0;
    virtual double value(const Point& x) const = 0;
    // Integral of v^r over the box; +inf when not integrable and r != 1.
    virtual double power_mass(const Box& b, double r) const = 0;
    // Essential supremum of 1/v on the box, +inf if unbounded.
    virtual double ess_sup_inverse(const Box& b) const = 0;
    virtual std::vector<double> singular_points(int /*axis*/) const { return {}; }
    virtual std::string kind() const = 0;
    virtual nlohmann::json describe() const = 0;
    // (center, exponent) when the weight is |x - c|^a in n = 1.
    virtual std::optional<std::pair<double, double>> power_form() const { return std::nullopt; }

    // Weight mass v(E); DomainError for a non-integrable singularity inside E.
    double mass(const Box& b) const;
    double mass(const Cube& Q) const { return mass(Box::from(Q)); }
    virtual double ball_mass(const Ball& B) const;
};

using WeightPtr = std::shared_ptr<const Weight>;

WeightPtr constant_weight(double c, int n = 1);
// |x - c|^a; closed forms in n = 1, polar quadrature in n = 2.
WeightPtr power_weight(std::vector<double> center, double a);
WeightPtr power_weight(double center, double a);
WeightPtr product_weight(std::vector<WeightPtr> factors);
WeightPtr callable_weight(int n, std::function<double(const Point&)> fn,
                          std::vector<double> singular = {}, bool integrable = true,
                          std::string label = "callable");
// Piecewise constant on [edges[i], edges[i+1]); constant extension outside.
WeightPtr tabulated_weight(std::vector<double> edges, std::vector<double> values);

WeightPtr weight_from_json(const nlohmann::json& spec);

// Thread-safe memo of cube masses keyed by box corners and exponent.
class MassCache {
public:
    std::optional<double> find(const Box& b, double r) const;
    void insert(const Box& b, double r, double value) const;
    std::size_t size() const;

private:
    using Key = std::tuple<std::vector<double>, std::vector<double>, double>;
    static Key key(const Box& b, double r);
    mutable std::shared_mutex mu_;
    mutable std::map<Key, double> map_;
};

// Per-cube A_p ratio; +inf when unbounded.
double ap_ratio(const Weight& w, const Box& Q, double p);

struct ApEstimate {
    double p = 1.0;
    double value = 1.0;
    std::optional<Box> certifying;
    std::size_t probes = 0;
    bool unbounded = false;
};

// Max of the per-cube ratio over the probes, floored at 1; a lower bound for [v]_{A_p}.
ApEstimate ap_constant(const Weight& w, double p, const std::vector<Box>& probes);

// All cubes of a window as boxes plus intervals centred at singular points.
std::vector<Box> default_probes(const Weight& w, const GridWindow& window);

struct ApPropertyReport {
    double estimate = 1.0;
    bool maximal_checked = false;
    bool maximal_ok = true;
    double maximal_worst = 0.0;  // max of M(v)(x) / (estimate v(x))
    bool doubling_ok = true;
    double doubling_worst = 0.0;  // max of v(Q) / (estimate (|Q|/|S|)^p v(S))
    bool dual_checked = false;
    bool dual_ok = true;
    double dual_worst_rel = 0.0;
    std::vector<std::string> findings;
};

struct DualCheck {
    double direct = 0.0;
    double dual = 0.0;
    double rel = 0.0;
};

// Ratio of the extremal f = v^{1-p'} against the direct A_p ratio on one cube.
DualCheck dual_ratio_check(const Weight& w, const Box& Q, double p);

// Discretized centred-or-not maximal function M(v)(x) over intervals around x (n = 1).
double maximal_function(const Weight& w, double x, double r_min = 1e-6, double r_max = 1e4,
                        int per_octave = 4);

ApPropertyReport check_ap_properties(const Weight& w, double p, const std::vector<Box>& probes,
                                     const std::vector<Point>& samples, std::uint64_t seed = 1,
                                     double tol = 1e-9);

// min over samples of v(x) est^2 (1+|x|)^n / v(B(0,1)).
double growth_check(const Weight& w, double estimate, const std::vector<Point>& samples);

// Analytic A_p membership of |x|^a in n = 1.
bool power_in_ap(double a, double p);

}  // namespace wcddd
