#include "wcddd/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "wcddd/quadrature.hpp"

namespace wcddd {

double power_integral_1d(double lo, double hi, double e) {
    if (hi <= lo) return 0.0;
    if (e == 0.0) return hi - lo;
    if (e <= -1.0 && lo <= 0.0 && hi >= 0.0) return std::numeric_limits<double>::infinity();
    if (e == -1.0) return std::abs(std::log(std::abs(hi)) - std::log(std::abs(lo)));
    auto F = [e](double u) {
        double s = u < 0 ? -1.0 : 1.0;
        return s * std::pow(std::abs(u), e + 1.0) / (e + 1.0);
    };
    return F(hi) - F(lo);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Integral of |x|^e over [0,w] x [0,h] by polar coordinates, e > -2.
double power_corner_2d(double w, double h, double e) {
    if (w <= 0.0 || h <= 0.0) return 0.0;
    double th0 = std::atan2(h, w);
    double k = e + 2.0;
    namespace bq = boost::math::quadrature;
    auto f1 = [&](double t) { return std::pow(w / std::cos(t), k) / k; };
    auto f2 = [&](double t) { return std::pow(h / std::sin(t), k) / k; };
    double a = bq::gauss_kronrod<double, 31>::integrate(f1, 0.0, th0, 15, 1e-13);
    double b = bq::gauss_kronrod<double, 31>::integrate(f2, th0, std::numbers::pi / 2, 15, 1e-13);
    return a + b;
}

double power_box_2d(const Box& b, const Point& c, double e) {
    if (e == 0.0) return b.volume();
    bool inside = b.lo[0] <= c[0] && c[0] <= b.hi[0] && b.lo[1] <= c[1] && c[1] <= b.hi[1];
    if (e <= -2.0 && inside) return kInf;
    auto F = [&](double X, double Y) {
        double u = X - c[0], v = Y - c[1];
        double s = (u < 0 ? -1.0 : 1.0) * (v < 0 ? -1.0 : 1.0);
        return s * power_corner_2d(std::abs(u), std::abs(v), e);
    };
    return F(b.hi[0], b.hi[1]) - F(b.lo[0], b.hi[1]) - F(b.hi[0], b.lo[1]) + F(b.lo[0], b.lo[1]);
}

class ConstantWeight final : public Weight {
public:
    ConstantWeight(double c, int n) : c_(c), n_(n) {
        if (!(c > 0)) throw std::invalid_argument("constant weight must be positive");
    }
    int dim() const override { return n_; }
    double value(const Point&) const override { return c_; }
    double power_mass(const Box& b, double r) const override { return std::pow(c_, r) * b.volume(); }
    double ess_sup_inverse(const Box&) const override { return 1.0 / c_; }
    double ball_mass(const Ball& B) const override { return c_ * ball_volume(n_, B.radius); }
    std::string kind() const override { return "constant"; }
    nlohmann::json describe() const override { return {{"kind", "constant"}, {"c", c_}, {"n", n_}}; }
    std::optional<std::pair<double, double>> power_form() const override {
        if (n_ == 1 && c_ == 1.0) return std::make_pair(0.0, 0.0);
        return std::nullopt;
    }

private:
    double c_;
    int n_;
};

class PowerWeight final : public Weight {
public:
    PowerWeight(std::vector<double> center, double a) : a_(a) {
        c_ = Eigen::Map<const Eigen::VectorXd>(center.data(), center.size());
        if (c_.size() < 1 || c_.size() > 2)
            throw std::invalid_argument("power weight supports n = 1 or 2");
        if (a_ <= -static_cast<double>(c_.size()))
            throw DomainError("power weight exponent must exceed -n for local integrability");
    }
    int dim() const override { return static_cast<int>(c_.size()); }
    double value(const Point& x) const override {
        double d = (x - c_).norm();
        if (a_ == 0.0) return 1.0;
        return std::pow(d, a_);
    }
    double power_mass(const Box& b, double r) const override {
        double e = a_ * r;
        if (dim() == 1) return power_integral_1d(b.lo[0] - c_[0], b.hi[0] - c_[0], e);
        if (auto v = cache_.find(b, r)) return *v;
        double v = power_box_2d(b, c_, e);
        cache_.insert(b, r, v);
        return v;
    }
    double ess_sup_inverse(const Box& b) const override {
        if (a_ == 0.0) return 1.0;
        Point near = c_.cwiseMax(b.lo).cwiseMin(b.hi);
        double dmin = (near - c_).norm();
        double dmax = 0.0;
        for (int mask = 0; mask < (1 << dim()); ++mask) {
            Point corner(dim());
            for (int k = 0; k < dim(); ++k) corner[k] = ((mask >> k) & 1) ? b.hi[k] : b.lo[k];
            dmax = std::max(dmax, (corner - c_).norm());
        }
        if (a_ > 0.0) return dmin == 0.0 ? kInf : std::pow(dmin, -a_);
        return std::pow(dmax, -a_);
    }
    double ball_mass(const Ball& B) const override {
        if (dim() == 1) return mass(Box::interval(B.center[0] - B.radius, B.center[0] + B.radius));
        if ((B.center - c_).norm() == 0.0)
            return 2.0 * std::numbers::pi * std::pow(B.radius, a_ + 2.0) / (a_ + 2.0);
        return Weight::ball_mass(B);
    }
    std::vector<double> singular_points(int axis) const override {
        if (a_ == 0.0) return {};
        return {c_[axis]};
    }
    std::string kind() const override { return "power"; }
    nlohmann::json describe() const override {
        std::vector<double> c(c_.data(), c_.data() + c_.size());
        return {{"kind", "power"}, {"center", c}, {"exponent", a_}};
    }
    std::optional<std::pair<double, double>> power_form() const override {
        if (dim() == 1) return std::make_pair(c_[0], a_);
        return std::nullopt;
    }

private:
    Eigen::VectorXd c_;
    double a_;
    MassCache cache_;
};

class ProductWeight final : public Weight {
public:
    explicit ProductWeight(std::vector<WeightPtr> f) : f_(std::move(f)) {
        for (const auto& w : f_)
            if (!w || w->dim() != 1) throw std::invalid_argument("product factors must be 1-D weights");
    }
    int dim() const override { return static_cast<int>(f_.size()); }
    double value(const Point& x) const override {
        double v = 1.0;
        for (int k = 0; k < dim(); ++k) v *= f_[k]->value(Point::Constant(1, x[k]));
        return v;
    }
    double power_mass(const Box& b, double r) const override {
        double v = 1.0;
        for (int k = 0; k < dim(); ++k) v *= f_[k]->power_mass(Box::interval(b.lo[k], b.hi[k]), r);
        return v;
    }
    double ess_sup_inverse(const Box& b) const override {
        double v = 1.0;
        for (int k = 0; k < dim(); ++k) v *= f_[k]->ess_sup_inverse(Box::interval(b.lo[k], b.hi[k]));
        return v;
    }
    std::vector<double> singular_points(int axis) const override {
        return f_[axis]->singular_points(0);
    }
    std::string kind() const override { return "product"; }
    nlohmann::json describe() const override {
        nlohmann::json j = {{"kind", "product"}, {"factors", nlohmann::json::array()}};
        for (const auto& w : f_) j["factors"].push_back(w->describe());
        return j;
    }

private:
    std::vector<WeightPtr> f_;
};

class CallableWeight final : public Weight {
public:
    CallableWeight(int n, std::function<double(const Point&)> fn, std::vector<double> singular,
                   bool integrable, std::string label)
        : n_(n), fn_(std::move(fn)), sing_(std::move(singular)), integrable_(integrable),
          label_(std::move(label)) {}
    int dim() const override { return n_; }
    double value(const Point& x) const override { return fn_(x); }
    double power_mass(const Box& b, double r) const override {
        if (!integrable_ && r == 1.0) return kInf;
        if (auto v = cache_.find(b, r)) return *v;
        Quadrature q;
        double v;
        if (n_ == 1) {
            v = integrate([&](double x) { return std::pow(fn_(Point::Constant(1, x)), r); },
                          b.lo[0], b.hi[0], q, {}, sing_)
                    .value;
        } else {
            v = integrate2(
                    [&](double x, double y) {
                        Point p(2);
                        p << x, y;
                        return std::pow(fn_(p), r);
                    },
                    b.lo[0], b.hi[0], b.lo[1], b.hi[1], q, sing_, sing_)
                    .value;
        }
        cache_.insert(b, r, v);
        return v;
    }
    double ess_sup_inverse(const Box& b) const override {
        auto sweep = [&](int N) {
            double best = 0.0;
            if (n_ == 1) {
                for (int i = 0; i < N; ++i) {
                    double x = b.lo[0] + (i + 0.5) * b.edge(0) / N;
                    best = std::max(best, 1.0 / fn_(Point::Constant(1, x)));
                }
            } else {
                Point p(2);
                for (int i = 0; i < N; ++i)
                    for (int k = 0; k < N; ++k) {
                        p << b.lo[0] + (i + 0.5) * b.edge(0) / N, b.lo[1] + (k + 0.5) * b.edge(1) / N;
                        best = std::max(best, 1.0 / fn_(p));
                    }
            }
            return best;
        };
        int N = n_ == 1 ? 512 : 64;
        double m1 = sweep(N), m2 = sweep(2 * N);
        return std::max(m2, m2 + (m2 - m1));
    }
    std::vector<double> singular_points(int) const override { return sing_; }
    std::string kind() const override { return "callable"; }
    nlohmann::json describe() const override { return {{"kind", "callable"}, {"label", label_}, {"n", n_}}; }

private:
    int n_;
    std::function<double(const Point&)> fn_;
    std::vector<double> sing_;
    bool integrable_;
    std::string label_;
    MassCache cache_;
};

class TabulatedWeight final : public Weight {
public:
    TabulatedWeight(std::vector<double> edges, std::vector<double> values)
        : e_(std::move(edges)), v_(std::move(values)) {
        if (e_.size() < 2 || v_.size() + 1 != e_.size())
            throw std::invalid_argument("table needs k+1 edges for k values");
        if (!std::is_sorted(e_.begin(), e_.end())) throw std::invalid_argument("table edges unsorted");
        for (double v : v_)
            if (v < 0) throw std::invalid_argument("table values must be nonnegative");
    }
    int dim() const override { return 1; }
    double value(const Point& x) const override { return at(x[0]); }
    double power_mass(const Box& b, double r) const override {
        double lo = b.lo[0], hi = b.hi[0];
        double total = 0.0;
        // Left and right constant extensions.
        if (lo < e_.front()) total += (std::min(hi, e_.front()) - lo) * pw(v_.front(), r);
        if (hi > e_.back()) total += (hi - std::max(lo, e_.back())) * pw(v_.back(), r);
        for (std::size_t i = 0; i < v_.size(); ++i) {
            double a = std::max(lo, e_[i]), c = std::min(hi, e_[i + 1]);
            if (c > a) total += (c - a) * pw(v_[i], r);
        }
        return total;
    }
    double ess_sup_inverse(const Box& b) const override {
        double best = 0.0;
        double lo = b.lo[0], hi = b.hi[0];
        if (lo < e_.front()) best = std::max(best, inv(v_.front()));
        if (hi > e_.back()) best = std::max(best, inv(v_.back()));
        for (std::size_t i = 0; i < v_.size(); ++i)
            if (std::min(hi, e_[i + 1]) > std::max(lo, e_[i])) best = std::max(best, inv(v_[i]));
        return best;
    }
    std::string kind() const override { return "table"; }
    nlohmann::json describe() const override { return {{"kind", "table"}, {"edges", e_}, {"values", v_}}; }

private:
    static double pw(double v, double r) { return v == 0.0 ? (r > 0 ? 0.0 : kInf) : std::pow(v, r); }
    static double inv(double v) { return v == 0.0 ? kInf : 1.0 / v; }
    double at(double x) const {
        if (x < e_.front()) return v_.front();
        if (x >= e_.back()) return v_.back();
        auto it = std::upper_bound(e_.begin(), e_.end(), x);
        return v_[static_cast<std::size_t>(it - e_.begin()) - 1];
    }
    std::vector<double> e_, v_;
};

}  // namespace

bool Box::contains(const Point& x) const {
    for (int k = 0; k < dim(); ++k)
        if (x[k] < lo[k] || x[k] >= hi[k]) return false;
    return true;
}

Box Box::from(const Cube& Q) {
    Box b;
    b.lo.resize(Q.dim());
    b.hi.resize(Q.dim());
    for (int k = 0; k < Q.dim(); ++k) {
        b.lo[k] = Q.lower_d(k);
        b.hi[k] = b.lo[k] + Q.edge_d();
    }
    return b;
}

Box Box::interval(double a, double b) {
    Box B;
    B.lo = Eigen::VectorXd::Constant(1, a);
    B.hi = Eigen::VectorXd::Constant(1, b);
    return B;
}

Box Box::cube(const Point& lower, double edge) {
    Box B;
    B.lo = lower;
    B.hi = lower.array() + edge;
    return B;
}

double ball_volume(int n, double r) {
    return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0) * std::pow(r, n);
}

double Weight::mass(const Box& b) const {
    double v = power_mass(b, 1.0);
    if (!std::isfinite(v)) throw DomainError("weight not integrable on the requested set");
    return v;
}

double Weight::ball_mass(const Ball& B) const {
    if (dim() == 1) return mass(Box::interval(B.center[0] - B.radius, B.center[0] + B.radius));
    Quadrature q;
    q.rel_tol = 1e-10;
    auto radial = [&](double t) {
        Point u(2);
        u << std::cos(t), std::sin(t);
        return integrate([&](double rho) { return value(B.center + rho * u) * rho; }, 0.0, B.radius, q)
            .value;
    };
    return integrate(radial, 0.0, 2.0 * std::numbers::pi, q).value;
}

WeightPtr constant_weight(double c, int n) { return std::make_shared<ConstantWeight>(c, n); }

WeightPtr power_weight(std::vector<double> center, double a) {
    return std::make_shared<PowerWeight>(std::move(center), a);
}

WeightPtr power_weight(double center, double a) { return power_weight(std::vector<double>{center}, a); }

WeightPtr product_weight(std::vector<WeightPtr> factors) {
    return std::make_shared<ProductWeight>(std::move(factors));
}

WeightPtr callable_weight(int n, std::function<double(const Point&)> fn, std::vector<double> singular,
                          bool integrable, std::string label) {
    return std::make_shared<CallableWeight>(n, std::move(fn), std::move(singular), integrable,
                                            std::move(label));
}

WeightPtr tabulated_weight(std::vector<double> edges, std::vector<double> values) {
    return std::make_shared<TabulatedWeight>(std::move(edges), std::move(values));
}

WeightPtr weight_from_json(const nlohmann::json& spec) {
    std::string kind = spec.value("kind", "constant");
    if (kind == "constant") return constant_weight(spec.value("c", 1.0), spec.value("n", 1));
    if (kind == "power") {
        std::vector<double> c;
        if (spec.contains("center")) {
            if (spec["center"].is_array())
                c = spec["center"].get<std::vector<double>>();
            else
                c = {spec["center"].get<double>()};
        } else {
            c = std::vector<double>(spec.value("n", 1), 0.0);
        }
        return power_weight(c, spec.at("exponent").get<double>());
    }
    if (kind == "product") {
        std::vector<WeightPtr> f;
        for (const auto& s : spec.at("factors")) f.push_back(weight_from_json(s));
        return product_weight(std::move(f));
    }
    if (kind == "table")
        return tabulated_weight(spec.at("edges").get<std::vector<double>>(),
                                spec.at("values").get<std::vector<double>>());
    throw std::invalid_argument("unknown weight kind: " + kind);
}

MassCache::Key MassCache::key(const Box& b, double r) {
    return {std::vector<double>(b.lo.data(), b.lo.data() + b.lo.size()),
            std::vector<double>(b.hi.data(), b.hi.data() + b.hi.size()), r};
}

std::optional<double> MassCache::find(const Box& b, double r) const {
    std::shared_lock lock(mu_);
    auto it = map_.find(key(b, r));
    if (it == map_.end()) return std::nullopt;
    return it->second;
}

void MassCache::insert(const Box& b, double r, double value) const {
    std::unique_lock lock(mu_);
    map_.emplace(key(b, r), value);
}

std::size_t MassCache::size() const {
    std::shared_lock lock(mu_);
    return map_.size();
}

double ap_ratio(const Weight& w, const Box& Q, double p) {
    if (p < 1.0) throw std::invalid_argument("A_p requires p >= 1");
    double vol = Q.volume();
    double m = w.power_mass(Q, 1.0);
    if (!std::isfinite(m)) return kInf;
    if (p == 1.0) {
        double inv = w.ess_sup_inverse(Q);
        if (!std::isfinite(inv)) return kInf;
        return m / vol * inv;
    }
    double s = w.power_mass(Q, -1.0 / (p - 1.0));
    if (!std::isfinite(s)) return kInf;
    return m / vol * std::pow(s / vol, p - 1.0);
}

ApEstimate ap_constant(const Weight& w, double p, const std::vector<Box>& probes) {
    if (probes.empty()) throw std::invalid_argument("A_p estimate needs at least one probe");
    ApEstimate est;
    est.p = p;
    est.probes = probes.size();
    for (const auto& Q : probes) {
        double r = ap_ratio(w, Q, p);
        if (!std::isfinite(r)) {
            est.unbounded = true;
            est.value = kInf;
            est.certifying = Q;
            return est;
        }
        if (r > est.value) {
            est.value = r;
            est.certifying = Q;
        }
    }
    return est;
}

std::vector<Box> default_probes(const Weight& w, const GridWindow& window) {
    std::vector<Box> out;
    enumerate(window, [&](const Cube& Q) { out.push_back(Box::from(Q)); });
    if (w.dim() == 1) {
        for (double c : w.singular_points(0))
            for (int j = window.j_min; j <= window.j_max; ++j) {
                double h = std::ldexp(1.0, j);
                out.push_back(Box::interval(c - h, c + h));
                out.push_back(Box::interval(c, c + h));
                out.push_back(Box::interval(c - h, c));
            }
    }
    return out;
}

DualCheck dual_ratio_check(const Weight& w, const Box& Q, double p) {
    if (p <= 1.0) throw std::invalid_argument("dual characterization needs p > 1");
    DualCheck r;
    r.direct = ap_ratio(w, Q, p);
    const double vol = Q.volume();
    const double e = -1.0 / (p - 1.0);
    // f = v^e, so f^p v = v^{ep+1}; both integrals go through the weight's own mass rule.
    const double int_f = w.power_mass(Q, e);
    const double int_fpv = w.power_mass(Q, e * p + 1.0);
    double vQ = w.mass(Q);
    r.dual = std::pow(int_f / vol, p) / (int_fpv / vQ);
    r.rel = std::abs(r.dual / r.direct - 1.0);
    return r;
}

double maximal_function(const Weight& w, double x, double r_min, double r_max, int per_octave) {
    std::vector<double> radii{0.0};
    int steps = static_cast<int>(std::ceil(std::log2(r_max / r_min) * per_octave));
    for (int i = 0; i <= steps; ++i) radii.push_back(r_min * std::exp2(double(i) / per_octave));
    double best = 0.0;
    for (double s : radii)
        for (double t : radii) {
            if (s + t <= 0.0) continue;
            Box I = Box::interval(x - s, x + t);
            double m = w.power_mass(I, 1.0);
            best = std::max(best, m / (s + t));
        }
    return best;
}

ApPropertyReport check_ap_properties(const Weight& w, double p, const std::vector<Box>& probes,
                                     const std::vector<Point>& samples, std::uint64_t seed, double tol) {
    ApPropertyReport rep;
    auto est = ap_constant(w, p, probes);
    rep.estimate = est.value;
    if (est.unbounded) {
        rep.findings.push_back("A_p estimate unbounded on the probe family");
        rep.maximal_ok = rep.doubling_ok = rep.dual_ok = false;
        return rep;
    }
    if (p == 1.0 && w.dim() == 1) {
        rep.maximal_checked = true;
        for (const auto& x : samples) {
            double v = w.value(x);
            double r = maximal_function(w, x[0]) / (est.value * v);
            rep.maximal_worst = std::max(rep.maximal_worst, r);
            if (r > 1.0 + tol) {
                rep.maximal_ok = false;
                std::ostringstream os;
                os << "maximal bound exceeded at x=" << x[0] << " ratio " << r;
                rep.findings.push_back(os.str());
            }
        }
    }
    std::mt19937_64 rng(seed);
    for (const auto& Q : probes) {
        const int n = Q.dim();
        int level = 1 + static_cast<int>(rng() % 3);
        int per_axis = 1 << level;
        int total = 1;
        for (int k = 0; k < n; ++k) total *= per_axis;
        std::vector<int> pick;
        while (pick.empty())
            for (int i = 0; i < total; ++i)
                if (rng() % 2) pick.push_back(i);
        double vS = 0.0, volS = 0.0;
        for (int idx : pick) {
            Box sub = Q;
            int rem = idx;
            for (int k = 0; k < n; ++k) {
                int c = rem % per_axis;
                rem /= per_axis;
                double h = Q.edge(k) / per_axis;
                sub.lo[k] = Q.lo[k] + c * h;
                sub.hi[k] = sub.lo[k] + h;
            }
            vS += w.power_mass(sub, 1.0);
            volS += sub.volume();
        }
        double lhs = w.power_mass(Q, 1.0);
        double rhs = est.value * std::pow(Q.volume() / volS, p) * vS;
        double r = lhs / rhs;
        rep.doubling_worst = std::max(rep.doubling_worst, r);
        if (r > 1.0 + tol) {
            rep.doubling_ok = false;
            rep.findings.push_back("doubling bound exceeded");
        }
    }
    if (p > 1.0) {
        rep.dual_checked = true;
        for (const auto& Q : probes) {
            auto d = dual_ratio_check(w, Q, p);
            rep.dual_worst_rel = std::max(rep.dual_worst_rel, d.rel);
            if (d.rel > tol) {
                rep.dual_ok = false;
                rep.findings.push_back("dual ratio differs from direct ratio");
            }
        }
    }
    return rep;
}

double growth_check(const Weight& w, double estimate, const std::vector<Point>& samples) {
    Ball B{Point::Zero(w.dim()), 1.0};
    double vb = w.ball_mass(B);
    double worst = kInf;
    for (const auto& x : samples) {
        double r = w.value(x) * estimate * estimate * std::pow(1.0 + x.norm(), w.dim()) / vb;
        worst = std::min(worst, r);
    }
    return worst;
}

bool power_in_ap(double a, double p) {
    if (p == 1.0) return a > -1.0 && a <= 0.0;
    return a > -1.0 && a < p - 1.0;
}

}  // namespace wcddd
