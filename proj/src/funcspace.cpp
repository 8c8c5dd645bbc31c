#include "wcddd/funcspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace wcddd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp_unit(double t) { return std::clamp(t, 0.0, 1.0); }

// Cubic bridge 3t^2 - 2t^3 and its derivative.
double smoothstep(double t) {
    t = clamp_unit(t);
    return t * t * (3.0 - 2.0 * t);
}
double smoothstep_d(double t) { return (t <= 0.0 || t >= 1.0) ? 0.0 : 6.0 * t * (1.0 - t); }

class ConstantFn final : public TestFunction {
public:
    ConstantFn(double c, int n) : c_(c), n_(n) {}
    int dim() const override { return n_; }
    double eval(const double*) const override { return c_; }
    void grad(const double*, double* g) const override { std::fill(g, g + n_, 0.0); }
    double lipschitz() const override { return 0.0; }
    double support_radius() const override { return 0.0; }
    double sup_abs() const override { return std::abs(c_); }
    std::optional<double> exact_omega(const Box&) const override { return 0.0; }
    bool monotone() const override { return n_ == 1; }
    std::optional<std::vector<GradientPiece>> gradient_pieces() const override {
        return std::vector<GradientPiece>{};
    }
    std::string name() const override { return "constant"; }
    nlohmann::json params() const override { return {{"c", c_}}; }

private:
    double c_;
    int n_;
};

class LinearFn final : public TestFunction {
public:
    explicit LinearFn(std::vector<double> s) : s_(std::move(s)) {
        if (s_.empty()) throw std::invalid_argument("linear: empty slope");
    }
    int dim() const override { return static_cast<int>(s_.size()); }
    double eval(const double* x) const override {
        double v = 0.0;
        for (std::size_t k = 0; k < s_.size(); ++k) v += s_[k] * x[k];
        return v;
    }
    void grad(const double*, double* g) const override { std::copy(s_.begin(), s_.end(), g); }
    double lipschitz() const override {
        double a = 0.0;
        for (double v : s_) a += v * v;
        return std::sqrt(a);
    }
    double support_radius() const override { return lipschitz() == 0.0 ? 0.0 : kInf; }
    double sup_abs() const override { return lipschitz() == 0.0 ? 0.0 : kInf; }
    std::optional<double> exact_omega(const Box& Q) const override {
        if (dim() != 1) return std::nullopt;
        return std::abs(s_[0]) * Q.edge(0) / 3.0;
    }
    bool monotone() const override { return dim() == 1 && s_[0] >= 0.0; }
    std::optional<std::vector<GradientPiece>> gradient_pieces() const override {
        if (dim() != 1) return std::nullopt;
        return std::vector<GradientPiece>{{-kInf, kInf, std::abs(s_[0]), 0.0, 0.0}};
    }
    std::string name() const override { return "linear"; }
    nlohmann::json params() const override { return {{"slope", s_}}; }

private:
    std::vector<double> s_;
};

class LinearRampFn final : public TestFunction {
public:
    LinearRampFn(double s, double r) : s_(s), r_(r) {
        if (!(r > 0)) throw std::invalid_argument("linear_ramp: cutoff must be positive");
    }
    int dim() const override { return 1; }
    double eval(const double* x) const override { return s_ * std::clamp(x[0], -r_, r_); }
    void grad(const double* x, double* g) const override {
        g[0] = (x[0] >= -r_ && x[0] < r_) ? s_ : 0.0;
    }
    std::vector<double> breakpoints(int) const override { return {-r_, r_}; }
    double lipschitz() const override { return std::abs(s_); }
    double support_radius() const override { return r_; }
    double sup_abs() const override { return std::abs(s_) * r_; }
    bool monotone() const override { return s_ >= 0.0; }
    std::optional<std::vector<GradientPiece>> gradient_pieces() const override {
        return std::vector<GradientPiece>{{-r_, r_, std::abs(s_), 0.0, 0.0}};
    }
    std::string name() const override { return "linear_ramp"; }
    nlohmann::json params() const override { return {{"slope", s_}, {"cutoff", r_}}; }

private:
    double s_, r_;
};

class TentFn final : public TestFunction {
public:
    TentFn(double c, double r, int n) : c_(c), r_(r), n_(n) {
        if (!(r > 0)) throw std::invalid_argument("tent: radius must be positive");
        if (n < 1 || n > 2) throw DimensionError("tent: n must be 1 or 2");
    }
    int dim() const override { return n_; }
    double eval(const double* x) const override { return std::max(0.0, 1.0 - dist(x) / r_); }
    void grad(const double* x, double* g) const override {
        double d = dist(x);
        for (int k = 0; k < n_; ++k) g[k] = (d > 0 && d < r_) ? -(x[k] - c_) / (d * r_) : 0.0;
    }
    std::vector<double> breakpoints(int) const override { return {c_ - r_, c_, c_ + r_}; }
    double lipschitz() const override { return 1.0 / r_; }
    double support_radius() const override { return std::abs(c_) * std::sqrt(double(n_)) + r_; }
    double sup_abs() const override { return 1.0; }
    std::optional<std::vector<GradientPiece>> gradient_pieces() const override {
        if (n_ != 1) return std::nullopt;
        return std::vector<GradientPiece>{{c_ - r_, c_ + r_, 1.0 / r_, 0.0, 0.0}};
    }
    std::string name() const override { return "tent"; }
    nlohmann::json params() const override { return {{"center", c_}, {"radius", r_}}; }

private:
    double dist(const double* x) const {
        double a = 0.0;
        for (int k = 0; k < n_; ++k) a += (x[k] - c_) * (x[k] - c_);
        return std::sqrt(a);
    }
    double c_, r_;
    int n_;
};

class IndicatorFn final : public TestFunction {
public:
    IndicatorFn(std::vector<double> a, std::vector<double> b) : a_(std::move(a)), b_(std::move(b)) {
        if (a_.size() != b_.size() || a_.empty()) throw DimensionError("indicator: corner mismatch");
        for (std::size_t k = 0; k < a_.size(); ++k)
            if (!(a_[k] < b_[k])) throw std::invalid_argument("indicator: empty box");
    }
    int dim() const override { return static_cast<int>(a_.size()); }
    double eval(const double* x) const override {
        for (std::size_t k = 0; k < a_.size(); ++k)
            if (x[k] < a_[k] || x[k] >= b_[k]) return 0.0;
        return 1.0;
    }
    void grad(const double*, double* g) const override { std::fill(g, g + dim(), 0.0); }
    std::vector<double> breakpoints(int axis) const override { return {a_[axis], b_[axis]}; }
    double lipschitz() const override { return kInf; }
    double support_radius() const override {
        double r = 0.0;
        for (std::size_t k = 0; k < a_.size(); ++k) {
            double m = std::max(std::abs(a_[k]), std::abs(b_[k]));
            r += m * m;
        }
        return std::sqrt(r);
    }
    double sup_abs() const override { return 1.0; }
    std::optional<double> exact_omega(const Box& Q) const override {
        double vol = Q.volume(), in = 1.0;
        for (std::size_t k = 0; k < a_.size(); ++k)
            in *= std::max(0.0, std::min(Q.hi[k], b_[k]) - std::max(Q.lo[k], a_[k]));
        double n = static_cast<double>(dim());
        return 2.0 * std::pow(vol, -1.0 - 1.0 / n) * in * (vol - in);
    }
    std::string name() const override { return "indicator"; }
    nlohmann::json params() const override { return {{"a", a_}, {"b", b_}}; }

private:
    std::vector<double> a_, b_;
};

// 1 on [0,1]^n, cubic bridges of the given width, product over axes.
class SmoothedIndicatorFn final : public TestFunction {
public:
    SmoothedIndicatorFn(double w, int n, std::string label) : w_(w), n_(n), label_(std::move(label)) {
        if (!(w > 0)) throw std::invalid_argument("smoothed_indicator: width must be positive");
        if (n < 1 || n > 2) throw DimensionError("smoothed_indicator: n must be 1 or 2");
    }
    int dim() const override { return n_; }
    double eval(const double* x) const override {
        double v = 1.0;
        for (int k = 0; k < n_; ++k) v *= g(x[k]);
        return v;
    }
    void grad(const double* x, double* out) const override {
        for (int k = 0; k < n_; ++k) {
            double v = dg(x[k]);
            for (int l = 0; l < n_; ++l)
                if (l != k) v *= g(x[l]);
            out[k] = v;
        }
    }
    std::vector<double> breakpoints(int) const override { return {-w_, 0.0, 1.0, 1.0 + w_}; }
    double lipschitz() const override { return 1.5 / w_ * std::sqrt(double(n_)); }
    double support_radius() const override { return std::sqrt(double(n_)) * (1.0 + w_); }
    double sup_abs() const override { return 1.0; }
    std::string name() const override { return label_; }
    nlohmann::json params() const override {
        if (label_ == "sharp1_bump") return nlohmann::json::object();
        return {{"width", w_}};
    }

private:
    double g(double x) const {
        if (x < 0.0) return smoothstep((x + w_) / w_);
        if (x > 1.0) return smoothstep((1.0 + w_ - x) / w_);
        return 1.0;
    }
    double dg(double x) const {
        if (x < 0.0) return smoothstep_d((x + w_) / w_) / w_;
        if (x > 1.0) return -smoothstep_d((1.0 + w_ - x) / w_) / w_;
        return 0.0;
    }
    double w_;
    int n_;
    std::string label_;
};

class PowerRampFn final : public TestFunction {
public:
    PowerRampFn(double e, std::string label, nlohmann::json params)
        : e_(e), label_(std::move(label)), params_(std::move(params)) {
        if (!(e > 0)) throw std::invalid_argument("power ramp exponent must be positive");
    }
    int dim() const override { return 1; }
    double eval(const double* x) const override {
        if (x[0] <= 0.0) return 0.0;
        if (x[0] >= 1.0) return 1.0 / e_;
        return std::pow(x[0], e_) / e_;
    }
    void grad(const double* x, double* g) const override {
        g[0] = (x[0] > 0.0 && x[0] < 1.0) ? std::pow(x[0], e_ - 1.0) : 0.0;
    }
    std::vector<double> breakpoints(int) const override { return {0.0, 1.0}; }
    double lipschitz() const override { return e_ >= 1.0 ? 1.0 : kInf; }
    bool continuous() const override { return true; }
    double support_radius() const override { return 1.0; }
    double sup_abs() const override { return 1.0 / e_; }
    bool monotone() const override { return true; }
    std::optional<std::vector<GradientPiece>> gradient_pieces() const override {
        return std::vector<GradientPiece>{{0.0, 1.0, 1.0, 0.0, e_ - 1.0}};
    }
    std::vector<double> singular_points() const override {
        if (e_ < 1.0) return {0.0};
        return {};
    }
    std::string name() const override { return label_; }
    nlohmann::json params() const override { return params_; }

private:
    double e_;
    std::string label_;
    nlohmann::json params_;
};

class CallableFn final : public TestFunction {
public:
    CallableFn(int n, std::function<double(const double*)> f,
               std::function<void(const double*, double*)> g, double lip, double support,
               std::vector<double> breaks, std::string label)
        : n_(n), f_(std::move(f)), g_(std::move(g)), lip_(lip), support_(support),
          breaks_(std::move(breaks)), label_(std::move(label)) {}
    int dim() const override { return n_; }
    double eval(const double* x) const override { return f_(x); }
    void grad(const double* x, double* g) const override { g_(x, g); }
    std::vector<double> breakpoints(int) const override { return breaks_; }
    double lipschitz() const override { return lip_; }
    double support_radius() const override { return support_; }
    double sup_abs() const override { return kInf; }
    std::string name() const override { return label_; }
    nlohmann::json params() const override { return nlohmann::json::object(); }

private:
    int n_;
    std::function<double(const double*)> f_;
    std::function<void(const double*, double*)> g_;
    double lip_, support_;
    std::vector<double> breaks_;
    std::string label_;
};

std::vector<double> as_vector(const nlohmann::json& v, int n) {
    if (v.is_array()) return v.get<std::vector<double>>();
    return std::vector<double>(static_cast<std::size_t>(n), v.get<double>());
}

Quadrature fine() {
    Quadrature q;
    q.rel_tol = 1e-11;
    q.abs_tol = 1e-15;
    return q;
}

// Scale factor k and (center, exponent) when w = k |x - c|^a in n = 1.
std::optional<std::tuple<double, double, double>> scaled_power(const Weight& w) {
    if (w.dim() != 1) return std::nullopt;
    if (auto pf = w.power_form()) return std::make_tuple(1.0, pf->first, pf->second);
    if (w.kind() == "constant") return std::make_tuple(w.describe()["c"].get<double>(), 0.0, 0.0);
    return std::nullopt;
}

std::vector<double> merged(std::vector<double> a, const std::vector<double>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

FunctionPtr constant_function(double c, int n) { return std::make_shared<ConstantFn>(c, n); }
FunctionPtr linear_function(std::vector<double> slope) {
    return std::make_shared<LinearFn>(std::move(slope));
}
FunctionPtr linear_ramp(double slope, double cutoff) {
    return std::make_shared<LinearRampFn>(slope, cutoff);
}
FunctionPtr tent(double center, double radius, int n) {
    return std::make_shared<TentFn>(center, radius, n);
}
FunctionPtr indicator(std::vector<double> a, std::vector<double> b) {
    return std::make_shared<IndicatorFn>(std::move(a), std::move(b));
}
FunctionPtr smoothed_indicator(double width, int n) {
    return std::make_shared<SmoothedIndicatorFn>(width, n, "smoothed_indicator");
}
FunctionPtr sharp1_bump() { return std::make_shared<SmoothedIndicatorFn>(1.0, 1, "sharp1_bump"); }
FunctionPtr power_ramp(double e) {
    return std::make_shared<PowerRampFn>(e, "power_ramp", nlohmann::json{{"exponent", e}});
}
FunctionPtr sharp2_fdelta(double delta) {
    if (!(delta > 0 && delta < 1)) throw std::invalid_argument("sharp2_fdelta: delta must lie in (0,1)");
    return std::make_shared<PowerRampFn>(delta, "sharp2_fdelta", nlohmann::json{{"delta", delta}});
}
FunctionPtr sharp3_fbeta(double beta, double p) {
    if (!(p >= 1)) throw std::invalid_argument("sharp3_fbeta: p must be >= 1");
    if (!(beta > 1.0 / p - 1.0 && beta < 1.0 / p))
        throw std::invalid_argument("sharp3_fbeta: beta must lie in (1/p - 1, 1/p)");
    return std::make_shared<PowerRampFn>(beta + 1.0 - 1.0 / p, "sharp3_fbeta",
                                         nlohmann::json{{"beta", beta}, {"p", p}});
}
FunctionPtr callable_function(int n, std::function<double(const double*)> f,
                              std::function<void(const double*, double*)> g, double lipschitz,
                              double support, std::vector<double> breaks, std::string label) {
    return std::make_shared<CallableFn>(n, std::move(f), std::move(g), lipschitz, support,
                                        std::move(breaks), std::move(label));
}

std::vector<std::string> catalog_names() {
    return {"constant",           "linear",      "linear_ramp",   "tent",        "indicator",
            "smoothed_indicator", "sharp1_bump", "sharp2_fdelta", "sharp3_fbeta"};
}

FunctionPtr catalog(const std::string& name, const nlohmann::json& p, int n) {
    auto get = [&](const char* key, double def) { return p.contains(key) ? p[key].get<double>() : def; };
    if (name == "constant") return constant_function(get("c", 1.0), n);
    if (name == "linear") {
        if (p.contains("slope")) return linear_function(as_vector(p["slope"], n));
        return linear_function(std::vector<double>(static_cast<std::size_t>(n), 1.0));
    }
    if (name == "linear_ramp") {
        if (n != 1) throw DimensionError("linear_ramp is one-dimensional");
        return linear_ramp(get("slope", 1.0), get("cutoff", 10.0));
    }
    if (name == "tent") return tent(get("center", 1.0), get("radius", 1.0), n);
    if (name == "indicator") {
        auto a = p.contains("a") ? as_vector(p["a"], n) : std::vector<double>(n, 0.0);
        auto b = p.contains("b") ? as_vector(p["b"], n) : std::vector<double>(n, 1.0);
        return indicator(a, b);
    }
    if (name == "smoothed_indicator") return smoothed_indicator(get("width", 0.5), n);
    if (n != 1) throw DimensionError(name + " is one-dimensional");
    if (name == "sharp1_bump") return sharp1_bump();
    if (name == "sharp2_fdelta") return sharp2_fdelta(get("delta", 0.5));
    if (name == "sharp3_fbeta") return sharp3_fbeta(get("beta", 0.25), get("p", 2.0));
    throw std::invalid_argument("unknown catalog function: " + name);
}

SeminormResult sobolev_seminorm(const TestFunction& f, const Weight& w, double p, const Box& window,
                                const Quadrature& q) {
    if (!(p >= 1)) throw std::invalid_argument("sobolev_seminorm: p must be >= 1");
    if (f.dim() != w.dim() || window.dim() != f.dim())
        throw DimensionError("sobolev_seminorm: dimension mismatch");
    if (!f.continuous()) throw DomainError("sobolev_seminorm: " + f.name() + " has jumps");
    SeminormResult out;
    if (f.dim() == 1) {
        double L = window.lo[0], U = window.hi[0];
        auto pieces = f.gradient_pieces();
        auto sp = scaled_power(w);
        if (pieces && sp) {
            auto [k, cw, a] = *sp;
            double total = 0.0;
            bool closed = true;
            for (const auto& g : *pieces) {
                double lo = std::max(g.lo, L), hi = std::min(g.hi, U);
                if (!(hi > lo) || g.coef == 0.0) continue;
                double pe = p * g.exponent, s = k * std::pow(g.coef, p);
                double v;
                if (pe == 0.0) {
                    v = power_integral_1d(lo - cw, hi - cw, a);
                } else if (a == 0.0) {
                    v = power_integral_1d(lo - g.center, hi - g.center, pe);
                } else if (g.center == cw) {
                    v = power_integral_1d(lo - cw, hi - cw, pe + a);
                } else {
                    closed = false;
                    break;
                }
                total += s * v;
            }
            if (closed) {
                if (!std::isfinite(total)) throw DomainError("sobolev_seminorm: not integrable");
                out.pth = total;
                out.norm = std::pow(total, 1.0 / p);
                out.closed_form = true;
                return out;
            }
        }
        auto integrand = [&](double x) {
            double g;
            f.grad(&x, &g);
            if (g == 0.0) return 0.0;
            Point pt(1);
            pt[0] = x;
            return std::pow(std::abs(g), p) * w.value(pt);
        };
        auto r = integrate(integrand, L, U, q, f.breakpoints(0),
                           merged(f.singular_points(), w.singular_points(0)));
        if (!std::isfinite(r.value)) throw DomainError("sobolev_seminorm: not integrable");
        out.pth = r.value;
        out.norm = std::pow(r.value, 1.0 / p);
        out.converged = r.converged;
        return out;
    }
    if (f.dim() != 2) throw DimensionError("sobolev_seminorm: n must be 1 or 2");
    auto integrand = [&](double x, double y) {
        double pt[2] = {x, y}, g[2];
        f.grad(pt, g);
        double m = std::hypot(g[0], g[1]);
        if (m == 0.0) return 0.0;
        Point P(2);
        P << x, y;
        return std::pow(m, p) * w.value(P);
    };
    auto r = integrate2(integrand, window.lo[0], window.hi[0], window.lo[1], window.hi[1], q,
                        merged(f.breakpoints(0), w.singular_points(0)),
                        merged(f.breakpoints(1), w.singular_points(1)));
    if (!std::isfinite(r.value)) throw DomainError("sobolev_seminorm: not integrable");
    out.pth = r.value;
    out.norm = std::pow(r.value, 1.0 / p);
    out.converged = r.converged;
    return out;
}

SeminormResult lp_norm(const TestFunction& f, const Weight& w, double p, const Box& window,
                       const Quadrature& q) {
    if (!(p >= 1)) throw std::invalid_argument("lp_norm: p must be >= 1");
    if (f.dim() != w.dim() || window.dim() != f.dim()) throw DimensionError("lp_norm: dimension mismatch");
    SeminormResult out;
    QuadResult r;
    if (f.dim() == 1) {
        auto integrand = [&](double x) {
            double v = f.eval(&x);
            if (v == 0.0) return 0.0;
            Point pt(1);
            pt[0] = x;
            return std::pow(std::abs(v), p) * w.value(pt);
        };
        r = integrate(integrand, window.lo[0], window.hi[0], q, f.breakpoints(0),
                      merged(f.singular_points(), w.singular_points(0)));
    } else if (f.dim() == 2) {
        auto integrand = [&](double x, double y) {
            double pt[2] = {x, y};
            double v = f.eval(pt);
            if (v == 0.0) return 0.0;
            Point P(2);
            P << x, y;
            return std::pow(std::abs(v), p) * w.value(P);
        };
        r = integrate2(integrand, window.lo[0], window.hi[0], window.lo[1], window.hi[1], q,
                       merged(f.breakpoints(0), w.singular_points(0)),
                       merged(f.breakpoints(1), w.singular_points(1)));
    } else {
        throw DimensionError("lp_norm: n must be 1 or 2");
    }
    if (!std::isfinite(r.value)) throw DomainError("lp_norm: not integrable");
    out.pth = r.value;
    out.norm = std::pow(r.value, 1.0 / p);
    out.converged = r.converged;
    return out;
}

double ball_mean(const TestFunction& f, const Point& center, double radius) {
    if (!(radius > 0)) throw std::invalid_argument("ball_mean: radius must be positive");
    if (f.dim() == 1) {
        double c = center[0];
        auto r = integrate([&](double x) { return f.eval(&x); }, c - radius, c + radius, fine(),
                           f.breakpoints(0), f.singular_points());
        return r.value / (2.0 * radius);
    }
    if (f.dim() != 2) throw DimensionError("ball_mean: n must be 1 or 2");
    auto polar = [&](double rho, double th) {
        double pt[2] = {center[0] + rho * std::cos(th), center[1] + rho * std::sin(th)};
        return f.eval(pt) * rho;
    };
    Quadrature q = fine();
    q.rel_tol = 1e-9;
    auto r = integrate2(polar, 0.0, radius, 0.0, 2.0 * std::numbers::pi, q);
    return r.value / (std::numbers::pi * radius * radius);
}

}  // namespace wcddd
