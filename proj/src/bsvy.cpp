#include "wcddd/bsvy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "wcddd/quadrature.hpp"

namespace wcddd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double distance(const Point& x, const Point& y) { return (x - y).norm(); }

// Mean of f over [a,b] by composite Gauss on the breakpoint pieces.
double interval_mean(const TestFunction& f, double a, double b) {
    double v = gauss_composite([&](double x) { return f.eval(&x); }, a, b, 10, 1, f.breakpoints(0));
    return v / (b - a);
}

// Fixed polar product rule in n = 2; adaptive ball_mean stalls on kinks that cut the disk.
double fast_ball_mean(const TestFunction& f, const Point& c, double r) {
    if (f.dim() == 1) return interval_mean(f, c[0] - r, c[0] + r);
    if (f.dim() != 2) return ball_mean(f, c, r);
    auto ring = [&](double rho) {
        auto arc = [&](double th) {
            double pt[2] = {c[0] + rho * std::cos(th), c[1] + rho * std::sin(th)};
            return f.eval(pt);
        };
        return rho * gauss_composite(arc, 0.0, 2.0 * std::numbers::pi, 10, 8);
    };
    return gauss_composite(ring, 0.0, r, 10, 4) / (std::numbers::pi * r * r);
}

// Radial cutoffs for {t : D(t) > lambda t^{1+s}} given D(t) <= min(L t, S).
struct Cutoffs {
    double t_lo = 0.0;
    double t_hi = kInf;
    bool empty = false;
};

Cutoffs cutoffs(double lip, double bound, double lambda, double s) {
    Cutoffs c;
    if (lip == 0.0 || bound == 0.0) {
        c.empty = true;
        return c;
    }
    if (std::isfinite(lip) && s != 0.0) {
        double t = std::pow(lip / lambda, 1.0 / s);
        if (s > 0) c.t_hi = std::min(c.t_hi, t);
        else c.t_lo = std::max(c.t_lo, t);
    }
    if (std::isfinite(bound)) {
        double k = 1.0 + s;
        if (k == 0.0) {
            if (lambda >= bound) c.empty = true;
        } else {
            double t = std::pow(bound / lambda, 1.0 / k);
            if (k > 0) c.t_hi = std::min(c.t_hi, t);
            else c.t_lo = std::max(c.t_lo, t);
        }
    }
    if (!(c.t_hi > c.t_lo)) c.empty = true;
    return c;
}

// int over R^n of 1{D(x, x + t e) > lambda t^{1+s}} t^{gamma - 1} dt de, where D is the
// difference functional and lip_factor scales the Lipschitz cutoff.
InnerResult inner_generic(const TestFunction& f, const Point& x, double lambda, double s, double gamma,
                          const std::function<double(const Point&, const Point&)>& diff,
                          double lip_factor, const BsvyConfig& cfg) {
    if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
    const int n = f.dim();
    InnerResult out;
    auto cut = cutoffs(f.lipschitz() * lip_factor, 2.0 * f.sup_abs(), lambda, s);
    if (cut.empty) return out;
    double scale = 1.0 + x.norm();
    if (gamma > 0 && !std::isfinite(cut.t_hi)) {
        cut.t_hi = 1e6 * scale;
        out.truncated = true;
        out.tail_bound = kInf;
    }
    if (gamma < 0 && cut.t_lo == 0.0) {
        cut.t_lo = 1e-9 * scale;
        out.truncated = true;
        out.tail_bound = kInf;
    }
    std::vector<std::pair<Point, double>> dirs;
    if (n == 1) {
        dirs.emplace_back(Point::Constant(1, 1.0), 1.0);
        dirs.emplace_back(Point::Constant(1, -1.0), 1.0);
    } else if (n == 2) {
        int K = std::max(cfg.directions, 4);
        for (int k = 0; k < K; ++k) {
            double th = 2.0 * std::numbers::pi * k / K;
            Point e(2);
            e << std::cos(th), std::sin(th);
            dirs.emplace_back(e, 2.0 * std::numbers::pi / K);
        }
    } else {
        throw DimensionError("inner integral supports n = 1 or 2");
    }
    for (const auto& [e, wdir] : dirs) {
        std::vector<double> extra;
        if (n == 1)
            for (double b : f.breakpoints(0)) {
                double t = (b - x[0]) * e[0];
                if (t > 0) extra.push_back(t);
            }
        Point y(n);
        auto member = [&](double t) {
            y = x + t * e;
            return diff(x, y) > lambda * std::pow(t, 1.0 + s);
        };
        out.value += wdir * radial_measure(member, gamma, cut.t_lo, cut.t_hi, cfg.samples, extra);
    }
    return out;
}

double outer_integral(const BsvyConfig& cfg, const TestFunction& f, const std::function<double(const Point&)>& g,
                      bool& converged) {
    const Weight& w = *cfg.weight;
    Quadrature q;
    q.rel_tol = cfg.outer_tol;
    q.abs_tol = 1e-300;
    q.max_depth = 12;
    if (f.dim() == 1) {
        auto integrand = [&](double x) {
            Point pt(1);
            pt[0] = x;
            double v = g(pt);
            return v == 0.0 ? 0.0 : v * w.value(pt);
        };
        auto r = integrate(integrand, cfg.window.lo[0], cfg.window.hi[0], q, f.breakpoints(0),
                           w.singular_points(0));
        converged = r.converged;
        return r.value;
    }
    q.scheme = Quadrature::Scheme::TensorGauss;
    q.gauss_order = 5;
    q.panels = 4;
    auto integrand = [&](double x, double y) {
        Point pt(2);
        pt << x, y;
        double v = g(pt);
        return v == 0.0 ? 0.0 : v * w.value(pt);
    };
    auto r = integrate2(integrand, cfg.window.lo[0], cfg.window.hi[0], cfg.window.lo[1],
                        cfg.window.hi[1], q, f.breakpoints(0), f.breakpoints(1));
    converged = r.converged;
    return r.value;
}

}  // namespace

bool in_gamma_set(double p, double q, double gamma) {
    if (gamma == 0.0) return false;
    if (p == 1.0) return gamma < -q || gamma > 0.0;
    return true;
}

bool scale_condition(int n, double p, double q) { return n * (1.0 / p - 1.0 / q) < 1.0; }

void validate(const BsvyConfig& cfg) {
    if (!(cfg.q > 0)) throw std::invalid_argument("q must be positive");
    if (!(cfg.p >= 1)) throw std::invalid_argument("p must be >= 1");
    if (cfg.gamma == 0.0) throw std::invalid_argument("gamma violates Gamma_{p,q}: gamma must be nonzero");
    if (!cfg.weight) throw std::invalid_argument("missing weight");
    if (cfg.weight->dim() != cfg.window.dim()) throw DimensionError("weight and window dimensions differ");
    if (cfg.exploratory) return;
    if (!in_gamma_set(cfg.p, cfg.q, cfg.gamma))
        throw std::invalid_argument("gamma violates Gamma_{p,q}");
    if (!scale_condition(cfg.window.dim(), cfg.p, cfg.q))
        throw std::invalid_argument("scale condition n(1/p - 1/q) < 1 violated");
}

bool in_level_set(const TestFunction& f, const Point& x, const Point& y, double lambda, double s) {
    double t = distance(x, y);
    if (t == 0.0) throw std::invalid_argument("level set needs x != y");
    return std::abs(f.value(x) - f.value(y)) > lambda * std::pow(t, 1.0 + s);
}

double radial_measure(const std::function<bool(double)>& member, double gamma, double t_lo,
                      double t_hi, int samples, const std::vector<double>& extra_t) {
    if (!(t_hi > t_lo) || gamma == 0.0) return 0.0;
    double ua, ub;
    if (gamma > 0) {
        ua = t_lo > 0 ? std::pow(t_lo, gamma) : 0.0;
        ub = std::pow(t_hi, gamma);
    } else {
        ua = std::isfinite(t_hi) ? std::pow(t_hi, gamma) : 0.0;
        ub = std::pow(t_lo, gamma);
    }
    if (!(ub > ua) || !std::isfinite(ub)) return 0.0;
    auto t_of = [gamma](double u) { return std::pow(u, 1.0 / gamma); };
    const int N = std::max(samples, 4);
    std::vector<double> us;
    us.reserve(2 * N + 3 * extra_t.size());
    for (int i = 0; i < N; ++i) us.push_back(ua + (ub - ua) * (i + 0.5) / N);
    double l0 = std::max(ua, ub * 1e-14);
    if (l0 > 0) {
        double r = std::log(ub / l0);
        for (int i = 0; i < N; ++i) us.push_back(l0 * std::exp(r * (i + 0.5) / N));
    }
    for (double t : extra_t) {
        if (!(t > t_lo && t < t_hi)) continue;
        double u = std::pow(t, gamma);
        for (double fac : {1.0 - 1e-9, 1.0 + 1e-9}) {
            double v = u * fac;
            if (v > ua && v < ub) us.push_back(v);
        }
    }
    std::sort(us.begin(), us.end());
    us.erase(std::unique(us.begin(), us.end()), us.end());
    std::vector<char> in(us.size());
    for (std::size_t i = 0; i < us.size(); ++i) in[i] = member(t_of(us[i]));
    double total = 0.0;
    if (in.front()) total += us.front() - ua;
    if (in.back()) total += ub - us.back();
    for (std::size_t i = 0; i + 1 < us.size(); ++i) {
        double a = us[i], b = us[i + 1];
        if (in[i] && in[i + 1]) {
            total += b - a;
        } else if (in[i] != in[i + 1]) {
            bool left = in[i];
            double lo = a, hi = b;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(std::abs(hi), 1e-300); ++it) {
                double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                if (static_cast<bool>(member(t_of(mid))) == left) lo = mid;
                else hi = mid;
            }
            double cut = 0.5 * (lo + hi);
            total += left ? cut - a : b - cut;
        }
    }
    return total / std::abs(gamma);
}

InnerResult inner_integral(const TestFunction& f, const Point& x, double lambda, const BsvyConfig& cfg) {
    double s = cfg.gamma / cfg.q;
    auto diff = [&](const Point& a, const Point& b) { return std::abs(f.value(a) - f.value(b)); };
    return inner_generic(f, x, lambda, s, cfg.gamma, diff, 1.0, cfg);
}

Table BsvyProfile::table() const {
    Table t;
    t.columns = {"lambda", "functional", "tail_flag"};
    for (std::size_t i = 0; i < lambdas.size(); ++i)
        t.rows.push_back({lambdas[i], values[i], truncated[i] ? 1.0 : 0.0});
    return t;
}

BsvyProfile bsvy_functional(const BsvyConfig& cfg, const TestFunction& f) {
    validate(cfg);
    if (f.dim() != cfg.window.dim()) throw DimensionError("function and window dimensions differ");
    BsvyProfile prof;
    prof.lambdas = cfg.lambdas.values(cfg.lambdas.lo, cfg.lambdas.hi);
    for (double lam : prof.lambdas) {
        bool trunc = false, conv = true;
        auto g = [&](const Point& x) {
            auto r = inner_integral(f, x, lam, cfg);
            trunc = trunc || r.truncated;
            return r.value == 0.0 ? 0.0 : std::pow(r.value, cfg.p / cfg.q);
        };
        double I = outer_integral(cfg, f, g, conv);
        double v = lam * std::pow(I, 1.0 / cfg.p);
        prof.values.push_back(v);
        prof.truncated.push_back(trunc || !conv);
        if (v > prof.sup) {
            prof.sup = v;
            prof.argmax_lambda = lam;
        }
    }
    return prof;
}

double lower_constant(int n, double q, double gamma) {
    if (!(q > 0) || gamma == 0.0) throw std::invalid_argument("lower_constant needs q > 0, gamma != 0");
    double c = 2.0 * std::tgamma(0.5 * (q + 1.0)) * std::pow(std::numbers::pi, 0.5 * (n - 1)) /
               (std::abs(gamma) * std::tgamma(0.5 * (q + n)));
    return std::pow(c, 1.0 / q);
}

VerificationRecord verify_bsvy(const BsvyConfig& cfg, const TestFunction& f) {
    VerificationRecord rec;
    rec.check = "bsvy";
    const int n = cfg.window.dim();
    rec.params = {{"p", cfg.p},       {"q", cfg.q},
                  {"gamma", cfg.gamma}, {"n", n},
                  {"function", f.name()}, {"function_params", f.params()},
                  {"weight", cfg.weight ? cfg.weight->describe() : nlohmann::json()}};
    bool adm = in_gamma_set(cfg.p, cfg.q, cfg.gamma) && scale_condition(n, cfg.p, cfg.q);
    rec.diagnostics["admissible"] = adm;
    auto prof = bsvy_functional(cfg, f);
    auto grad = sobolev_seminorm(f, *cfg.weight, cfg.p, cfg.window);
    double lc = lower_constant(n, cfg.q, cfg.gamma);
    rec.lhs = prof.sup;
    rec.rhs = grad.norm;
    rec.ratio = grad.norm > 0 ? prof.sup / grad.norm : (prof.sup == 0 ? 0.0 : kInf);
    // liminf over the last decade toward L.
    double tail_min = kInf;
    double lmin = prof.lambdas.front(), lmax = prof.lambdas.back();
    double span = std::pow(10.0, cfg.decade);
    for (std::size_t i = 0; i < prof.lambdas.size(); ++i) {
        double lam = prof.lambdas[i];
        bool in_tail = cfg.gamma > 0 ? lam >= lmax / span : lam <= lmin * span;
        if (in_tail && grad.norm > 0) tail_min = std::min(tail_min, prof.values[i] / grad.norm);
    }
    std::vector<double> ratios;
    bool any_trunc = false;
    for (std::size_t i = 0; i < prof.values.size(); ++i) {
        ratios.push_back(grad.norm > 0 ? prof.values[i] / grad.norm : 0.0);
        any_trunc = any_trunc || prof.truncated[i];
    }
    rec.diagnostics["lower_const"] = lc;
    rec.diagnostics["tail_liminf"] = tail_min;
    rec.diagnostics["ratios"] = ratios;
    rec.diagnostics["lambdas"] = prof.lambdas;
    rec.diagnostics["truncated"] = any_trunc;
    rec.diagnostics["gradient_norm"] = grad.norm;
    rec.diagnostics["argmax_lambda"] = prof.argmax_lambda;
    if (grad.norm == 0.0) {
        rec.verdict = prof.sup == 0.0 ? "pass" : "fail";
        return rec;
    }
    bool lower_ok = tail_min >= lc * (1.0 - cfg.tol);
    bool upper_ok = rec.ratio <= cfg.ceiling;
    if (lower_ok && upper_ok) {
        rec.verdict = "pass";
    } else {
        rec.verdict = "fail";
        rec.reason = !lower_ok ? "tail below lower constant" : "ratio exceeds ceiling";
    }
    if (!adm) rec.reason += rec.reason.empty() ? "exploratory" : "; exploratory";
    return rec;
}

SplitMembership split_and_mean_sets(const TestFunction& f, const Point& x, const Point& y,
                                    double lambda, double s) {
    double t = distance(x, y);
    if (t == 0.0) throw std::invalid_argument("split needs x != y");
    SplitMembership m;
    double fx = f.value(x), fy = f.value(y);
    m.mean = fast_ball_mean(f, y, t / 20.0);
    double thr = lambda * std::pow(t, 1.0 + s);
    m.in_e = std::abs(fx - fy) > thr;
    m.in_e1 = std::abs(fx - m.mean) > 0.5 * thr;
    m.in_e2 = std::abs(fy - m.mean) > 0.5 * thr;
    return m;
}

VerificationRecord point_domination_check(const TestFunction& f, const WeightPtr& w, double p,
                                          double q, double beta, double lambda, const Box& window,
                                          double eps, const PointDominationOptions& opt) {
    if (!(q >= p)) throw std::invalid_argument("point domination needs q >= p");
    if (beta == 1.0 / p) throw std::invalid_argument("beta must differ from 1/p");
    if (!(eps > 0 && eps < 1)) throw std::invalid_argument("eps must lie in (0,1)");
    const int n = f.dim();
    const double s = n * (beta - 1.0 / p), gamma = q * s;
    VerificationRecord rec;
    rec.check = "point_domination";
    rec.params = {{"p", p},         {"q", q},     {"beta", beta},      {"lambda", lambda},
                  {"eps", eps},     {"n", n},     {"function", f.name()},
                  {"c_lambda", opt.c_lambda}, {"constant", opt.constant}};
    BsvyConfig bc;
    bc.p = p;
    bc.q = q;
    bc.gamma = gamma;
    bc.weight = w;
    bc.window = window;
    bc.exploratory = true;
    bool trunc = false, conv = true;
    auto diff1 = [&](const Point& x, const Point& y) {
        return std::abs(f.value(x) - fast_ball_mean(f, y, distance(x, y) / 20.0));
    };
    auto g = [&](const Point& x) {
        auto r = inner_generic(f, x, lambda, s, gamma, diff1, 1.05, bc);
        trunc = trunc || r.truncated;
        return r.value == 0.0 ? 0.0 : std::pow(r.value, p / q);
    };
    rec.lhs = outer_integral(bc, f, g, conv);

    CdddConfig cc;
    cc.p = p;
    cc.beta = beta;
    cc.weight = w;
    cc.window = opt.grid;
    cc.exploratory = true;
    cc.omega = opt.omega;
    auto terms = cddd_terms(cc, f);
    double total = 0.0;
    for (const auto& t : terms) total += t.weight;
    const double growth = 1.0 + s - eps, decay = n * (beta * p - 1.0);
    double rhs = 0.0, last = 0.0;
    for (int j = 0; j <= opt.j_terms; ++j) {
        double lj = opt.c_lambda * lambda * std::pow(2.0, j * growth);
        double sum = 0.0;
        for (const auto& t : terms)
            if (t.value > lj * t.scale) sum += t.weight;
        last = sum;
        rhs += std::pow(2.0, j * decay) * sum;
    }
    double tail;
    if (growth > 0 && last == 0.0) tail = 0.0;
    else if (decay < 0) tail = total * std::pow(2.0, (opt.j_terms + 1) * decay) / (1.0 - std::pow(2.0, decay));
    else tail = kInf;
    rec.rhs = rhs;
    rec.ratio = rhs > 0 ? rec.lhs / rhs : (rec.lhs == 0 ? 0.0 : kInf);
    rec.diagnostics["tail_bound"] = tail;
    rec.diagnostics["inner_truncated"] = trunc;
    rec.diagnostics["outer_converged"] = conv;
    rec.diagnostics["cubes"] = terms.size();
    if (rec.lhs == 0.0) {
        rec.verdict = "pass";
    } else if (tail > opt.tail_tol * std::max(rhs, 1e-300)) {
        rec.verdict = "inconclusive";
        rec.reason = "truncation tail above tolerance";
    } else if (rec.lhs <= opt.constant * rhs) {
        rec.verdict = "pass";
    } else {
        rec.verdict = "fail";
        rec.reason = "left side exceeds calibrated constant times right side";
    }
    return rec;
}

}  // namespace wcddd
