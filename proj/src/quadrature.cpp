#include "wcddd/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace wcddd {

namespace bq = boost::math::quadrature;

std::vector<double> panel_edges(double a, double b, const std::vector<double>& breaks) {
    std::vector<double> e{a};
    for (double t : breaks)
        if (t > a && t < b) e.push_back(t);
    e.push_back(b);
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    return e;
}

namespace {

bool touches(double lo, double hi, const std::vector<double>& pts) {
    for (double s : pts)
        if (s == lo || s == hi) return true;
    return false;
}

QuadResult midpoint(const Fn1& f, double lo, double hi, const Quadrature& q) {
    QuadResult r;
    double h = hi - lo;
    double prev = h * f(lo + 0.5 * h);
    for (unsigned d = 1; d <= q.max_depth; ++d) {
        std::size_t n = std::size_t{1} << d;
        double step = h / static_cast<double>(n), s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += f(lo + (static_cast<double>(i) + 0.5) * step);
        double cur = s * step;
        r.value = cur;
        r.error = std::abs(cur - prev) / 3.0;
        if (r.error <= std::max(q.abs_tol, q.rel_tol * std::abs(cur))) return r;
        prev = cur;
    }
    r.converged = false;
    return r;
}

QuadResult panel(const Fn1& f, double lo, double hi, const Quadrature& q, bool singular) {
    QuadResult r;
    double l1 = 0.0;
    if (singular) {
        static thread_local bq::tanh_sinh<double> ts(15);
        // Two-argument form: points that round onto an endpoint are nudged inside.
        auto g = [&](double x, double) {
            if (x <= lo) x = std::nextafter(lo, hi);
            if (x >= hi) x = std::nextafter(hi, lo);
            return f(x);
        };
        r.value = ts.integrate(g, lo, hi, q.rel_tol, &r.error, &l1);
        r.converged = r.error <= std::max(q.abs_tol, q.rel_tol * std::abs(l1)) * 10;
    } else {
        r.value = bq::gauss_kronrod<double, 31>::integrate(f, lo, hi, q.max_depth, q.rel_tol,
                                                            &r.error, &l1);
        r.converged = r.error <= std::max(q.abs_tol, q.rel_tol * std::abs(l1)) * 10;
    }
    return r;
}

template <std::size_t N>
std::vector<std::pair<double, double>> expand() {
    const auto& x = bq::gauss<double, N>::abscissa();
    const auto& w = bq::gauss<double, N>::weights();
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) {
            out.emplace_back(0.0, w[i]);
        } else {
            out.emplace_back(-x[i], w[i]);
            out.emplace_back(x[i], w[i]);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

QuadResult integrate(const Fn1& f, double a, double b, const Quadrature& q,
                     const std::vector<double>& breaks, const std::vector<double>& singular) {
    if (!(b > a)) return {};
    std::vector<double> all = breaks;
    all.insert(all.end(), singular.begin(), singular.end());
    auto e = panel_edges(a, b, all);
    QuadResult out;
    for (std::size_t i = 0; i + 1 < e.size(); ++i) {
        QuadResult r;
        bool sing = touches(e[i], e[i + 1], singular);
        if (q.scheme == Quadrature::Scheme::Midpoint && !sing) {
            r = midpoint(f, e[i], e[i + 1], q);
        } else if (q.scheme == Quadrature::Scheme::TensorGauss && !sing) {
            r.value = gauss_composite(f, e[i], e[i + 1], q.gauss_order, q.panels);
        } else {
            r = panel(f, e[i], e[i + 1], q, sing);
        }
        out.value += r.value;
        out.error += r.error;
        out.converged = out.converged && r.converged;
    }
    return out;
}

QuadResult integrate2(const Fn2& f, double ax, double bx, double ay, double by, const Quadrature& q,
                      const std::vector<double>& breaks_x, const std::vector<double>& breaks_y) {
    bool ok = true;
    double err = 0.0;
    Quadrature inner = q;
    auto g = [&](double x) {
        auto r = integrate([&](double y) { return f(x, y); }, ay, by, inner, breaks_y);
        ok = ok && r.converged;
        err = std::max(err, r.error);
        return r.value;
    };
    auto r = integrate(g, ax, bx, q, breaks_x);
    r.converged = r.converged && ok;
    r.error += err * (bx - ax);
    return r;
}

const std::vector<std::pair<double, double>>& gauss_legendre(int order) {
    static std::mutex mu;
    static std::map<int, std::vector<std::pair<double, double>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
    std::vector<std::pair<double, double>> v;
    switch (order) {
        case 2: v = expand<2>(); break;
        case 3: v = expand<3>(); break;
        case 4: v = expand<4>(); break;
        case 5: v = expand<5>(); break;
        case 8: v = expand<8>(); break;
        case 10: v = expand<10>(); break;
        case 16: v = expand<16>(); break;
        case 20: v = expand<20>(); break;
        case 30: v = expand<30>(); break;
        default: throw std::invalid_argument("unsupported Gauss-Legendre order");
    }
    return cache.emplace(order, std::move(v)).first->second;
}

double gauss_composite(const Fn1& f, double a, double b, int order, int panels,
                       const std::vector<double>& breaks) {
    const auto& gl = gauss_legendre(order);
    auto e = panel_edges(a, b, breaks);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < e.size(); ++i) {
        double h = (e[i + 1] - e[i]) / panels;
        for (int p = 0; p < panels; ++p) {
            double lo = e[i] + p * h;
            double c = lo + 0.5 * h;
            for (auto [x, w] : gl) total += 0.5 * h * w * f(c + 0.5 * h * x);
        }
    }
    return total;
}

}  // namespace wcddd
