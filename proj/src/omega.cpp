#include "wcddd/omega.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wcddd/quadrature.hpp"

namespace wcddd {

namespace {

int sgn(int j) { return (j % 2 == 0) ? 1 : -1; }

// Relative width below which a cell's value range is treated as a point mass.
constexpr double kCollapse = 1e-12;

// Cells shrink geometrically toward singular points, where f is far from linear on a cell.
constexpr int kGrading = 40;

std::vector<double> axis_edges(double lo, double hi, int cells, const std::vector<double>& breaks,
                               const std::vector<double>& singular = {}) {
    std::vector<double> e;
    e.reserve(static_cast<std::size_t>(cells) + 1 + breaks.size());
    double h = (hi - lo) / cells;
    for (int i = 0; i < cells; ++i) e.push_back(lo + i * h);
    e.push_back(hi);
    for (double b : breaks)
        if (b > lo && b < hi) e.push_back(b);
    for (double c : singular) {
        if (c < lo || c > hi) continue;
        for (int k = 1; k <= kGrading; ++k) {
            double d = std::ldexp(h, -k);
            if (c - d > lo) e.push_back(c - d);
            if (c + d < hi) e.push_back(c + d);
        }
    }
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    return e;
}

void push_point(Events& ev, double t, double m) { ev.push_back({t, m, 0.0, 0.0, m, 0}); }

void push_uniform(Events& ev, double lo, double hi, double m) {
    double rho = m / (hi - lo);
    ev.push_back({lo, 0.0, rho, 0.0, 0.0, 1});
    ev.push_back({hi, 0.0, -rho, 0.0, m, -1});
}

// Distribution of mean + U + V with U, V uniform of widths A >= B.
void push_trapezoid(Events& ev, double mean, double A, double B, double m) {
    if (A < B) std::swap(A, B);
    double tol = kCollapse * std::max(std::abs(mean), std::numeric_limits<double>::min());
    if (A <= tol) {
        push_point(ev, mean, m);
        return;
    }
    if (B <= tol) {
        push_uniform(ev, mean - 0.5 * A, mean + 0.5 * A, m);
        return;
    }
    double t0 = mean - 0.5 * (A + B);
    double k = m / (A * B);
    ev.push_back({t0, 0.0, 0.0, k, 0.0, 1});
    ev.push_back({t0 + B, 0.0, 0.0, -k, 0.0, 0});
    ev.push_back({t0 + A, 0.0, 0.0, -k, 0.0, 0});
    ev.push_back({t0 + A + B, 0.0, 0.0, k, m, -1});
}

void coalesce(Events& ev) {
    if (ev.empty()) return;
    std::size_t w = 0;
    for (std::size_t r = 1; r < ev.size(); ++r) {
        if (ev[r].t == ev[w].t) {
            ev[w].dmass += ev[r].dmass;
            ev[w].djump += ev[r].djump;
            ev[w].dslope += ev[r].dslope;
            ev[w].dclosed += ev[r].dclosed;
            ev[w].dopen += ev[r].dopen;
        } else {
            ev[++w] = ev[r];
        }
    }
    ev.resize(w + 1);
}

void sort_events(Events& ev) {
    std::sort(ev.begin(), ev.end(), [](const ValueEvent& a, const ValueEvent& b) { return a.t < b.t; });
    coalesce(ev);
}

double inv_scale(double vol, int n) { return std::pow(vol, -1.0 - 1.0 / n); }

}  // namespace

CellEvents cell_events(const TestFunction& f, const Box& Q, int cells) {
    const int n = f.dim();
    if (Q.dim() != n) throw DimensionError("cell_events: dimension mismatch");
    CellEvents out;
    const double g = 0.5 / std::sqrt(3.0);
    if (n == 1) {
        auto e = axis_edges(Q.lo[0], Q.hi[0], cells, f.breakpoints(0), f.singular_points());
        out.events.reserve(2 * e.size());
        for (std::size_t i = 0; i + 1 < e.size(); ++i) {
            double u = e[i], v = e[i + 1], h = v - u, c = 0.5 * (u + v);
            double x1 = c - g * h, x2 = c + g * h, xm = c;
            double f1 = f.eval(&x1), f2 = f.eval(&x2), fm = f.eval(&xm);
            double mean = 0.5 * (f1 + f2);
            double A = std::abs(f2 - f1) / (2.0 * g);
            push_trapezoid(out.events, mean, A, 0.0, h);
            out.mass += h;
            out.deviation += h * std::abs(fm - mean);
        }
    } else if (n == 2) {
        auto ex = axis_edges(Q.lo[0], Q.hi[0], cells, f.breakpoints(0));
        auto ey = axis_edges(Q.lo[1], Q.hi[1], cells, f.breakpoints(1));
        out.events.reserve(4 * ex.size() * ey.size());
        for (std::size_t i = 0; i + 1 < ex.size(); ++i) {
            double hx = ex[i + 1] - ex[i], cx = 0.5 * (ex[i] + ex[i + 1]);
            for (std::size_t k = 0; k + 1 < ey.size(); ++k) {
                double hy = ey[k + 1] - ey[k], cy = 0.5 * (ey[k] + ey[k + 1]);
                double p00[2] = {cx - g * hx, cy - g * hy}, p01[2] = {cx - g * hx, cy + g * hy};
                double p10[2] = {cx + g * hx, cy - g * hy}, p11[2] = {cx + g * hx, cy + g * hy};
                double pc[2] = {cx, cy};
                double f00 = f.eval(p00), f01 = f.eval(p01), f10 = f.eval(p10), f11 = f.eval(p11);
                double mean = 0.25 * (f00 + f01 + f10 + f11);
                double A = std::abs((f10 + f11) - (f00 + f01)) / (4.0 * g);
                double B = std::abs((f01 + f11) - (f00 + f10)) / (4.0 * g);
                double m = hx * hy;
                push_trapezoid(out.events, mean, A, B, m);
                out.mass += m;
                out.deviation += m * std::abs(f.eval(pc) - mean);
            }
        }
    } else {
        throw DimensionError("omega engine supports n = 1 or 2");
    }
    sort_events(out.events);
    return out;
}

Events merge_events(const Events& a, const Events& b) {
    Events out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out),
               [](const ValueEvent& x, const ValueEvent& y) { return x.t < y.t; });
    coalesce(out);
    return out;
}

double pair_integral(const Events& ev, double mass) {
    if (ev.empty()) return 0.0;
    static const long double gx[3] = {0.5L - 0.3872983346207416885179265399782400L, 0.5L,
                                      0.5L + 0.3872983346207416885179265399782400L};
    static const long double gw[3] = {5.0L / 18.0L, 8.0L / 18.0L, 5.0L / 18.0L};
    const long double M = mass;
    long double below = 0.0L, rho = 0.0L, s = 0.0L, closed = 0.0L, total = 0.0L;
    int open = 0;
    long double t = ev.front().t;
    for (const auto& e : ev) {
        long double d = static_cast<long double>(e.t) - t;
        if (d > 0.0L && (open > 0 || (below > 0.0L && below < M))) {
            long double acc = 0.0L;
            for (int i = 0; i < 3; ++i) {
                long double tau = gx[i] * d;
                long double m = below + rho * tau + 0.5L * s * tau * tau;
                acc += gw[i] * m * (M - m);
            }
            total += acc * d;
            below += rho * d + 0.5L * s * d * d;
            rho += s * d;
        }
        below += e.dmass;
        rho += e.djump;
        s += e.dslope;
        closed += e.dclosed;
        open += e.dopen;
        if (open == 0) {
            rho = 0.0L;
            s = 0.0L;
            below = closed;
        }
        t = e.t;
    }
    return static_cast<double>(2.0L * total);
}

double pair_integral_monotone(const TestFunction& f, double a, double b) {
    if (f.dim() != 1) throw DimensionError("pair_integral_monotone is one-dimensional");
    double mid = 0.5 * (a + b);
    double fm = f.eval(&mid);
    auto g = [&](double x) { return (f.eval(&x) - fm) * (2.0 * x - a - b); };
    Quadrature q;
    q.rel_tol = 1e-13;
    q.abs_tol = 0.0;
    q.max_depth = 24;
    auto r = integrate(g, a, b, q, f.breakpoints(0), f.singular_points());
    return 2.0 * r.value;
}

OmegaResult omega(const TestFunction& f, const Box& Q, const OmegaOptions& opt) {
    const int n = f.dim();
    if (Q.dim() != n) throw DimensionError("omega: dimension mismatch");
    OmegaResult out;
    if (auto e = f.exact_omega(Q)) {
        out.value = *e;
        out.method = "exact";
        return out;
    }
    double vol = Q.volume();
    if (n == 1 && f.monotone()) {
        out.value = pair_integral_monotone(f, Q.lo[0], Q.hi[0]) * inv_scale(vol, n);
        out.method = "monotone";
        return out;
    }
    int cells = n == 1 ? opt.cells_1d : opt.cells_2d;
    int cap = n == 1 ? opt.max_cells_1d : opt.max_cells_2d;
    auto run = [&](int k) {
        auto ce = cell_events(f, Q, k);
        return std::make_pair(pair_integral(ce.events, ce.mass) * inv_scale(vol, n), ce.deviation);
    };
    auto [prev, dev] = run(cells);
    out.method = "distribution";
    if (dev == 0.0) {
        out.value = prev;
        return out;
    }
    while (true) {
        if (2 * cells > cap) {
            out.value = prev;
            out.accurate = false;
            out.error = std::abs(prev) * opt.rel_tol;
            return out;
        }
        cells *= 2;
        auto [cur, d2] = run(cells);
        double diff = std::abs(cur - prev);
        if (diff <= opt.rel_tol * std::abs(cur) || d2 == 0.0) {
            out.value = cur;
            out.error = diff;
            return out;
        }
        prev = cur;
    }
}

OmegaResult omega(const TestFunction& f, const Cube& Q, const OmegaOptions& opt) {
    return omega(f, Box::from(Q), opt);
}

void omega_sweep(const TestFunction& f, const GridWindow& w, const Shift& shift,
                 const OmegaOptions& opt, const std::function<void(const CubeOmega&)>& visit) {
    w.validate();
    const int n = w.dim();
    if (f.dim() != n || shift.dim() != n) throw DimensionError("omega_sweep: dimension mismatch");
    if (n > 2) throw DimensionError("omega engine supports n = 1 or 2");
    const int levels = w.j_max - w.j_min + 1;
    using Range = std::pair<std::int64_t, std::int64_t>;
    // Per level, per axis: covered range (descendants of top cubes) and in-box range.
    std::vector<std::vector<Range>> cover(levels, std::vector<Range>(n)), inbox = cover;
    for (int li = 0; li < levels; ++li) {
        int j = w.j_min + li;
        for (int k = 0; k < n; ++k) inbox[li][k] = index_range(w.lo[k], w.hi[k], shift.thirds[k], j);
    }
    cover[levels - 1] = inbox[levels - 1];
    for (int li = levels - 1; li > 0; --li) {
        int j = w.j_min + li;
        for (int k = 0; k < n; ++k) {
            auto [a, b] = cover[li][k];
            int off = sgn(j) * shift.thirds[k];
            cover[li - 1][k] = {2 * a + off, 2 * b + off + 1};
        }
    }
    auto count = [&](int li) {
        std::size_t c = 1;
        for (int k = 0; k < n; ++k) c *= static_cast<std::size_t>(cover[li][k].second - cover[li][k].first + 1);
        return c;
    };
    const int cells = n == 1 ? opt.cells_1d : opt.cells_2d;
    std::size_t leaves = count(0);
    std::size_t per_leaf = n == 1 ? static_cast<std::size_t>(cells)
                                  : static_cast<std::size_t>(cells) * static_cast<std::size_t>(cells);
    if (leaves > w.budget || leaves * per_leaf > opt.max_total_cells)
        throw BudgetError("omega sweep exceeds cell budget");

    struct Node {
        Events ev;
        double dev = 0.0;
    };
    auto emit = [&](int li, const std::vector<std::int64_t>& m, const Node& node) {
        for (int k = 0; k < n; ++k)
            if (m[k] < inbox[li][k].first || m[k] > inbox[li][k].second) return;
        CubeOmega co;
        co.cube = Cube{shift, w.j_min + li, m};
        double vol = co.cube.volume();
        double s = inv_scale(vol, n);
        co.omega = pair_integral(node.ev, vol) * s;
        co.error = 2.0 * vol * node.dev * s;
        visit(co);
    };
    // Row-major index helpers over the covered product range.
    auto unflatten = [&](int li, std::size_t idx) {
        std::vector<std::int64_t> m(n);
        for (int k = n - 1; k >= 0; --k) {
            auto len = static_cast<std::size_t>(cover[li][k].second - cover[li][k].first + 1);
            m[k] = cover[li][k].first + static_cast<std::int64_t>(idx % len);
            idx /= len;
        }
        return m;
    };
    auto flatten = [&](int li, const std::vector<std::int64_t>& m) {
        std::size_t idx = 0;
        for (int k = 0; k < n; ++k) {
            auto len = static_cast<std::size_t>(cover[li][k].second - cover[li][k].first + 1);
            idx = idx * len + static_cast<std::size_t>(m[k] - cover[li][k].first);
        }
        return idx;
    };

    std::vector<Node> cur(leaves);
    const int j0 = w.j_min;
    for (std::size_t i = 0; i < leaves; ++i) {
        auto m = unflatten(0, i);
        Box b;
        b.lo.resize(n);
        b.hi.resize(n);
        for (int k = 0; k < n; ++k) {
            b.lo[k] = std::ldexp(static_cast<double>(3 * m[k] + sgn(j0) * shift.thirds[k]) / 3.0, j0);
            b.hi[k] = std::ldexp(static_cast<double>(3 * (m[k] + 1) + sgn(j0) * shift.thirds[k]) / 3.0, j0);
        }
        auto ce = cell_events(f, b, cells);
        cur[i].ev = std::move(ce.events);
        cur[i].dev = ce.deviation;
        emit(0, m, cur[i]);
    }
    for (int li = 1; li < levels; ++li) {
        int j = w.j_min + li;
        std::vector<Node> next(count(li));
        for (std::size_t i = 0; i < next.size(); ++i) {
            auto m = unflatten(li, i);
            std::vector<std::int64_t> c(n);
            Node acc;
            for (int mask = 0; mask < (1 << n); ++mask) {
                for (int k = 0; k < n; ++k)
                    c[k] = 2 * m[k] + sgn(j) * shift.thirds[k] + ((mask >> (n - 1 - k)) & 1);
                Node& child = cur[flatten(li - 1, c)];
                acc.ev = acc.ev.empty() ? std::move(child.ev) : merge_events(acc.ev, child.ev);
                acc.dev += child.dev;
                Events().swap(child.ev);
            }
            next[i] = std::move(acc);
            emit(li, m, next[i]);
        }
        cur = std::move(next);
    }
}

std::vector<CubeOmega> omega_window(const TestFunction& f, const GridWindow& w,
                                    const OmegaOptions& opt) {
    std::vector<CubeOmega> out;
    for (const auto& s : w.shifts) {
        std::vector<CubeOmega> part;
        omega_sweep(f, w, s, opt, [&](const CubeOmega& c) { part.push_back(c); });
        std::sort(part.begin(), part.end(), [](const CubeOmega& a, const CubeOmega& b) {
            if (a.cube.j != b.cube.j) return a.cube.j > b.cube.j;
            return a.cube.m < b.cube.m;
        });
        out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return out;
}

}  // namespace wcddd
