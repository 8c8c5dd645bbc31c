#include "wcddd/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/filters/daubechies.hpp>

namespace wcddd {

namespace {

template <int P>
std::vector<double> filter_of() {
    auto a = boost::math::filters::daubechies_scaling_filter<double, P>();
    return {a.begin(), a.end()};
}

std::vector<double> scaling_filter(int N) {
    switch (N) {
        case 1: return filter_of<1>();
        case 2: return filter_of<2>();
        case 3: return filter_of<3>();
        case 4: return filter_of<4>();
        case 5: return filter_of<5>();
        case 6: return filter_of<6>();
        case 7: return filter_of<7>();
        case 8: return filter_of<8>();
        case 9: return filter_of<9>();
        case 10: return filter_of<10>();
    }
    throw std::invalid_argument("wavelet order must lie in [1, 10]");
}

bool is_haar(const WaveletSystem& s) { return s.order == 1; }

double haar_value(int e, double x) {
    if (x < 0.0 || x >= 1.0) return 0.0;
    if (e == 0) return 1.0;
    return x < 0.5 ? 1.0 : -1.0;
}

}  // namespace

double WaveletSystem::step() const { return std::ldexp(1.0, -depth); }

double WaveletSystem::value(int e, double x) const {
    if (is_haar(*this)) return haar_value(e, x);
    if (!(x > 0.0) || !(x < support())) return 0.0;
    const auto& v = e == 0 ? phi : psi;
    double t = std::ldexp(x, depth);
    auto i = static_cast<std::size_t>(t);
    if (i + 1 >= v.size()) return v.back();
    double r = t - static_cast<double>(i);
    return v[i] + r * (v[i + 1] - v[i]);
}

double WaveletSystem::integrate(int e, const std::function<double(double)>& fn, int stride) const {
    const double hs = step() * stride;
    long double acc = 0.0L;
    if (is_haar(*this)) {
        // Midpoint rule with exact values.
        std::size_t cells = (samples() - 1) / static_cast<std::size_t>(stride);
        for (std::size_t i = 0; i < cells; ++i) {
            double x = (static_cast<double>(i) + 0.5) * hs;
            acc += fn(x) * haar_value(e, x);
        }
        return static_cast<double>(acc * hs);
    }
    // Trapezoid; both endpoint samples vanish for N >= 2.
    const auto& v = e == 0 ? phi : psi;
    for (std::size_t i = 0; i < v.size(); i += static_cast<std::size_t>(stride)) {
        if (v[i] == 0.0) continue;
        acc += fn(static_cast<double>(i) * step()) * v[i];
    }
    return static_cast<double>(acc * hs);
}

double WaveletSystem::lp_norm(int e, double p) const {
    if (is_haar(*this)) return 1.0;
    const auto& v = e == 0 ? phi : psi;
    if (std::isinf(p)) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
    long double acc = 0.0L;
    for (double x : v) acc += std::pow(std::abs(x), p);
    return std::pow(static_cast<double>(acc * step()), 1.0 / p);
}

WaveletSystem build_daubechies(int N, int depth) {
    if (N < 1 || N > 10) throw std::invalid_argument("wavelet order must lie in [1, 10]");
    if (depth < 8 || depth > 16) throw std::invalid_argument("cascade depth must lie in [8, 16]");
    WaveletSystem s;
    s.order = N;
    s.depth = depth;
    s.h = scaling_filter(N);
    const std::size_t L = s.h.size();
    s.g.resize(L);
    for (std::size_t i = 0; i < L; ++i) s.g[i] = (i % 2 ? -1.0 : 1.0) * s.h[L - 1 - i];

    const int S = s.support();
    const std::int64_t F = std::int64_t{1} << depth;
    const std::int64_t last = S * F;
    s.phi.assign(static_cast<std::size_t>(last + 1), 0.0);
    s.psi.assign(s.phi.size(), 0.0);
    const double r2 = std::sqrt(2.0);

    if (N == 1) {
        for (std::int64_t i = 0; i < F; ++i) {
            s.phi[static_cast<std::size_t>(i)] = 1.0;
            s.psi[static_cast<std::size_t>(i)] = 2 * i < F ? 1.0 : -1.0;
        }
        s.moments = {0.0};
        return s;
    }

    // phi at the integers: (M - I) v = 0 with sum v = 1, M_{im} = sqrt2 h_{2i-m}.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(S + 2, S + 1);
    for (int i = 0; i <= S; ++i) {
        for (int m = 0; m <= S; ++m) {
            int k = 2 * i - m;
            if (k >= 0 && k < static_cast<int>(L)) A(i, m) = r2 * s.h[static_cast<std::size_t>(k)];
        }
        A(i, i) -= 1.0;
    }
    A.row(S + 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(S + 2);
    rhs[S + 1] = 1.0;
    Eigen::VectorXd v = A.colPivHouseholderQr().solve(rhs);
    if (!v.allFinite() || (A * v - rhs).norm() > 1e-10)
        throw WaveletError("cascade did not converge at the integer nodes");
    for (int i = 0; i <= S; ++i) s.phi[static_cast<std::size_t>(i * F)] = v[i];

    auto at = [&](std::int64_t idx) {
        return idx < 0 || idx > last ? 0.0 : s.phi[static_cast<std::size_t>(idx)];
    };
    for (int d = 1; d <= depth; ++d) {
        const std::int64_t stride = std::int64_t{1} << (depth - d);
        for (std::int64_t i = 1; i * stride < last; i += 2) {
            // x = i / 2^d, 2x - k sits on level d - 1.
            long double acc = 0.0L;
            for (std::size_t k = 0; k < L; ++k)
                acc += s.h[k] * at(2 * i * stride - static_cast<std::int64_t>(k) * F);
            s.phi[static_cast<std::size_t>(i * stride)] = static_cast<double>(r2 * acc);
        }
    }
    if (!std::all_of(s.phi.begin(), s.phi.end(), [](double x) { return std::isfinite(x); }))
        throw WaveletError("cascade produced non-finite samples");

    for (std::int64_t i = 0; 2 * i <= last; ++i) {
        long double ph = 0.0L, ps = 0.0L;
        for (std::size_t k = 0; k < L; ++k) {
            double x = at(2 * i - static_cast<std::int64_t>(k) * F);
            ph += s.h[k] * x;
            ps += s.g[k] * x;
        }
        s.refinement_residual = std::max(
            s.refinement_residual, std::abs(s.phi[static_cast<std::size_t>(i)] - static_cast<double>(r2 * ph)));
        s.psi[static_cast<std::size_t>(i)] = static_cast<double>(r2 * ps);
    }
    for (std::int64_t i = last / 2 + 1; i <= last; ++i) {
        long double ps = 0.0L;
        for (std::size_t k = 0; k < L; ++k) ps += s.g[k] * at(2 * i - static_cast<std::int64_t>(k) * F);
        s.psi[static_cast<std::size_t>(i)] = static_cast<double>(r2 * ps);
    }

    for (int k = 0; k < N; ++k)
        s.moments.push_back(std::abs(s.integrate(1, [k](double x) { return std::pow(x, k); })));

    // <phi(. - k), phi>, <psi(. - k), psi>, <psi(. - k), phi> on the samples.
    const double hstep = s.step();
    for (int k = 0; k < S; ++k) {
        long double pp = 0.0L, qq = 0.0L, pq = 0.0L, qp = 0.0L;
        const std::int64_t off = k * F;
        for (std::int64_t i = off; i <= last; ++i) {
            auto a = static_cast<std::size_t>(i), b = static_cast<std::size_t>(i - off);
            pp += s.phi[a] * s.phi[b];
            qq += s.psi[a] * s.psi[b];
            pq += s.phi[a] * s.psi[b];
            qp += s.psi[a] * s.phi[b];
        }
        double delta = k == 0 ? 1.0 : 0.0;
        double rp = std::abs(static_cast<double>(pp * hstep) - delta);
        s.orthonormality_residual = std::max(s.orthonormality_residual, rp);
        for (double r : {rp, static_cast<double>(qq * hstep) - delta, static_cast<double>(pq * hstep),
                         static_cast<double>(qp * hstep)})
            s.system_residual = std::max(s.system_residual, std::abs(r));
    }
    return s;
}

Cube WaveletIndex::cube() const { return make_cube(Shift::zero(dim()), -j, k); }

double WaveletIndex::volume() const { return std::ldexp(1.0, -j * dim()); }

int WaveletIndex::code() const {
    int c = 0;
    for (int x : e) c = 2 * c + x;
    return c;
}

std::function<double(const Point&)> normalized_atom(const WaveletSystem& sys, const WaveletIndex& w,
                                                    double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("p must lie in [1, inf]");
    const int n = w.dim();
    const double amp = std::isinf(p) ? 1.0 : std::pow(2.0, w.j * n / p);
    return [&sys, w, amp, n](const Point& x) {
        double v = amp;
        for (int i = 0; i < n && v != 0.0; ++i)
            v *= sys.value(w.e[static_cast<std::size_t>(i)],
                           std::ldexp(x[i], w.j) - static_cast<double>(w.k[static_cast<std::size_t>(i)]));
        return v;
    };
}

IndexSet make_index_set(const WaveletSystem& sys, const Box& window, int j_max) {
    if (j_max < 0) throw std::invalid_argument("j_max must be >= 0");
    IndexSet out;
    out.n = window.dim();
    out.j_max = j_max;
    out.window = window;
    const int n = out.n;
    if (n < 1 || n > 2) throw DimensionError("wavelet systems support n in {1, 2}");
    const int S = sys.support();
    auto emit = [&](int j, const std::vector<int>& e) {
        std::vector<std::int64_t> lo(static_cast<std::size_t>(n)), hi(lo);
        for (int i = 0; i < n; ++i) {
            // Positive overlap of 2^{-j}[k, k + S] with the window.
            lo[static_cast<std::size_t>(i)] =
                static_cast<std::int64_t>(std::floor(std::ldexp(window.lo[i], j) - S)) + 1;
            hi[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::ceil(std::ldexp(window.hi[i], j))) - 1;
        }
        std::vector<std::int64_t> k = lo;
        while (true) {
            out.indices.push_back({e, j, k});
            int a = n - 1;
            while (a >= 0 && k[static_cast<std::size_t>(a)] == hi[static_cast<std::size_t>(a)]) {
                k[static_cast<std::size_t>(a)] = lo[static_cast<std::size_t>(a)];
                --a;
            }
            if (a < 0) break;
            ++k[static_cast<std::size_t>(a)];
        }
    };
    emit(0, std::vector<int>(static_cast<std::size_t>(n), 0));
    for (int j = 0; j <= j_max; ++j)
        for (int c = 1; c < (1 << n); ++c) {
            std::vector<int> e(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) e[static_cast<std::size_t>(i)] = (c >> (n - 1 - i)) & 1;
            emit(j, e);
        }
    return out;
}

Table Coefficients::table() const {
    Table t;
    const int n = indices.empty() ? 1 : indices.front().dim();
    t.columns = {"e", "j"};
    if (n == 1) {
        t.columns.push_back("m");
    } else {
        for (int i = 1; i <= n; ++i) t.columns.push_back("m" + std::to_string(i));
    }
    t.columns.push_back("value");
    for (std::size_t i = 0; i < indices.size(); ++i) {
        std::vector<double> row{static_cast<double>(indices[i].code()), static_cast<double>(indices[i].j)};
        for (auto m : indices[i].k) row.push_back(static_cast<double>(m));
        row.push_back(values[i]);
        t.rows.push_back(std::move(row));
    }
    return t;
}

Coefficients coefficients(const TestFunction& f, const WaveletSystem& sys, const IndexSet& idx,
                          const CoefficientOptions& opt) {
    const int n = idx.n;
    if (f.dim() != n) throw DimensionError("function and index set dimensions differ");
    Coefficients out;
    out.indices = idx.indices;
    out.values.reserve(idx.indices.size());
    const int S = sys.support();
    for (const auto& w : idx.indices) {
        const double scale = std::ldexp(1.0, -w.j);
        double fine = 0.0, coarse = 0.0;
        if (n == 1) {
            const double k = static_cast<double>(w.k[0]);
            auto g = [&](double u) {
                double x = (u + k) * scale;
                return f.eval(&x);
            };
            fine = sys.integrate(w.e[0], g, 1);
            coarse = sys.integrate(w.e[0], g, 2);
        } else {
            // 2^{j(1-n)} int f((u + k) / 2^j) psi^e(u) du, tensor trapezoid on thinned samples.
            auto tensor = [&](int stride) {
                return sys.integrate(w.e[0], [&](double u0) {
                    return sys.integrate(w.e[1], [&](double u1) {
                        double x[2] = {(u0 + static_cast<double>(w.k[0])) * scale,
                                       (u1 + static_cast<double>(w.k[1])) * scale};
                        return f.eval(x);
                    }, stride);
                }, stride);
            };
            int st = std::max(1, std::min(opt.stride_2d, 1 << sys.depth));
            fine = tensor(st) * scale;
            coarse = tensor(2 * st) * scale;
        }
        bool boundary = false;
        for (int i = 0; i < n; ++i) {
            double a = static_cast<double>(w.k[static_cast<std::size_t>(i)]) * scale;
            if (a < idx.window.lo[i] || a + S * scale > idx.window.hi[i]) boundary = true;
        }
        out.values.push_back(fine);
        out.errors.push_back(std::abs(fine - coarse));
        out.boundary.push_back(boundary);
        out.max_error = std::max(out.max_error, out.errors.back());
    }
    return out;
}

std::vector<double> sequence_weights(const std::vector<WaveletIndex>& idx, double beta, const Weight& w) {
    std::vector<double> out;
    out.reserve(idx.size());
    for (const auto& ix : idx) {
        Point lower(ix.dim());
        for (int i = 0; i < ix.dim(); ++i)
            lower[i] = std::ldexp(static_cast<double>(ix.k[static_cast<std::size_t>(i)]), -ix.j);
        double edge = std::ldexp(1.0, -ix.j);
        out.push_back(std::pow(ix.volume(), beta - 1.0) * w.mass(Box::cube(lower, edge)));
    }
    return out;
}

SeqNorms seq_norms(const std::vector<double>& a, const std::vector<double>& weights, double p) {
    if (a.size() != weights.size()) throw std::invalid_argument("coefficient and weight counts differ");
    if (!(p >= 1.0) || std::isinf(p)) throw std::invalid_argument("p must lie in [1, inf)");
    SeqNorms out;
    long double acc = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) acc += weights[i] * std::pow(std::abs(a[i]), p);
    out.strong = std::pow(static_cast<double>(acc), 1.0 / p);

    // lambda W(lambda) peaks as lambda increases to a coefficient magnitude.
    std::vector<std::size_t> order(a.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return std::abs(a[x]) > std::abs(a[y]); });
    long double cum = 0.0L;
    for (std::size_t i = 0; i < order.size();) {
        double mag = std::abs(a[order[i]]);
        if (mag == 0.0) break;
        while (i < order.size() && std::abs(a[order[i]]) == mag) cum += weights[order[i++]];
        double cand = mag * static_cast<double>(cum);
        if (cand > out.weak) {
            out.weak = cand;
            out.weak_lambda = mag;
        }
    }
    return out;
}

SeqNorms seq_norms(const std::vector<double>& a, const std::vector<WaveletIndex>& idx, double beta,
                   const Weight& w, double p) {
    return seq_norms(a, sequence_weights(idx, beta, w), p);
}

VerificationRecord verify_almost_char(const TestFunction& f, const WeightPtr& w, double beta,
                                      const WaveletSystem& sys, const IndexSet& idx,
                                      const AlmostCharOptions& opt) {
    const int n = idx.n;
    VerificationRecord rec;
    rec.check = "almost_characterization";
    rec.params = {{"beta", beta},     {"n", n},
                  {"order", sys.order}, {"depth", sys.depth},
                  {"j_max", idx.j_max}, {"function", f.name()},
                  {"function_params", f.params()},
                  {"weight", w ? w->describe() : nlohmann::json()},
                  {"ceiling", opt.ceiling}};
    if (!w) throw std::invalid_argument("weight required");
    bool order_ok = sys.order > n + 1;
    bool beta_ok = beta < 1.0 - 1.0 / n || beta > 1.0;
    rec.diagnostics["admissible"] = order_ok && beta_ok;
    if (!opt.exploratory) {
        if (!order_ok) throw std::invalid_argument("wavelet order N must exceed n + 1");
        if (!beta_ok) throw std::invalid_argument("beta must lie in (-inf, 1 - 1/n) u (1, inf)");
    }

    auto co = coefficients(f, sys, idx, opt.coeff);
    std::vector<double> a(co.values.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = co.values[i] / std::pow(co.indices[i].volume(), beta);
    auto weights = sequence_weights(co.indices, beta, *w);
    auto norms = seq_norms(a, weights, 1.0);

    std::vector<double> per_gen(static_cast<std::size_t>(idx.j_max + 1), 0.0);
    std::size_t boundary_nonzero = 0;
    double amax = 0.0;
    for (double x : co.values) amax = std::max(amax, std::abs(x));
    for (std::size_t i = 0; i < a.size(); ++i) {
        per_gen[static_cast<std::size_t>(co.indices[i].j)] += weights[i] * std::abs(a[i]);
        if (co.boundary[i] && std::abs(co.values[i]) > 1e-9 * amax) ++boundary_nonzero;
    }

    GridWindow gw;
    for (int i = 0; i < n; ++i) {
        gw.lo.emplace_back(idx.window.lo[i]);
        gw.hi.emplace_back(idx.window.hi[i]);
    }
    double width = (idx.window.hi - idx.window.lo).maxCoeff();
    gw.j_max = static_cast<int>(std::ceil(std::log2(width)));
    gw.j_min = -(n == 1 ? opt.probe_depth : std::min(opt.probe_depth, 4));
    gw.shifts = n == 1 ? Shift::all(n) : std::vector<Shift>{Shift::zero(n)};
    auto est = ap_constant(*w, 1.0, default_probes(*w, gw));

    rec.diagnostics["coefficients"] = co.values.size();
    rec.diagnostics["max_coefficient_error"] = co.max_error;
    rec.diagnostics["boundary_nonzero"] = boundary_nonzero;
    rec.diagnostics["strong_l1"] = norms.strong;
    rec.diagnostics["weak_lambda"] = norms.weak_lambda;
    rec.diagnostics["generation_l1"] = per_gen;
    rec.diagnostics["a1_estimate"] = est.value;
    rec.diagnostics["a1_unbounded"] = est.unbounded;
    rec.lhs = norms.weak;

    if (est.unbounded) {
        rec.rhs = std::numeric_limits<double>::infinity();
        rec.ratio = 0.0;
        rec.verdict = "fail";
        rec.reason = "a1_unbounded";
        return rec;
    }
    double mass = 0.0, grad = 0.0;
    try {
        mass = lp_norm(f, *w, 1.0, idx.window).norm;
        grad = sobolev_seminorm(f, *w, 1.0, idx.window).norm;
    } catch (const DomainError& e) {
        rec.rhs = std::numeric_limits<double>::infinity();
        rec.ratio = 0.0;
        rec.verdict = "inconclusive";
        rec.reason = std::string("W^{1,1}_v norm unavailable: ") + e.what();
        return rec;
    }
    rec.diagnostics["l1_norm"] = mass;
    rec.diagnostics["gradient_l1_norm"] = grad;
    rec.rhs = est.value * (mass + grad);
    rec.ratio = rec.rhs > 0 ? rec.lhs / rec.rhs : (rec.lhs == 0 ? 0.0 : std::numeric_limits<double>::infinity());

    // Right side only when the last two generations show geometric tail decay.
    bool convergent = false;
    double tail = std::numeric_limits<double>::infinity();
    const double total = norms.strong;
    if (total == 0.0) {
        convergent = true;
        tail = 0.0;
    } else if (idx.j_max >= 2) {
        double c0 = per_gen[per_gen.size() - 3], c1 = per_gen[per_gen.size() - 2], c2 = per_gen.back();
        if (c1 <= 0.75 * c0 && c2 <= 0.75 * c1) {
            double r = c1 > 0 ? c2 / c1 : 0.0;
            tail = c2 * r / (1.0 - r);
            convergent = tail <= 0.05 * total;
        }
    }
    rec.diagnostics["l1_tail_estimate"] = tail;
    rec.diagnostics["l1_convergent"] = convergent;
    bool right_ok = true;
    if (convergent) {
        double denom = est.value * est.value * total;
        double right = denom > 0 ? rec.rhs / denom : (rec.rhs == 0 ? 0.0 : std::numeric_limits<double>::infinity());
        rec.diagnostics["right_ratio"] = right;
        rec.diagnostics["right_status"] = "compared";
        right_ok = right <= opt.ceiling;
    } else {
        rec.diagnostics["right_status"] = "inconclusive";
    }
    if (rec.ratio <= opt.ceiling && right_ok) {
        rec.verdict = "pass";
    } else {
        rec.verdict = "fail";
        rec.reason = rec.ratio > opt.ceiling ? "weak ratio exceeds ceiling" : "right ratio exceeds ceiling";
    }
    if (!(order_ok && beta_ok)) rec.reason += rec.reason.empty() ? "exploratory" : "; exploratory";
    return rec;
}

}  // namespace wcddd
