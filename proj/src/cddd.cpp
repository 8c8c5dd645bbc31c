#include "wcddd/cddd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace wcddd {

namespace {

constexpr double kGoodSlack = 1e-12;

Box window_box(const GridWindow& w) {
    Box b;
    b.lo.resize(w.dim());
    b.hi.resize(w.dim());
    for (int k = 0; k < w.dim(); ++k) {
        b.lo[k] = w.lo[k].convert_to<double>();
        b.hi[k] = w.hi[k].convert_to<double>();
    }
    return b;
}

bool touches_boundary(const Cube& Q, const Box& win) {
    for (int k = 0; k < Q.dim(); ++k)
        if (Q.lower_d(k) <= win.lo[k] || Q.upper_d(k) >= win.hi[k]) return true;
    return false;
}

nlohmann::json cube_json(const Cube& Q) {
    return {{"shift", Q.shift.thirds}, {"j", Q.j}, {"m", Q.m}};
}

}  // namespace

bool in_omega_set(double p, double beta, int n) {
    if (p == 1.0) return beta < 1.0 - 1.0 / n || beta > 1.0;
    return beta != 1.0 / p;
}

double alpha_exponent(double p, double beta) {
    if (p > 1.0 && beta >= 1.0 / p - 1.0 && beta < 1.0 / p) return p / (p - 1.0);
    return 1.0;
}

std::vector<double> LambdaGrid::values(double data_lo, double data_hi) const {
    double a = lo > 0 ? lo : data_lo, b = hi > 0 ? hi : data_hi;
    if (!(a > 0) || !(b > 0)) a = b = 1.0;
    if (b < a) std::swap(a, b);
    int c = std::max(count, 1);
    std::vector<double> out(static_cast<std::size_t>(c));
    if (c == 1) {
        out[0] = a;
        return out;
    }
    double la = std::log(a), lb = std::log(b);
    for (int i = 0; i < c; ++i) out[i] = std::exp(la + (lb - la) * i / (c - 1));
    out.front() = a;
    out.back() = b;
    return out;
}

void validate(const CdddConfig& cfg) {
    if (cfg.exploratory) return;
    if (!(cfg.p >= 1.0)) throw std::invalid_argument("p must be >= 1");
    if (!cfg.weight) throw std::invalid_argument("missing weight");
    if (cfg.weight->dim() != cfg.window.dim()) throw DimensionError("weight and window dimensions differ");
    if (!in_omega_set(cfg.p, cfg.beta, cfg.window.dim()))
        throw std::invalid_argument("beta violates the admissible set Omega_{p,n}");
}

LevelSet level_set(const std::vector<CubeOmega>& table, double lambda, double b, double tol) {
    if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
    LevelSet out;
    for (const auto& c : table) {
        double thr = lambda * std::pow(c.cube.volume(), b);
        bool near = std::abs(c.omega - thr) <= c.error + tol * thr;
        LevelCube lc{c.cube, c.omega, thr, near};
        if (c.omega > thr) out.members.push_back(lc);
        if (near) out.flagged.push_back(lc);
    }
    return out;
}

LevelSet level_set(const TestFunction& f, const GridWindow& window, double lambda, double b,
                   const OmegaOptions& opt, double tol) {
    return level_set(omega_window(f, window, opt), lambda, b, tol);
}

Table FunctionalProfile::table() const {
    Table t;
    t.columns = {"lambda", "functional", "n_cubes", "boundary_share"};
    for (std::size_t i = 0; i < lambdas.size(); ++i)
        t.rows.push_back({lambdas[i], values[i], static_cast<double>(n_cubes[i]), boundary_share[i]});
    return t;
}

nlohmann::json FunctionalProfile::summary() const {
    nlohmann::json cert = nlohmann::json::array();
    for (std::size_t i = 0; i < certifying.size() && i < 50; ++i) cert.push_back(cube_json(certifying[i]));
    std::size_t arg = 0;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] == sup) arg = i;
    return {{"sup", exact_sup},
            {"argmax_lambda", exact_argmax},
            {"grid_sup", sup},
            {"grid_argmax_lambda", argmax_lambda},
            {"boundary_share_at_argmax", boundary_share.empty() ? 0.0 : boundary_share[arg]},
            {"flag_spread", spread},
            {"cubes", cubes},
            {"certifying_count", certifying.size()},
            {"certifying", cert}};
}

FunctionalProfile profile_from_terms(const std::vector<CubeTerm>& terms, double p,
                                     const LambdaGrid& grid, double tol) {
    FunctionalProfile prof;
    prof.cubes = terms.size();
    struct T {
        double t;
        std::size_t i;
    };
    std::vector<T> pos;
    for (std::size_t i = 0; i < terms.size(); ++i)
        if (terms[i].value > 0) pos.push_back({terms[i].value / terms[i].scale, i});
    std::sort(pos.begin(), pos.end(), [](const T& a, const T& b) {
        if (a.t != b.t) return a.t > b.t;
        return a.i < b.i;
    });
    double tmin = pos.empty() ? 0.0 : pos.back().t, tmax = pos.empty() ? 0.0 : pos.front().t;
    prof.lambdas = grid.values(tmin, tmax);

    // Exact supremum: left limits at each distinct threshold.
    double cum = 0.0;
    for (std::size_t k = 0; k < pos.size(); ++k) {
        cum += terms[pos[k].i].weight;
        if (k + 1 < pos.size() && pos[k + 1].t == pos[k].t) continue;
        double v = std::pow(pos[k].t, p) * cum;
        if (v > prof.exact_sup) {
            prof.exact_sup = v;
            prof.exact_argmax = pos[k].t;
        }
    }

    std::size_t best = 0;
    for (std::size_t li = 0; li < prof.lambdas.size(); ++li) {
        double lam = prof.lambdas[li], lp = std::pow(lam, p);
        double sum = 0.0, low = 0.0, high = 0.0, bnd = 0.0;
        std::size_t count = 0;
        for (const auto& x : pos) {
            const auto& c = terms[x.i];
            double thr = lam * c.scale;
            bool member = c.value > thr;
            bool near = std::abs(c.value - thr) <= c.error + tol * thr;
            if (member) {
                sum += c.weight;
                ++count;
                if (c.boundary) bnd += c.weight;
                if (!near) low += c.weight;
            }
            if (member || near) high += c.weight;
        }
        prof.values.push_back(lp * sum);
        prof.values_low.push_back(lp * low);
        prof.values_high.push_back(lp * high);
        prof.n_cubes.push_back(count);
        prof.boundary_share.push_back(sum > 0 ? bnd / sum : 0.0);
        if (lp * sum > prof.sup) {
            prof.sup = lp * sum;
            best = li;
        }
        double ref = std::max(lp * sum, std::numeric_limits<double>::min());
        if (lp * sum > 0) prof.spread = std::max(prof.spread, (lp * high - lp * low) / ref);
    }
    if (!prof.lambdas.empty()) {
        prof.argmax_lambda = prof.lambdas[best];
        double lam = prof.argmax_lambda;
        for (const auto& x : pos)
            if (terms[x.i].value > lam * terms[x.i].scale) prof.certifying.push_back(terms[x.i].cube);
    }
    return prof;
}

std::vector<CubeTerm> cddd_terms(const CdddConfig& cfg, const TestFunction& f) {
    validate(cfg);
    if (f.dim() != cfg.window.dim()) throw DimensionError("function and window dimensions differ");
    const double b = cfg.beta + 1.0 - 1.0 / cfg.p;
    const double e = cfg.beta * cfg.p - 1.0;
    Box win = window_box(cfg.window);
    std::vector<CubeTerm> terms;
    for (const auto& c : omega_window(f, cfg.window, cfg.omega)) {
        CubeTerm t;
        t.cube = c.cube;
        t.value = c.omega;
        t.error = c.error;
        double vol = c.cube.volume();
        t.scale = std::pow(vol, b);
        t.weight = std::pow(vol, e) * cfg.weight->mass(c.cube);
        t.boundary = touches_boundary(c.cube, win);
        terms.push_back(std::move(t));
    }
    return terms;
}

FunctionalProfile cddd_functional(const CdddConfig& cfg, const TestFunction& f) {
    return profile_from_terms(cddd_terms(cfg, f), cfg.p, cfg.lambdas, cfg.tol);
}

VerificationRecord verify_cddd(const CdddConfig& cfg, const TestFunction& f) {
    VerificationRecord rec;
    rec.check = "cddd";
    rec.params = {{"p", cfg.p},
                  {"beta", cfg.beta},
                  {"n", cfg.window.dim()},
                  {"function", f.name()},
                  {"function_params", f.params()},
                  {"weight", cfg.weight ? cfg.weight->describe() : nlohmann::json()},
                  {"j_min", cfg.window.j_min},
                  {"j_max", cfg.window.j_max},
                  {"ceiling", cfg.ceiling}};
    bool admissible = in_omega_set(cfg.p, cfg.beta, cfg.window.dim());
    rec.diagnostics["admissible"] = admissible;
    rec.diagnostics["exploratory"] = cfg.exploratory;
    auto prof = cddd_functional(cfg, f);
    rec.lhs = prof.exact_sup;
    rec.diagnostics["profile"] = prof.summary();

    Box win = window_box(cfg.window);
    auto est = ap_constant(*cfg.weight, cfg.p, default_probes(*cfg.weight, cfg.window));
    double expo = alpha_exponent(cfg.p, cfg.beta);
    auto grad = sobolev_seminorm(f, *cfg.weight, cfg.p, win);
    rec.diagnostics["ap_estimate"] = est.value;
    rec.diagnostics["ap_unbounded"] = est.unbounded;
    rec.diagnostics["ap_probes"] = est.probes;
    rec.diagnostics["alpha"] = expo;
    rec.diagnostics["gradient_norm_p"] = grad.pth;
    rec.diagnostics["gradient_support_inside_window"] =
        f.support_radius() <= std::min(-win.lo.maxCoeff(), win.hi.minCoeff());
    double normalized = grad.pth > 0 ? rec.lhs / grad.pth : 0.0;
    rec.diagnostics["lhs_over_gradient"] = normalized;

    if (est.unbounded) {
        rec.rhs = std::numeric_limits<double>::infinity();
        rec.ratio = normalized;
        rec.verdict = "fail";
        rec.reason = "ap_unbounded";
        return rec;
    }
    rec.rhs = std::pow(est.value, expo) * grad.pth;
    if (rec.rhs == 0.0) {
        rec.ratio = rec.lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
        rec.ratio = rec.lhs / rec.rhs;
    }
    if (cfg.p > 1.0 && cfg.beta >= 1.0 / cfg.p - 1.0 && cfg.beta < 1.0 / cfg.p && rec.rhs > 0) {
        double rhs2 = rec.rhs / (1.0 / cfg.p - cfg.beta);
        rec.diagnostics["normalized_ratio"] = rec.lhs / rhs2;
    }
    if (rec.ratio <= cfg.ceiling) {
        rec.verdict = "pass";
    } else {
        rec.verdict = "fail";
        rec.reason = "ratio exceeds ceiling";
    }
    if (!admissible) rec.reason += rec.reason.empty() ? "exploratory" : "; exploratory";
    return rec;
}

std::vector<CubeTerm> mean_terms(const TestFunction& f, const Weight& w, double p, double beta,
                                 const GridWindow& window) {
    if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
    if (beta >= 1.0 / p - 1.0 && beta <= 1.0 / p)
        throw std::invalid_argument("beta must lie outside [1/p - 1, 1/p] for the mean functional");
    if (!std::isfinite(f.sup_abs())) throw DomainError("mean functional needs a bounded function");
    const int n = window.dim();
    if (f.dim() != n || w.dim() != n) throw DimensionError("dimension mismatch");
    const double b = beta - 1.0 / p, e = beta * p - 1.0;
    Box win = window_box(window);
    Quadrature q;
    q.rel_tol = 1e-12;
    q.abs_tol = 0.0;
    Quadrature q2;
    q2.scheme = Quadrature::Scheme::TensorGauss;
    q2.gauss_order = 10;
    q2.panels = 1;
    std::vector<CubeTerm> terms;
    enumerate(window, [&](const Cube& Q) {
        Box B = Box::from(Q);
        double vol = B.volume(), integral;
        if (n == 1) {
            integral = integrate([&](double x) { return std::abs(f.eval(&x)); }, B.lo[0], B.hi[0], q,
                                 f.breakpoints(0), f.singular_points())
                           .value;
        } else if (n == 2) {
            integral = integrate2(
                           [&](double x, double y) {
                               double pt[2] = {x, y};
                               return std::abs(f.eval(pt));
                           },
                           B.lo[0], B.hi[0], B.lo[1], B.hi[1], q2, f.breakpoints(0), f.breakpoints(1))
                           .value;
        } else {
            throw DimensionError("mean functional supports n = 1 or 2");
        }
        CubeTerm t;
        t.cube = Q;
        t.value = integral / vol;
        t.error = 1e-12 * t.value;
        t.scale = std::pow(vol, b);
        t.weight = std::pow(vol, e) * w.mass(Q);
        t.boundary = touches_boundary(Q, win);
        terms.push_back(std::move(t));
    });
    return terms;
}

FunctionalProfile mean_functional(const TestFunction& f, const Weight& w, double p, double beta,
                                  const GridWindow& window, const LambdaGrid& grid) {
    return profile_from_terms(mean_terms(f, w, p, beta, window), p, grid, 1e-9);
}

VerificationRecord verify_mean(const TestFunction& f, const Weight& w, double p, double beta,
                               const GridWindow& window, const LambdaGrid& grid, double ceiling) {
    VerificationRecord rec;
    rec.check = "mean";
    rec.params = {{"p", p}, {"beta", beta}, {"function", f.name()}, {"weight", w.describe()}};
    auto prof = mean_functional(f, w, p, beta, window, grid);
    rec.lhs = prof.exact_sup;
    rec.diagnostics["profile"] = prof.summary();
    auto est = ap_constant(w, p, default_probes(w, window));
    auto norm = lp_norm(f, w, p, window_box(window));
    rec.diagnostics["ap_estimate"] = est.value;
    rec.diagnostics["lp_norm_p"] = norm.pth;
    if (est.unbounded) {
        rec.rhs = std::numeric_limits<double>::infinity();
        rec.ratio = norm.pth > 0 ? rec.lhs / norm.pth : 0.0;
        rec.verdict = "fail";
        rec.reason = "ap_unbounded";
        return rec;
    }
    rec.rhs = est.value * norm.pth;
    rec.ratio = rec.rhs > 0 ? rec.lhs / rec.rhs : (rec.lhs == 0 ? 0.0 : std::numeric_limits<double>::infinity());
    rec.verdict = rec.ratio <= ceiling ? "pass" : "fail";
    if (!rec.passed()) rec.reason = "ratio exceeds ceiling";
    return rec;
}

double cube_weight(const Cube& Q, double sigma, const Weight& w) {
    return std::pow(Q.volume(), sigma - 1.0) * w.mass(Q);
}

namespace {

struct Forest {
    std::vector<int> parent;
    std::vector<std::vector<int>> kids;
    std::vector<int> order;  // children before parents
};

Forest build_forest(const std::vector<Cube>& S) {
    if (S.empty()) return {};
    const Shift& sh = S.front().shift;
    std::map<Cube, int> index;
    int jmax = S.front().j;
    for (std::size_t i = 0; i < S.size(); ++i) {
        if (S[i].shift != sh) throw std::invalid_argument("family mixes shifted grids");
        if (!index.emplace(S[i], static_cast<int>(i)).second)
            throw std::invalid_argument("family contains a repeated cube");
        jmax = std::max(jmax, S[i].j);
    }
    Forest F;
    F.parent.assign(S.size(), -1);
    F.kids.resize(S.size());
    for (std::size_t i = 0; i < S.size(); ++i) {
        Cube A = S[i];
        while (A.j < jmax) {
            A = parent(A);
            auto it = index.find(A);
            if (it != index.end()) {
                F.parent[i] = it->second;
                F.kids[it->second].push_back(static_cast<int>(i));
                break;
            }
        }
    }
    F.order.resize(S.size());
    for (std::size_t i = 0; i < S.size(); ++i) F.order[i] = static_cast<int>(i);
    std::sort(F.order.begin(), F.order.end(), [&](int a, int b) {
        if (S[a].j != S[b].j) return S[a].j < S[b].j;
        return a < b;
    });
    return F;
}

void fill_partition(GoodPartition& out, const std::vector<Cube>& S) {
    for (std::size_t i = 0; i < S.size(); ++i) (out.is_good[i] ? out.good : out.bad).push_back(S[i]);
}

}  // namespace

GoodPartition classify_good(const std::vector<Cube>& S, double sigma, const Weight& w) {
    GoodPartition out;
    auto F = build_forest(S);
    out.own.resize(S.size());
    out.descendants.assign(S.size(), 0.0);
    out.is_good.assign(S.size(), true);
    std::vector<double> best(S.size(), 0.0);
    for (std::size_t i = 0; i < S.size(); ++i) out.own[i] = cube_weight(S[i], sigma, w);
    for (int i : F.order) {
        for (int c : F.kids[i]) out.descendants[i] += best[c];
        best[i] = std::max(out.own[i], out.descendants[i]);
        out.is_good[i] = F.kids[i].empty() || out.descendants[i] <= out.own[i] * (1.0 + kGoodSlack);
    }
    fill_partition(out, S);
    return out;
}

GoodPartition classify_good_brute(const std::vector<Cube>& S, double sigma, const Weight& w) {
    if (S.size() > 20) throw std::invalid_argument("brute force limited to 20 cubes");
    GoodPartition out;
    build_forest(S);
    out.own.resize(S.size());
    out.descendants.assign(S.size(), 0.0);
    out.is_good.assign(S.size(), true);
    for (std::size_t i = 0; i < S.size(); ++i) out.own[i] = cube_weight(S[i], sigma, w);
    for (std::size_t i = 0; i < S.size(); ++i) {
        std::vector<std::size_t> desc;
        for (std::size_t k = 0; k < S.size(); ++k)
            if (relate(S[k], S[i]) == Relation::PInsideQ) desc.push_back(k);
        if (desc.empty()) continue;
        double bestsum = 0.0;
        for (std::uint32_t mask = 1; mask < (1u << desc.size()); ++mask) {
            bool ok = true;
            double sum = 0.0;
            for (std::size_t a = 0; a < desc.size() && ok; ++a) {
                if (!(mask >> a & 1u)) continue;
                sum += out.own[desc[a]];
                for (std::size_t b = a + 1; b < desc.size() && ok; ++b)
                    if ((mask >> b & 1u) && relate(S[desc[a]], S[desc[b]]) != Relation::Disjoint) ok = false;
            }
            if (ok) bestsum = std::max(bestsum, sum);
        }
        out.descendants[i] = bestsum;
        out.is_good[i] = bestsum <= out.own[i] * (1.0 + kGoodSlack);
    }
    fill_partition(out, S);
    return out;
}

VerificationRecord check_domination(const std::vector<Cube>& S, double sigma, double exponent,
                                    const Weight& w, Domination which,
                                    const std::optional<std::vector<Cube>>& E,
                                    const std::optional<std::vector<Cube>>& F) {
    if (S.empty()) throw std::invalid_argument("empty family");
    const int n = S.front().dim();
    auto part = classify_good(S, sigma, w);
    VerificationRecord rec;
    rec.params = {{"sigma", sigma}, {"exponent", exponent}, {"family_size", S.size()}};
    auto sum = [&](const std::vector<Cube>& fam) {
        double s = 0.0;
        for (const auto& Q : fam) s += cube_weight(Q, exponent, w);
        return s;
    };
    if (which == Domination::LemGoodI) {
        if (!(exponent < sigma)) throw std::invalid_argument("first domination needs gamma < sigma");
        rec.check = "domination_i";
        rec.lhs = sum(S);
        rec.rhs = sum(part.good) / (1.0 - std::pow(2.0, n * (exponent - sigma)));
    } else {
        if (!(exponent > sigma)) throw std::invalid_argument("second domination needs alpha > sigma");
        rec.check = "domination_ii";
        std::set<Cube> good(part.good.begin(), part.good.end());
        std::vector<Cube> fam_f, fam_e;
        if (F) {
            fam_f = *F;
        } else {
            for (const auto& Q : part.good) {
                bool maximal = true;
                for (const auto& P : part.good)
                    if (relate(Q, P) == Relation::PInsideQ) maximal = false;
                if (maximal) fam_f.push_back(Q);
            }
        }
        fam_e = E ? *E : part.good;
        for (const auto& Q : fam_f)
            if (!good.count(Q)) throw std::invalid_argument("F must consist of good cubes");
        for (std::size_t a = 0; a < fam_f.size(); ++a)
            for (std::size_t b = a + 1; b < fam_f.size(); ++b)
                if (relate(fam_f[a], fam_f[b]) != Relation::Disjoint)
                    throw std::invalid_argument("F must be pairwise disjoint");
        for (const auto& P : fam_e) {
            if (!good.count(P)) throw std::invalid_argument("E must consist of good cubes");
            bool covered = false;
            for (const auto& Q : fam_f) {
                auto r = relate(P, Q);
                if (r == Relation::Equal || r == Relation::PInsideQ) covered = true;
            }
            if (!covered) throw std::invalid_argument("every cube of E must lie in a cube of F");
        }
        rec.lhs = sum(fam_e);
        rec.rhs = sum(fam_f) / (1.0 - std::pow(2.0, n * (sigma - exponent)));
        rec.diagnostics["E_size"] = fam_e.size();
        rec.diagnostics["F_size"] = fam_f.size();
    }
    rec.diagnostics["good"] = part.good.size();
    rec.diagnostics["bad"] = part.bad.size();
    rec.ratio = rec.rhs > 0 ? rec.lhs / rec.rhs : (rec.lhs == 0 ? 0.0 : std::numeric_limits<double>::infinity());
    rec.verdict = rec.lhs <= rec.rhs * (1.0 + 1e-9) ? "pass" : "fail";
    return rec;
}

ChainReport sparse_chain_check(const TestFunction& f, double lambda, double beta, double p, double r,
                               const std::vector<Point>& samples, const GridWindow& window,
                               const OmegaOptions& opt) {
    if (beta == 1.0 / p) throw std::invalid_argument("beta must differ from 1/p");
    const int n = window.dim();
    const double b = beta + 1.0 - 1.0 / p, e = r * (beta - 1.0 / p);
    const Shift sh = window.shifts.empty() ? Shift::zero(n) : window.shifts.front();
    std::set<Cube> level;
    omega_sweep(f, window, sh, opt, [&](const CubeOmega& c) {
        if (c.omega > lambda * std::pow(c.cube.volume(), b)) level.insert(c.cube);
    });
    ChainReport rep;
    double G = 1.0 / (1.0 - std::pow(2.0, -n * r * std::abs(beta - 1.0 / p)));
    rep.constant = G * std::abs(1.0 / p - beta);
    for (const auto& x : samples) {
        double sum = 0.0;
        std::optional<Cube> qx;
        for (int j = window.j_min; j <= window.j_max; ++j) {
            Cube Q{sh, j, std::vector<std::int64_t>(n)};
            for (int k = 0; k < n; ++k) Q.m[k] = containing_index(x[k], sh.thirds[k], j);
            if (!level.count(Q)) continue;
            sum += std::pow(Q.volume(), e);
            if (!qx || beta > 1.0 / p) qx = Q;  // ascending j: first is minimal, last is maximal
        }
        if (!qx) {
            ++rep.skipped;
            continue;
        }
        ++rep.checked;
        double bound = G * std::pow(qx->volume(), e);
        rep.worst = std::max(rep.worst, sum / bound);
        if (sum > bound * (1.0 + 1e-9)) ++rep.violations;
    }
    if (rep.skipped) rep.notes.push_back(std::to_string(rep.skipped) + " samples outside every level cube");
    return rep;
}

}  // namespace wcddd
