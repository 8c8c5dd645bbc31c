#include "wcddd/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace wcddd {

namespace {

GridWindow interval_window(double lo, double hi, int j_min, int j_max, std::vector<Shift> shifts) {
    return make_window({Rational(lo)}, {Rational(hi)}, j_min, j_max, std::move(shifts));
}

// Masses of |x|^a on the family cube and the ratio between consecutive family terms.
struct Family {
    std::vector<Cube> cubes;
    double first_term = 0.0;
    double ratio = 0.0;
};

double cert_sum(const Family& fam, double lambda, double p) {
    return std::pow(lambda, p) * fam.first_term / (1.0 - fam.ratio);
}

}  // namespace

const char* to_string(SweepCase c) {
    switch (c) {
        case SweepCase::A1: return "a1";
        case SweepCase::Ap: return "ap";
        case SweepCase::BetaLimit: return "beta_limit";
    }
    return "?";
}

SweepCase sweep_case_from(const std::string& s) {
    if (s == "a1" || s == "A1") return SweepCase::A1;
    if (s == "ap" || s == "Ap") return SweepCase::Ap;
    if (s == "beta_limit" || s == "beta-limit" || s == "BetaLimit") return SweepCase::BetaLimit;
    throw std::invalid_argument("unknown sweep case '" + s + "' (a1, ap, beta_limit)");
}

std::vector<double> dyadic_grid(int k_lo, int k_hi) {
    std::vector<double> out;
    for (int k = k_lo; k <= k_hi; ++k) out.push_back(std::ldexp(1.0, -k));
    return out;
}

LineFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y, double endpoint_weight) {
    if (x.size() != y.size()) throw std::invalid_argument("fit needs equal lengths");
    if (x.size() < 5) throw std::invalid_argument("slope fit needs at least 5 points");
    const auto m = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd A(m, 2);
    Eigen::VectorXd b(m), w = Eigen::VectorXd::Ones(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (!(x[static_cast<std::size_t>(i)] > 0) || !(y[static_cast<std::size_t>(i)] > 0))
            throw std::invalid_argument("log-log fit needs positive data");
        A(i, 0) = 1.0;
        A(i, 1) = std::log(x[static_cast<std::size_t>(i)]);
        b[i] = std::log(y[static_cast<std::size_t>(i)]);
    }
    w[0] = w[m - 1] = endpoint_weight;
    Eigen::VectorXd sw = w.cwiseSqrt();
    Eigen::Vector2d c = (sw.asDiagonal() * A).colPivHouseholderQr().solve(sw.asDiagonal() * b);
    Eigen::VectorXd r = A * c - b;
    LineFit fit;
    fit.intercept = c[0];
    fit.slope = c[1];
    fit.residual = std::sqrt(r.cwiseProduct(r).dot(w) / w.sum());
    return fit;
}

Table SweepResult::table() const {
    Table t;
    t.columns = {"param", "beta", "lambda", "lhs_cert", "lhs_full", "weight_mass",
                 "lower_mass", "gradient_pth", "ap_estimate", "certified"};
    for (const auto& q : points)
        t.rows.push_back({q.param, q.beta, q.lambda, q.lhs_cert, q.lhs_full, q.weight_mass,
                          q.lower_mass, q.gradient_pth, q.ap_estimate, static_cast<double>(q.certified)});
    return t;
}

nlohmann::json SweepResult::summary() const {
    return {{"case", to_string(kind)},
            {"p", p},
            {"points", points.size()},
            {"slope", slope},
            {"intercept", intercept},
            {"residual", residual},
            {"expected_slope", expected_slope},
            {"tol", tol},
            {"all_certified", all_certified},
            {"verdict", verdict}};
}

SweepResult sharpness_sweep(SweepCase kind, double p, const std::vector<double>& grid,
                            const SweepOptions& opt) {
    if (grid.size() < 5) throw std::invalid_argument("sweep grid too small for a slope fit (need >= 5)");
    if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
    if (kind != SweepCase::A1 && !(p > 1.0)) throw std::invalid_argument("Ap and BetaLimit sweeps need p > 1");
    SweepResult res;
    res.kind = kind;
    res.p = p;
    res.expected_slope = kind == SweepCase::A1 ? -1.0 : -(p + 1.0);
    res.tol = opt.tol >= 0 ? opt.tol : (kind == SweepCase::A1 ? 0.05 : 0.15);
    res.all_certified = true;
    const Shift third({1});

    for (double d : grid) {
        SweepPoint pt;
        pt.param = d;
        WeightPtr w;
        FunctionPtr f;
        Family fam;
        double b = 0.0;
        Box grad_box = Box::interval(-1.0, 2.0);
        GridWindow full;
        std::vector<Box> probes;

        if (kind == SweepCase::A1) {
            if (!(d > 0 && d < 1)) throw std::invalid_argument("A1 sweep needs delta in (0,1)");
            pt.beta = opt.beta;
            w = power_weight(0.5, d - 1.0);
            f = smoothed_indicator(1.0);
            b = opt.beta + 1.0 - 1.0 / p;
            pt.lambda = std::pow(4.0, -opt.beta - 3.0 + 1.0 / p);
            Cube I0 = make_cube(Shift::zero(1), 2, {0});
            fam.cubes = {I0};
            pt.weight_mass = w->mass(I0);
            pt.lower_mass = w->mass(Box::interval(0.5, 4.0));
            fam.first_term = std::pow(4.0, opt.beta * p - 1.0) * pt.weight_mass;
            fam.ratio = 0.0;
            full = interval_window(-4.0, 8.0, -6, 3, {Shift::zero(1)});
            probes = default_probes(*w, interval_window(-4.0, 8.0, -8, 3, Shift::all(1)));
        } else {
            double a = 0.0;
            if (kind == SweepCase::Ap) {
                if (!(d > 0 && d < 0.5)) throw std::invalid_argument("Ap sweep needs delta in (0,1/2)");
                pt.beta = 1.0 / p - 1.0;
                a = (p - 1.0) * (1.0 - d);
                f = sharp2_fdelta(d);
                b = 0.0;
                pt.lambda = 1.0 / (9.0 * d);
                // I_j = [-2^{2j-1}/3, 2^{2j}/3), j >= 2, in the 1/3-shifted grid.
                for (int j = 2; j < 2 + opt.certify_terms; ++j) fam.cubes.push_back(make_cube(third, 2 * j - 1, {0}));
                full = interval_window(-128.0, 256.0, -4, 8, {third});
            } else {
                if (!(d > 0 && d < 1.0)) throw std::invalid_argument("BetaLimit sweep needs beta + 1 - 1/p in (0,1)");
                pt.beta = 1.0 / p - 1.0 + d;
                a = (p - 1.0) * (1.0 - d);
                f = sharp3_fbeta(pt.beta, p);
                b = d;
                pt.lambda = std::pow(3.0, -d) / (9.0 * d);
                // Q_j = (-2^{-2j-1}/3, 2^{-2j}/3), j >= 1.
                for (int j = 1; j <= opt.certify_terms; ++j) fam.cubes.push_back(make_cube(third, -2 * j - 1, {0}));
                full = interval_window(-1.0, 1.0, -12, 0, {third});
            }
            w = power_weight(0.0, a);
            const double e = pt.beta * p - 1.0;
            const Cube& Q = fam.cubes.front();
            pt.weight_mass = w->mass(Q);
            fam.first_term = std::pow(Q.volume(), e) * pt.weight_mass;
            // The weight is homogeneous, so consecutive terms differ by a fixed factor.
            const Cube& Q2 = fam.cubes[1];
            fam.ratio = std::pow(Q2.volume(), e) * w->mass(Q2) / fam.first_term;
            probes = default_probes(*w, interval_window(-4.0, 4.0, -8, 2, Shift::all(1)));
        }

        for (const auto& Q : fam.cubes) {
            auto om = omega(*f, Q, opt.omega);
            ++pt.checked;
            if (om.value - om.error > pt.lambda * std::pow(Q.volume(), b)) ++pt.certified;
        }
        res.all_certified = res.all_certified && pt.certified == pt.checked;
        pt.lhs_cert = cert_sum(fam, pt.lambda, p);
        pt.gradient_pth = sobolev_seminorm(*f, *w, p, grad_box).pth;
        pt.ap_estimate = ap_constant(*w, p, probes).value;
        if (opt.full_grid) {
            CdddConfig cfg;
            cfg.p = p;
            cfg.beta = pt.beta;
            cfg.weight = w;
            cfg.window = full;
            cfg.lambdas = opt.lambdas;
            cfg.omega = opt.omega;
            cfg.exploratory = true;
            pt.lhs_full = cddd_functional(cfg, *f).exact_sup;
        }
        res.points.push_back(pt);
    }

    std::vector<double> x, y;
    for (const auto& q : res.points) {
        x.push_back(q.param);
        y.push_back(q.lhs_cert);
    }
    auto fit = loglog_fit(x, y, opt.endpoint_weight);
    res.slope = fit.slope;
    res.intercept = fit.intercept;
    res.residual = fit.residual;
    bool ok = std::abs(res.slope - res.expected_slope) <= res.tol && res.all_certified;
    res.verdict = ok ? "pass" : "fail";
    return res;
}

Table ClassifierReport::table() const {
    Table t;
    t.columns = {"series", "beta", "window", "lhs", "norm", "ratio"};
    for (std::size_t s = 0; s < series.size(); ++s)
        for (std::size_t k = 0; k < series[s].windows.size(); ++k)
            t.rows.push_back({static_cast<double>(s), series[s].beta, series[s].windows[k], series[s].lhs[k],
                              series[s].norms[k], series[s].ratios[k]});
    return t;
}

nlohmann::json ClassifierReport::summary() const {
    nlohmann::json js = nlohmann::json::array();
    for (std::size_t s = 0; s < series.size(); ++s)
        js.push_back({{"series", s},
                      {"function", series[s].function},
                      {"functional", series[s].functional},
                      {"beta", series[s].beta},
                      {"growth", series[s].growth}});
    nlohmann::json out = {{"p", p}, {"verdict", verdict}, {"max_growth", max_growth}, {"series", js}};
    out["analytic_in_ap"] = analytic ? nlohmann::json(*analytic) : nlohmann::json();
    out["agrees_with_analytic"] = agrees ? nlohmann::json(*agrees) : nlohmann::json();
    return out;
}

ClassifierReport weight_classifier(const WeightPtr& w, double p, const std::vector<FunctionPtr>& battery,
                                   const ClassifierOptions& opt) {
    if (!w) throw std::invalid_argument("weight required");
    if (opt.doublings < 1) throw std::invalid_argument("classifier needs at least one window doubling");
    const int n = w->dim();
    ClassifierReport rep;
    rep.p = p;

    auto finish = [&](ClassifierSeries& s) {
        for (std::size_t k = 0; k + 1 < s.ratios.size(); ++k)
            s.growth.push_back(s.ratios[k] > 0 ? s.ratios[k + 1] / s.ratios[k]
                                               : (s.ratios[k + 1] > 0 ? std::numeric_limits<double>::infinity() : 1.0));
        rep.series.push_back(std::move(s));
    };

    for (const auto& f : battery) {
        if (f->dim() != n) throw DimensionError("battery function and weight dimensions differ");
        for (double beta : opt.betas) {
            ClassifierSeries s;
            s.function = f->name();
            s.functional = "cddd";
            s.beta = beta;
            for (int k = 0; k <= opt.doublings; ++k) {
                double W = std::ldexp(opt.base, k);
                CdddConfig cfg;
                cfg.p = p;
                cfg.beta = beta;
                cfg.weight = w;
                cfg.exploratory = true;
                cfg.omega = opt.omega;
                int jm = static_cast<int>(std::ceil(std::log2(W))) + 1;
                std::vector<Rational> lo(static_cast<std::size_t>(n), Rational(-W)), hi(static_cast<std::size_t>(n), Rational(W));
                cfg.window = make_window(lo, hi, opt.j_min, jm, n == 1 ? Shift::all(1) : std::vector<Shift>{Shift::zero(n)});
                double lhs = cddd_functional(cfg, *f).exact_sup;
                Box box{Eigen::VectorXd::Constant(n, -W), Eigen::VectorXd::Constant(n, W)};
                double norm = sobolev_seminorm(*f, *w, p, box).pth;
                s.windows.push_back(W);
                s.lhs.push_back(lhs);
                s.norms.push_back(norm);
                s.ratios.push_back(norm > 0 ? lhs / norm : (lhs > 0 ? std::numeric_limits<double>::infinity() : 0.0));
            }
            finish(s);
        }
        if (opt.with_bsvy) {
            ClassifierSeries s;
            s.function = f->name();
            s.functional = "bsvy";
            for (int k = 0; k <= opt.doublings; ++k) {
                double W = std::ldexp(opt.base, k);
                BsvyConfig cfg;
                cfg.p = cfg.q = p;
                cfg.gamma = 1.0;
                cfg.weight = w;
                cfg.window = Box{Eigen::VectorXd::Constant(n, -W), Eigen::VectorXd::Constant(n, W)};
                cfg.lambdas = LambdaGrid{1e2, 1e4, opt.bsvy_lambdas};
                cfg.samples = opt.bsvy_samples;
                cfg.directions = 16;
                cfg.exploratory = true;
                auto prof = bsvy_functional(cfg, *f);
                double norm = sobolev_seminorm(*f, *w, p, cfg.window).norm;
                s.windows.push_back(W);
                s.lhs.push_back(prof.sup);
                s.norms.push_back(norm);
                s.ratios.push_back(norm > 0 ? prof.sup / norm : 0.0);
            }
            finish(s);
        }
    }

    bool all_bounded = true, any_blowup = false;
    for (const auto& s : rep.series) {
        bool every_step = !s.growth.empty();
        for (double g : s.growth) {
            rep.max_growth = std::max(rep.max_growth, g);
            if (!(g <= 1.0 + opt.bounded_tol)) all_bounded = false;
            if (!(g >= opt.blowup)) every_step = false;
        }
        for (double r : s.ratios)
            if (!std::isfinite(r)) all_bounded = false;
        any_blowup = any_blowup || every_step;
    }
    rep.verdict = any_blowup ? "violates" : (all_bounded ? "consistent with A_p" : "inconclusive");
    if (auto pf = w->power_form(); pf && n == 1) {
        rep.analytic = power_in_ap(pf->second, p);
        if (rep.verdict != "inconclusive") rep.agrees = (rep.verdict == "violates") != *rep.analytic;
    }
    return rep;
}

}  // namespace wcddd
