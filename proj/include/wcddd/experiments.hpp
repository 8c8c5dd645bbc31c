#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wcddd/bsvy.hpp"
#include "wcddd/cddd.hpp"
#include "wcddd/records.hpp"

namespace wcddd {

enum class SweepCase { A1, Ap, BetaLimit };

const char* to_string(SweepCase c);
SweepCase sweep_case_from(const std::string& s);  // "a1", "ap", "beta_limit"

// {2^{-k} : k = k_lo..k_hi}
std::vector<double> dyadic_grid(int k_lo, int k_hi);

struct SweepPoint {
    double param = 0.0;        // delta, or beta + 1 - 1/p for BetaLimit
    double beta = 0.0;
    double lambda = 0.0;       // threshold of the certifying family
    double lhs_cert = 0.0;     // lambda^p sum over the certifying family
    double lhs_full = 0.0;     // exact supremum over the full window (0 when skipped)
    double weight_mass = 0.0;  // v(I_0) for A1, v of the first family cube otherwise
    double lower_mass = 0.0;   // A1 only: v((1/2, 4))
    double gradient_pth = 0.0;
    double ap_estimate = 0.0;
    std::size_t certified = 0;  // family cubes verified in the level set
    std::size_t checked = 0;
};

struct SweepOptions {
    double beta = 2.0;         // A1 only
    bool full_grid = true;
    int certify_terms = 10;
    double tol = -1.0;         // < 0: 0.05 for A1, 0.15 otherwise
    double endpoint_weight = 0.5;
    LambdaGrid lambdas;
    OmegaOptions omega;
};

struct SweepResult {
    SweepCase kind = SweepCase::A1;
    double p = 1.0;
    std::vector<SweepPoint> points;
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;       // weighted RMS of the log-log fit
    double expected_slope = 0.0;
    double tol = 0.0;
    bool all_certified = false;
    std::string verdict;

    Table table() const;
    nlohmann::json summary() const;
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;
};

// Weighted least squares of log y on log x; the first and last points get endpoint_weight.
LineFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y,
                   double endpoint_weight = 0.5);

SweepResult sharpness_sweep(SweepCase kind, double p, const std::vector<double>& grid,
                            const SweepOptions& opt = {});

struct ClassifierOptions {
    std::vector<double> betas{-1.0, 2.0};
    double base = 2.0;           // windows [-base 2^k, base 2^k], k = 0..doublings
    int doublings = 3;
    int j_min = -5;
    bool with_bsvy = true;
    int bsvy_samples = 48;
    int bsvy_lambdas = 3;
    double bounded_tol = 0.05;   // growth per doubling at most 1 + tol everywhere
    double blowup = 4.0;         // growth per doubling at least this on every step
    OmegaOptions omega;
};

struct ClassifierSeries {
    std::string function;
    std::string functional;  // "cddd" or "bsvy"
    double beta = 0.0;
    std::vector<double> windows;
    std::vector<double> lhs;
    std::vector<double> norms;
    std::vector<double> ratios;
    std::vector<double> growth;
};

struct ClassifierReport {
    double p = 1.0;
    std::vector<ClassifierSeries> series;
    std::string verdict;                 // "consistent with A_p", "violates", "inconclusive"
    std::optional<bool> analytic;        // power weights |x - c|^a in n = 1
    std::optional<bool> agrees;
    double max_growth = 0.0;

    Table table() const;
    nlohmann::json summary() const;
};

ClassifierReport weight_classifier(const WeightPtr& w, double p,
                                   const std::vector<FunctionPtr>& battery,
                                   const ClassifierOptions& opt = {});

}  // namespace wcddd
