#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wcddd/funcspace.hpp"
#include "wcddd/grid.hpp"
#include "wcddd/omega.hpp"
#include "wcddd/records.hpp"
#include "wcddd/weights.hpp"

namespace wcddd {

// beta in Omega_{p,n}.
bool in_omega_set(double p, double beta, int n);
// p/(p-1) when p > 1 and beta in [1/p - 1, 1/p), else 1.
double alpha_exponent(double p, double beta);

// Log-spaced lambda values; lo = hi = 0 means bracket from the data.
struct LambdaGrid {
    double lo = 0.0;
    double hi = 0.0;
    int count = 64;

    std::vector<double> values(double data_lo, double data_hi) const;
};

struct CdddConfig {
    double p = 1.0;
    double beta = 2.0;
    WeightPtr weight;
    GridWindow window;
    LambdaGrid lambdas;
    double tol = 1e-9;
    bool exploratory = false;
    double ceiling = 100.0;
    OmegaOptions omega;
};

// Throws std::invalid_argument naming the violated rule unless cfg.exploratory.
void validate(const CdddConfig& cfg);

struct LevelCube {
    Cube cube;
    double omega = 0.0;
    double threshold = 0.0;
    bool flagged = false;
};

// Cubes with omega_Q(f) > lambda |Q|^b; flagged entries lie within tolerance of the threshold.
struct LevelSet {
    std::vector<LevelCube> members;
    std::vector<LevelCube> flagged;
};

LevelSet level_set(const TestFunction& f, const GridWindow& window, double lambda, double b,
                   const OmegaOptions& opt = {}, double tol = 1e-9);
LevelSet level_set(const std::vector<CubeOmega>& table, double lambda, double b, double tol = 1e-9);

struct FunctionalProfile {
    std::vector<double> lambdas;
    std::vector<double> values;
    std::vector<double> values_low;   // flagged cubes excluded
    std::vector<double> values_high;  // flagged cubes included
    std::vector<std::size_t> n_cubes;
    std::vector<double> boundary_share;
    double sup = 0.0;
    double argmax_lambda = 0.0;
    std::vector<Cube> certifying;
    // Supremum over all lambda > 0, attained as a left limit at a cube threshold.
    double exact_sup = 0.0;
    double exact_argmax = 0.0;
    double spread = 0.0;
    std::size_t cubes = 0;

    Table table() const;
    nlohmann::json summary() const;
};

// Per-cube data shared by the functionals: criterion value, exponent-weighted mass, boundary flag.
struct CubeTerm {
    Cube cube;
    double value = 0.0;     // omega_Q or the mean of |f|
    double error = 0.0;
    double scale = 0.0;     // |Q|^b
    double weight = 0.0;    // |Q|^{beta p - 1} v(Q)
    bool boundary = false;
};

FunctionalProfile profile_from_terms(const std::vector<CubeTerm>& terms, double p,
                                     const LambdaGrid& grid, double tol);

std::vector<CubeTerm> cddd_terms(const CdddConfig& cfg, const TestFunction& f);
FunctionalProfile cddd_functional(const CdddConfig& cfg, const TestFunction& f);

// LHS is the exact supremum; the A_p estimate comes from default probes of the window.
VerificationRecord verify_cddd(const CdddConfig& cfg, const TestFunction& f);

// Mean criterion with b = beta - 1/p; beta in [1/p - 1, 1/p] is rejected.
std::vector<CubeTerm> mean_terms(const TestFunction& f, const Weight& w, double p, double beta,
                                 const GridWindow& window);
FunctionalProfile mean_functional(const TestFunction& f, const Weight& w, double p, double beta,
                                  const GridWindow& window, const LambdaGrid& grid = {});
VerificationRecord verify_mean(const TestFunction& f, const Weight& w, double p, double beta,
                               const GridWindow& window, const LambdaGrid& grid = {},
                               double ceiling = 100.0);

struct GoodPartition {
    std::vector<Cube> good;
    std::vector<Cube> bad;
    // Per input cube: own weight |Q|^{sigma-1} v(Q), best antichain of strict descendants, verdict.
    std::vector<double> own;
    std::vector<double> descendants;
    std::vector<bool> is_good;
};

double cube_weight(const Cube& Q, double sigma, const Weight& w);

GoodPartition classify_good(const std::vector<Cube>& S, double sigma, const Weight& w);
// Exhaustive antichain search; exponential, for testing small families.
GoodPartition classify_good_brute(const std::vector<Cube>& S, double sigma, const Weight& w);

enum class Domination { LemGoodI, LemGoodII };

// For LemGoodII without explicit E and F: F = maximal good cubes, E = all good cubes.
VerificationRecord check_domination(const std::vector<Cube>& S, double sigma, double exponent,
                                    const Weight& w, Domination which,
                                    const std::optional<std::vector<Cube>>& E = std::nullopt,
                                    const std::optional<std::vector<Cube>>& F = std::nullopt);

struct ChainReport {
    std::size_t checked = 0;
    std::size_t skipped = 0;
    std::size_t violations = 0;
    double worst = 0.0;        // max of chain sum / bound
    double constant = 0.0;     // geometric-series constant times |1/p - beta|
    std::vector<std::string> notes;
};

// Level-set chains through sample points on the first shift of the window.
ChainReport sparse_chain_check(const TestFunction& f, double lambda, double beta, double p, double r,
                               const std::vector<Point>& samples, const GridWindow& window,
                               const OmegaOptions& opt = {});

}  // namespace wcddd
