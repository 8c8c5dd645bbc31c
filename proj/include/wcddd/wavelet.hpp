#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "wcddd/funcspace.hpp"
#include "wcddd/grid.hpp"
#include "wcddd/records.hpp"
#include "wcddd/weights.hpp"

namespace wcddd {

struct WaveletError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Daubechies scaling function and wavelet with N vanishing moments, sampled at i / 2^depth on
// the support [0, 2N - 1].
struct WaveletSystem {
    int order = 0;
    int depth = 0;
    std::vector<double> h;  // scaling filter, sum sqrt(2)
    std::vector<double> g;  // g[i] = (-1)^i h[L - 1 - i]
    std::vector<double> phi;
    std::vector<double> psi;

    // Diagnostics filled by build_daubechies.
    double refinement_residual = 0.0;
    std::vector<double> moments;  // |int x^k psi|, k = 0..N-1
    double orthonormality_residual = 0.0;   // <phi(. - k), phi> - delta_k0
    double system_residual = 0.0;           // also psi against phi and psi

    int support() const { return 2 * order - 1; }
    double step() const;
    std::size_t samples() const { return phi.size(); }
    // psi^0 = phi, psi^1 = psi; linear interpolation between samples, closed form for Haar.
    double value(int e, double x) const;
    // Quadrature of int g(u) psi^e(u) du over the support on the sample grid; stride > 1
    // thins the grid.
    double integrate(int e, const std::function<double(double)>& g, int stride = 1) const;
    double lp_norm(int e, double p) const;
};

WaveletSystem build_daubechies(int N, int depth = 12);

struct WaveletIndex {
    std::vector<int> e;              // e in {0,1}^n
    int j = 0;                       // I = 2^{-j} [k + [0,1)^n]
    std::vector<std::int64_t> k;

    int dim() const { return static_cast<int>(k.size()); }
    Cube cube() const;
    double volume() const;
    int code() const;  // e read as a binary number, e_1 most significant
};

// psi^e_{I,p}(x) = 2^{jn/p} psi^e(2^j x - k); p = inf drops the amplitude factor.
std::function<double(const Point&)> normalized_atom(const WaveletSystem& sys,
                                                    const WaveletIndex& w, double p);

// Truncation of Omega to generations 0..j_max and atoms whose support meets the window.
struct IndexSet {
    int n = 1;
    int j_max = 0;
    Box window;
    std::vector<WaveletIndex> indices;
};

IndexSet make_index_set(const WaveletSystem& sys, const Box& window, int j_max);

struct Coefficients {
    std::vector<WaveletIndex> indices;
    std::vector<double> values;
    std::vector<double> errors;      // fine versus half-resolution difference
    std::vector<bool> boundary;      // atom support leaves the window
    double max_error = 0.0;

    Table table() const;
};

struct CoefficientOptions {
    // Sample stride in n = 2 (per axis); n = 1 always uses every sample.
    int stride_2d = 64;
};

// <f, psi_{omega,n}> as a Lebesgue integral over the atom support.
Coefficients coefficients(const TestFunction& f, const WaveletSystem& sys, const IndexSet& idx,
                          const CoefficientOptions& opt = {});

struct SeqNorms {
    double strong = 0.0;  // l^p_{beta,v}
    double weak = 0.0;    // wl^1_{beta,v}
    double weak_lambda = 0.0;
};

// Per-index weights |I|^{beta-1} v(I).
std::vector<double> sequence_weights(const std::vector<WaveletIndex>& idx, double beta,
                                     const Weight& w);
SeqNorms seq_norms(const std::vector<double>& a, const std::vector<double>& weights, double p);
SeqNorms seq_norms(const std::vector<double>& a, const std::vector<WaveletIndex>& idx, double beta,
                   const Weight& w, double p);

struct AlmostCharOptions {
    double ceiling = 100.0;
    bool exploratory = false;
    CoefficientOptions coeff;
    // Finest grid generation of the A_1 probes is -probe_depth.
    int probe_depth = 10;
};

VerificationRecord verify_almost_char(const TestFunction& f, const WeightPtr& w, double beta,
                                      const WaveletSystem& sys, const IndexSet& idx,
                                      const AlmostCharOptions& opt = {});

}  // namespace wcddd
