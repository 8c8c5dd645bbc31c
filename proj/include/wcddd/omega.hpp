#pragma once

#include <functional>
#include <string>
#include <vector>

#include "wcddd/funcspace.hpp"
#include "wcddd/grid.hpp"

namespace wcddd {

struct OmegaOptions {
    // Linear-fit cells per leaf edge.
    int cells_1d = 64;
    int cells_2d = 8;
    // Single-cube refinement stops when two resolutions agree to this.
    double rel_tol = 1e-9;
    int max_cells_1d = 1 << 16;
    int max_cells_2d = 512;
    // Cap on leaf cells of one sweep.
    std::size_t max_total_cells = 50'000'000;
};

struct OmegaResult {
    double value = 0.0;
    double error = 0.0;
    bool accurate = true;
    std::string method;
};

// omega_Q(f) = |Q|^{-1-1/n} int_Q int_Q |f(x) - f(y)| dx dy.
OmegaResult omega(const TestFunction& f, const Box& Q, const OmegaOptions& opt = {});
OmegaResult omega(const TestFunction& f, const Cube& Q, const OmegaOptions& opt = {});

// Double integral of |f(x) - f(y)| over [a,b]^2 for nondecreasing f, reduced to
// 2 int_a^b (f(x) - f(m)) (2x - a - b) dx.
double pair_integral_monotone(const TestFunction& f, double a, double b);

// Piecewise description of the distribution of f on a cube: point masses, density jumps
// and density slope changes at value t.
struct ValueEvent {
    double t = 0.0;
    double dmass = 0.0;
    double djump = 0.0;
    double dslope = 0.0;
    double dclosed = 0.0;
    int dopen = 0;
};

using Events = std::vector<ValueEvent>;

struct CellEvents {
    Events events;
    double mass = 0.0;
    // Sum of cell volume times midpoint deviation from the linear fit.
    double deviation = 0.0;
};

// Linear fits on the cells of a box, split at the breakpoints of f; sorted and coalesced.
CellEvents cell_events(const TestFunction& f, const Box& Q, int cells);

// Sorted union with equal values coalesced.
Events merge_events(const Events& a, const Events& b);

// int int |f(x) - f(y)| from a sorted event list and total mass,
// via the identity 2 int m(t) (M - m(t)) dt with m(t) the mass below t.
double pair_integral(const Events& ev, double mass);

struct CubeOmega {
    Cube cube;
    double omega = 0.0;
    double error = 0.0;
};

// Bottom-up sweep over one shifted grid of the window; visits every cube whose closure meets
// the window box with positive measure, from generation j_min upward.
void omega_sweep(const TestFunction& f, const GridWindow& w, const Shift& shift,
                 const OmegaOptions& opt, const std::function<void(const CubeOmega&)>& visit);

// All window cubes of all shifts, in enumeration order.
std::vector<CubeOmega> omega_window(const TestFunction& f, const GridWindow& w,
                                    const OmegaOptions& opt = {});

}  // namespace wcddd
