#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace wcddd {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct BudgetError : std::length_error {
    using std::length_error::length_error;
};

// Shift alpha in {0,1/3,2/3}^n, stored as integer thirds.
struct Shift {
    std::vector<int> thirds;

    Shift() = default;
    explicit Shift(std::vector<int> t);

    int dim() const { return static_cast<int>(thirds.size()); }
    static Shift zero(int n) { return Shift(std::vector<int>(n, 0)); }
    // All 3^n shifts in lexicographic order of thirds.
    static std::vector<Shift> all(int n);

    auto operator<=>(const Shift&) const = default;
    bool operator==(const Shift&) const = default;
};

// Half-open cube 2^j [m + [0,1)^n + (-1)^j alpha].
struct Cube {
    Shift shift;
    int j = 0;
    std::vector<std::int64_t> m;

    int dim() const { return static_cast<int>(m.size()); }
    Rational edge() const;
    Rational lower(int k) const;
    Rational upper(int k) const { return lower(k) + edge(); }
    double edge_d() const;
    double lower_d(int k) const;
    double upper_d(int k) const { return lower_d(k) + edge_d(); }
    double volume() const;
    double center_d(int k) const { return lower_d(k) + 0.5 * edge_d(); }

    auto operator<=>(const Cube&) const = default;
    bool operator==(const Cube&) const = default;

    std::string str() const;
};

Cube make_cube(const Shift& shift, int j, std::vector<std::int64_t> m);

enum class Relation { Disjoint, Equal, PInsideQ, QInsideP, Incomparable };

const char* to_string(Relation r);

Relation relate(const Cube& P, const Cube& Q);

std::vector<Cube> children(const Cube& Q);
Cube parent(const Cube& Q);
// Same-shift ancestor at generation j >= Q.j.
Cube ancestor(const Cube& Q, int j);

// Index of the same-shift cube of generation j containing x along one axis.
std::int64_t containing_index(double x, int third, int j);
std::int64_t containing_index(const Rational& x, int third, int j);

// Axis-parallel cube with rational lower corner and edge.
struct AxisCube {
    std::vector<Rational> lower;
    Rational edge;

    int dim() const { return static_cast<int>(lower.size()); }
    static AxisCube from(const Cube& Q);
};

bool contains(const Cube& outer, const AxisCube& inner);

// Scaled copy K*Q with the same center.
AxisCube dilate(const AxisCube& Q, const Rational& K);

// Generation forced by l(Q) in (3l/2, 3l].
int dominating_generation(const Rational& l);

struct Dominating {
    Shift shift;
    Cube cube;
};

// First shift in lexicographic order carrying a cube Q >= P with l(Q) in (3l/2, 3l].
Dominating dominating_cube(const AxisCube& P);

// All dominating cubes of P over all 3^n shifts.
std::vector<Cube> dominating_set(const AxisCube& P);

// Max over P in Dom(S) of #{Q in S : P in Dom(Q)}.
int dom_multiplicity(const std::vector<AxisCube>& S);

struct GridWindow {
    std::vector<Rational> lo;
    std::vector<Rational> hi;
    int j_min = 0;
    int j_max = 0;
    std::vector<Shift> shifts;
    std::size_t budget = 10'000'000;

    int dim() const { return static_cast<int>(lo.size()); }
    void validate() const;
};

GridWindow make_window(std::vector<Rational> lo, std::vector<Rational> hi, int j_min, int j_max,
                       std::vector<Shift> shifts);

// Inclusive index range of generation-j cubes overlapping [lo,hi) with positive length.
std::pair<std::int64_t, std::int64_t> index_range(const Rational& lo, const Rational& hi, int third,
                                                  int j);

std::size_t window_count(const GridWindow& w);

// Ordered by (shift, generation descending, index lexicographic).
void enumerate(const GridWindow& w, const std::function<void(const Cube&)>& emit);
std::vector<Cube> enumerate(const GridWindow& w);

bool inside_box(const Cube& Q, const GridWindow& w);

Rational pow2(int j);

}  // namespace wcddd
