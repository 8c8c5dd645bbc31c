#include "wcddd/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace wcddd {

namespace {

int sign_of(int j) { return (j % 2 == 0) ? 1 : -1; }

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

BigInt floor_rational(const Rational& r) {
    BigInt num = boost::multiprecision::numerator(r);
    BigInt den = boost::multiprecision::denominator(r);
    BigInt q = num / den;
    if (q * den != num && num < 0) q -= 1;
    return q;
}

BigInt ceil_rational(const Rational& r) { return -floor_rational(-r); }

std::int64_t to_i64(const BigInt& v) {
    if (v > BigInt(std::numeric_limits<std::int64_t>::max()) ||
        v < BigInt(std::numeric_limits<std::int64_t>::min()))
        throw BudgetError("cube index out of int64 range");
    return v.convert_to<std::int64_t>();
}

void check_dims(const Cube& P, const Cube& Q) {
    if (P.dim() != Q.dim()) throw DimensionError("cubes of different dimension");
}

}  // namespace

Rational pow2(int j) {
    if (j >= 0) return Rational(BigInt(1) << j);
    return Rational(BigInt(1), BigInt(1) << (-j));
}

Shift::Shift(std::vector<int> t) : thirds(std::move(t)) {
    for (int a : thirds)
        if (a < 0 || a > 2) throw std::invalid_argument("shift coordinate must be 0, 1 or 2 thirds");
}

std::vector<Shift> Shift::all(int n) {
    std::vector<Shift> out;
    std::vector<int> t(n, 0);
    while (true) {
        out.emplace_back(t);
        int k = n - 1;
        while (k >= 0 && t[k] == 2) t[k--] = 0;
        if (k < 0) break;
        ++t[k];
    }
    return out;
}

Rational Cube::edge() const { return pow2(j); }

Rational Cube::lower(int k) const {
    Rational off(sign_of(j) * shift.thirds[k], 3);
    return pow2(j) * (Rational(m[k]) + off);
}

double Cube::edge_d() const { return std::ldexp(1.0, j); }

double Cube::lower_d(int k) const {
    return std::ldexp(static_cast<double>(3 * m[k] + sign_of(j) * shift.thirds[k]) / 3.0, j);
}

double Cube::volume() const { return std::ldexp(1.0, j * dim()); }

std::string Cube::str() const {
    std::ostringstream os;
    os << "{shift:[";
    for (int k = 0; k < shift.dim(); ++k) os << (k ? "," : "") << shift.thirds[k] << "/3";
    os << "],j:" << j << ",m:[";
    for (int k = 0; k < dim(); ++k) os << (k ? "," : "") << m[k];
    os << "]}";
    return os.str();
}

Cube make_cube(const Shift& shift, int j, std::vector<std::int64_t> m) {
    if (shift.dim() != static_cast<int>(m.size()))
        throw DimensionError("shift and index vectors differ in length");
    return Cube{shift, j, std::move(m)};
}

const char* to_string(Relation r) {
    switch (r) {
        case Relation::Disjoint: return "Disjoint";
        case Relation::Equal: return "Equal";
        case Relation::PInsideQ: return "PInsideQ";
        case Relation::QInsideP: return "QInsideP";
        case Relation::Incomparable: return "Incomparable";
    }
    return "?";
}

Cube parent(const Cube& Q) {
    Cube P = Q;
    int s = sign_of(Q.j);
    for (int k = 0; k < Q.dim(); ++k) P.m[k] = floor_div(Q.m[k] + s * Q.shift.thirds[k], 2);
    P.j = Q.j + 1;
    return P;
}

Cube ancestor(const Cube& Q, int j) {
    if (j < Q.j) throw std::invalid_argument("ancestor generation below cube generation");
    Cube A = Q;
    while (A.j < j) A = parent(A);
    return A;
}

std::vector<Cube> children(const Cube& Q) {
    const int n = Q.dim();
    const int s = sign_of(Q.j);
    std::vector<Cube> out;
    out.reserve(std::size_t(1) << n);
    for (int mask = 0; mask < (1 << n); ++mask) {
        Cube C = Q;
        C.j = Q.j - 1;
        for (int k = 0; k < n; ++k)
            C.m[k] = 2 * Q.m[k] + s * Q.shift.thirds[k] + ((mask >> (n - 1 - k)) & 1);
        out.push_back(std::move(C));
    }
    return out;
}

std::int64_t containing_index(double x, int third, int j) {
    return static_cast<std::int64_t>(std::floor(std::ldexp(x, -j) - sign_of(j) * third / 3.0));
}

std::int64_t containing_index(const Rational& x, int third, int j) {
    return to_i64(floor_rational(x / pow2(j) - Rational(sign_of(j) * third, 3)));
}

Relation relate(const Cube& P, const Cube& Q) {
    check_dims(P, Q);
    if (P.shift == Q.shift) {
        if (P.j == Q.j) return P.m == Q.m ? Relation::Equal : Relation::Disjoint;
        if (P.j < Q.j) return ancestor(P, Q.j) == Q ? Relation::PInsideQ : Relation::Disjoint;
        return ancestor(Q, P.j) == P ? Relation::QInsideP : Relation::Disjoint;
    }
    bool p_in_q = true, q_in_p = true, equal = true;
    for (int k = 0; k < P.dim(); ++k) {
        Rational pl = P.lower(k), pu = P.upper(k), ql = Q.lower(k), qu = Q.upper(k);
        if (pu <= ql || qu <= pl) return Relation::Disjoint;
        if (!(ql <= pl && pu <= qu)) p_in_q = false;
        if (!(pl <= ql && qu <= pu)) q_in_p = false;
        if (!(pl == ql && pu == qu)) equal = false;
    }
    if (equal) return Relation::Equal;
    if (p_in_q) return Relation::PInsideQ;
    if (q_in_p) return Relation::QInsideP;
    return Relation::Incomparable;
}

AxisCube AxisCube::from(const Cube& Q) {
    AxisCube A;
    A.edge = Q.edge();
    for (int k = 0; k < Q.dim(); ++k) A.lower.push_back(Q.lower(k));
    return A;
}

bool contains(const Cube& outer, const AxisCube& inner) {
    if (outer.dim() != inner.dim()) throw DimensionError("cube dimension mismatch");
    for (int k = 0; k < outer.dim(); ++k) {
        if (outer.lower(k) > inner.lower[k]) return false;
        if (inner.lower[k] + inner.edge > outer.upper(k)) return false;
    }
    return true;
}

AxisCube dilate(const AxisCube& Q, const Rational& K) {
    AxisCube out;
    out.edge = Q.edge * K;
    Rational shift = (out.edge - Q.edge) / 2;
    for (const auto& c : Q.lower) out.lower.push_back(c - shift);
    return out;
}

int dominating_generation(const Rational& l) {
    if (l <= 0) throw std::invalid_argument("cube edge must be positive");
    Rational three_l = 3 * l;
    // Largest j with 2^j <= 3l.
    int j = static_cast<int>(std::floor(std::log2(three_l.convert_to<double>())));
    while (pow2(j) > three_l) --j;
    while (pow2(j + 1) <= three_l) ++j;
    return j;
}

namespace {

bool candidate(const AxisCube& P, const Shift& sh, int j, Cube& out) {
    std::vector<std::int64_t> m(P.dim());
    for (int k = 0; k < P.dim(); ++k) m[k] = containing_index(P.lower[k], sh.thirds[k], j);
    out = make_cube(sh, j, std::move(m));
    return contains(out, P);
}

}  // namespace

Dominating dominating_cube(const AxisCube& P) {
    int j = dominating_generation(P.edge);
    for (const Shift& sh : Shift::all(P.dim())) {
        Cube Q;
        if (candidate(P, sh, j, Q)) return {sh, Q};
    }
    throw std::logic_error("no dominating cube found");
}

std::vector<Cube> dominating_set(const AxisCube& P) {
    int j = dominating_generation(P.edge);
    std::vector<Cube> out;
    for (const Shift& sh : Shift::all(P.dim())) {
        Cube Q;
        if (candidate(P, sh, j, Q)) out.push_back(std::move(Q));
    }
    return out;
}

int dom_multiplicity(const std::vector<AxisCube>& S) {
    if (S.empty()) throw std::invalid_argument("empty cube family");
    std::map<Cube, int> count;
    for (const auto& Q : S)
        for (auto& P : dominating_set(Q)) ++count[P];
    int best = 0;
    for (const auto& [P, c] : count) best = std::max(best, c);
    return best;
}

void GridWindow::validate() const {
    if (lo.size() != hi.size() || lo.empty()) throw DimensionError("window box dimension mismatch");
    for (std::size_t k = 0; k < lo.size(); ++k)
        if (!(lo[k] < hi[k])) throw std::invalid_argument("window box is empty");
    if (j_min > j_max) throw std::invalid_argument("window requires j_min <= j_max");
    if (shifts.empty()) throw std::invalid_argument("window has no shifts");
    for (const auto& s : shifts)
        if (s.dim() != dim()) throw DimensionError("shift dimension differs from window");
}

GridWindow make_window(std::vector<Rational> lo, std::vector<Rational> hi, int j_min, int j_max,
                       std::vector<Shift> shifts) {
    GridWindow w{std::move(lo), std::move(hi), j_min, j_max, std::move(shifts)};
    w.validate();
    return w;
}

std::pair<std::int64_t, std::int64_t> index_range(const Rational& lo, const Rational& hi, int third,
                                                  int j) {
    Rational off(sign_of(j) * third, 3);
    Rational scale = pow2(j);
    BigInt mlo = floor_rational(lo / scale - off);
    BigInt mhi = ceil_rational(hi / scale - off) - 1;
    return {to_i64(mlo), to_i64(mhi)};
}

std::size_t window_count(const GridWindow& w) {
    w.validate();
    std::size_t total = 0;
    for (const auto& sh : w.shifts) {
        for (int j = w.j_max; j >= w.j_min; --j) {
            std::size_t c = 1;
            for (int k = 0; k < w.dim(); ++k) {
                auto [a, b] = index_range(w.lo[k], w.hi[k], sh.thirds[k], j);
                auto len = static_cast<std::size_t>(b - a + 1);
                if (len > w.budget || c > w.budget / std::max<std::size_t>(len, 1))
                    throw BudgetError("window exceeds cube budget");
                c *= len;
            }
            total += c;
            if (total > w.budget) throw BudgetError("window exceeds cube budget");
        }
    }
    return total;
}

void enumerate(const GridWindow& w, const std::function<void(const Cube&)>& emit) {
    window_count(w);
    std::vector<Shift> shifts = w.shifts;
    std::sort(shifts.begin(), shifts.end());
    const int n = w.dim();
    for (const auto& sh : shifts) {
        for (int j = w.j_max; j >= w.j_min; --j) {
            std::vector<std::pair<std::int64_t, std::int64_t>> r(n);
            for (int k = 0; k < n; ++k) r[k] = index_range(w.lo[k], w.hi[k], sh.thirds[k], j);
            Cube Q{sh, j, std::vector<std::int64_t>(n)};
            for (int k = 0; k < n; ++k) Q.m[k] = r[k].first;
            while (true) {
                emit(Q);
                int k = n - 1;
                while (k >= 0 && Q.m[k] == r[k].second) {
                    Q.m[k] = r[k].first;
                    --k;
                }
                if (k < 0) break;
                ++Q.m[k];
            }
        }
    }
}

std::vector<Cube> enumerate(const GridWindow& w) {
    std::vector<Cube> out;
    enumerate(w, [&](const Cube& Q) { out.push_back(Q); });
    return out;
}

bool inside_box(const Cube& Q, const GridWindow& w) {
    for (int k = 0; k < Q.dim(); ++k)
        if (Q.lower(k) < w.lo[k] || Q.upper(k) > w.hi[k]) return false;
    return true;
}

}  // namespace wcddd
