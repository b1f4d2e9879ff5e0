#ifndef CARNOT_VECTOR_FIELDS_HPP
#define CARNOT_VECTOR_FIELDS_HPP

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "carnot/group.hpp"
#include "carnot/polynomial.hpp"

namespace carnot {

/// First-order operator  V = sum_c coef[c](xi) d/dxi_c  with polynomial
/// coefficients. For the left-invariant basis field X_{l,k} the marker
/// `basis_index` records which basis element it represents.
struct VectorField {
    int basis_index = -1;
    std::vector<GradedPolynomial> coef; // one polynomial (in dim vars) per coordinate

    double eval_coef(int c, const Point& p) const { return coef[c].eval(p.v); }
};

/// The group product xi.eta as dim polynomials in 2*dim variables
/// (vars 0..N-1 are xi, N..2N-1 are eta).
inline std::vector<GradedPolynomial> symbolic_product(const GroupSpec& g) {
    int n = g.dim();
    std::vector<GradedPolynomial> x, y;
    for (int i = 0; i < n; ++i) x.push_back(GradedPolynomial::variable(2 * n, i));
    for (int i = 0; i < n; ++i) y.push_back(GradedPolynomial::variable(2 * n, n + i));
    GradedPolynomial zero(2 * n);
    return bch_product<GradedPolynomial>(
        g, x, y, [&](double c) { return GradedPolynomial::constant(2 * n, c); }, zero);
}

/// Left translation eta -> p.eta as dim polynomials in the eta variables.
inline std::vector<GradedPolynomial> left_translation(const GroupSpec& g, const Point& p) {
    int n = g.dim();
    auto prod = symbolic_product(g);
    std::vector<int> which(n);
    for (int i = 0; i < n; ++i) which[i] = i;
    std::vector<GradedPolynomial> out;
    out.reserve(n);
    for (int c = 0; c < n; ++c) out.push_back(prod[c].partial_eval(which, p.v));
    return out;
}

/// Full basis of left-invariant fields, obtained by differentiating
/// eta -> xi.eta at eta = 0. The first m_1 entries are the horizontal
/// generators; X_{l,k}(0) = d/dxi_{l,k}.
inline std::vector<VectorField> left_invariant_fields(const GroupSpec& g) {
    int n = g.dim();
    auto prod = symbolic_product(g);
    std::vector<VectorField> fields(n);
    // coefficient of X_a for direction c: d(xi.eta)_c / d eta_a at eta = 0
    std::vector<int> eta_vars(n);
    for (int i = 0; i < n; ++i) eta_vars[i] = n + i;
    std::vector<double> zeros(n, 0.0);
    for (int a = 0; a < n; ++a) {
        fields[a].basis_index = a;
        fields[a].coef.reserve(n);
        for (int c = 0; c < n; ++c) {
            GradedPolynomial d = prod[c].derivative(n + a);
            fields[a].coef.push_back(d.partial_eval(eta_vars, zeros));
        }
    }
    return fields;
}

/// Per-spec cache; field derivation is pure but not free.
class FieldTable {
public:
    explicit FieldTable(const GroupSpec& g) : spec_(g), fields_(left_invariant_fields(g)) {}

    const GroupSpec& spec() const { return spec_; }
    const std::vector<VectorField>& fields() const { return fields_; }
    const VectorField& field(int a) const { return fields_.at(a); }
    int horizontal_count() const { return spec_.horizontal_dim(); }

private:
    GroupSpec spec_;
    std::vector<VectorField> fields_;
};

/// Exact symbolic application of V to P.
inline GradedPolynomial apply_field(const VectorField& v, const GradedPolynomial& p) {
    GradedPolynomial r(p.nvars());
    for (int c = 0; c < (int)v.coef.size(); ++c) {
        if (v.coef[c].is_zero()) continue;
        GradedPolynomial dp = p.derivative(c);
        if (dp.is_zero()) continue;
        r += v.coef[c] * dp;
    }
    return r;
}

/// A derivative word X^I: ordered basis-field identifiers; the weighted
/// order |I| is the sum of the letters' layers.
struct DerivativeWord {
    std::vector<int> letters; // flattened basis indices, applied right-to-left

    int weighted_order(const GroupSpec& g) const {
        int o = 0;
        for (int a : letters) o += g.layer_of(a);
        return o;
    }
};

/// X^I P = X_{i1} X_{i2} ... X_{ik} P (operator composition, rightmost
/// letter acts first).
inline GradedPolynomial apply_word(const FieldTable& t, const DerivativeWord& w,
                                   const GradedPolynomial& p) {
    GradedPolynomial r = p;
    for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it)
        r = apply_field(t.field(*it), r);
    return r;
}

/// Commutator [V, W] as a vector field: coefficient_c = V(W_c) - W(V_c).
inline VectorField field_commutator(const VectorField& v, const VectorField& w) {
    VectorField r;
    int n = (int)v.coef.size();
    r.coef.reserve(n);
    for (int c = 0; c < n; ++c) r.coef.push_back(apply_field(v, w.coef[c]) - apply_field(w, v.coef[c]));
    return r;
}

/// L P = sum over horizontal generators of X_i(X_i(P)), exact.
inline GradedPolynomial sublaplacian_apply(const FieldTable& t, const GradedPolynomial& p) {
    GradedPolynomial r(p.nvars());
    for (int i = 0; i < t.horizontal_count(); ++i)
        r += apply_field(t.field(i), apply_field(t.field(i), p));
    return r;
}

/// Coordinate expansion of a second-order composition X_i X_j:
///   X_i X_j = sum_{c<=d} a2[{c,d}] d2/dc dd + sum_d a1[d] d/dd,
/// where the (c,d), c<d entry already contains both orders.
struct SecondOrderCoefs {
    std::map<std::pair<int, int>, GradedPolynomial> a2;
    std::vector<GradedPolynomial> a1;
};

inline SecondOrderCoefs second_order_expansion(const FieldTable& t, int i, int j) {
    const auto& Xi = t.field(i);
    const auto& Xj = t.field(j);
    int n = (int)Xi.coef.size();
    SecondOrderCoefs out;
    out.a1.assign(n, GradedPolynomial(n));
    auto add2 = [&](int c, int d, const GradedPolynomial& p) {
        auto key = std::minmax(c, d);
        auto it = out.a2.find(key);
        if (it == out.a2.end())
            out.a2.emplace(key, p);
        else
            it->second += p;
    };
    for (int c = 0; c < n; ++c) {
        if (Xi.coef[c].is_zero()) continue;
        for (int d = 0; d < n; ++d) {
            if (!Xj.coef[d].is_zero()) add2(c, d, Xi.coef[c] * Xj.coef[d]);
            GradedPolynomial dcoef = Xj.coef[d].derivative(c);
            if (!dcoef.is_zero()) out.a1[d] += Xi.coef[c] * dcoef;
        }
    }
    // prune exact zeros
    for (auto it = out.a2.begin(); it != out.a2.end();)
        it = it->second.is_zero() ? out.a2.erase(it) : std::next(it);
    return out;
}

/// Coordinate expansion of the sub-Laplacian L = sum_i X_i^2.
inline SecondOrderCoefs sublaplacian_expansion(const FieldTable& t) {
    SecondOrderCoefs acc;
    int n = t.spec().dim();
    acc.a1.assign(n, GradedPolynomial(n));
    for (int i = 0; i < t.horizontal_count(); ++i) {
        SecondOrderCoefs s = second_order_expansion(t, i, i);
        for (auto& [key, p] : s.a2) {
            auto it = acc.a2.find(key);
            if (it == acc.a2.end())
                acc.a2.emplace(key, p);
            else
                it->second += p;
        }
        for (int d = 0; d < n; ++d) acc.a1[d] += s.a1[d];
    }
    for (auto it = acc.a2.begin(); it != acc.a2.end();)
        it = it->second.is_zero() ? acc.a2.erase(it) : std::next(it);
    return acc;
}

/// Directional derivative along the basis field by nested centered
/// differences: X_a f(p) = d/dt f(p . (t e_a)) at t = 0.
template <class F>
double numeric_field_derivative(const GroupSpec& g, int a, F&& f, const Point& p, double h) {
    Point e((size_t)g.dim());
    e.v[a] = h;
    Point plus = multiply(g, p, e);
    e.v[a] = -h;
    Point minus = multiply(g, p, e);
    return (f(plus) - f(minus)) / (2.0 * h);
}

/// Nested numeric X^I f(p). Step tuned by the weighted word order
/// (h = eps^(1/(|I|+2))) unless overridden.
template <class F>
double numeric_word_derivative(const GroupSpec& g, const DerivativeWord& w, F&& f, const Point& p,
                               double h_override = 0.0) {
    if (w.letters.empty()) return f(p);
    double h = h_override;
    if (h <= 0.0) {
        int order = w.weighted_order(g);
        h = std::pow(2.220446049250313e-16, 1.0 / (order + 2));
    }
    DerivativeWord rest{std::vector<int>(w.letters.begin() + 1, w.letters.end())};
    auto inner = [&](const Point& q) { return numeric_word_derivative(g, rest, f, q, h); };
    return numeric_field_derivative(g, w.letters.front(), inner, p, h);
}

} // namespace carnot

#endif
