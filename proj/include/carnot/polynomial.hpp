#ifndef CARNOT_POLYNOMIAL_HPP
#define CARNOT_POLYNOMIAL_HPP

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace carnot {

/// Sparse real polynomial in `nvars` variables, stored as a map from
/// multi-exponents to coefficients. Zero coefficients are never stored.
/// "Graded" refers to the weighted (homogeneous) degree used on Carnot
/// groups: each variable carries the weight of its layer, and the degree
/// of a monomial x^J is sum_i weight(i)*J_i.
class GradedPolynomial {
public:
    using Exponents = std::vector<int>;

    GradedPolynomial() = default;
    explicit GradedPolynomial(int nvars) : nvars_(nvars) {}

    static GradedPolynomial constant(int nvars, double c) {
        GradedPolynomial p(nvars);
        if (c != 0.0) p.terms_[Exponents(nvars, 0)] = c;
        return p;
    }

    static GradedPolynomial variable(int nvars, int i) {
        GradedPolynomial p(nvars);
        Exponents e(nvars, 0);
        e.at(i) = 1;
        p.terms_[e] = 1.0;
        return p;
    }

    static GradedPolynomial monomial(int nvars, Exponents e, double c) {
        GradedPolynomial p(nvars);
        if ((int)e.size() != nvars) throw std::invalid_argument("monomial: exponent size");
        if (c != 0.0) p.terms_[std::move(e)] = c;
        return p;
    }

    int nvars() const { return nvars_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<Exponents, double>& terms() const { return terms_; }

    void add_term(const Exponents& e, double c) {
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            if (c != 0.0) terms_[e] = c;
        } else {
            it->second += c;
            if (it->second == 0.0) terms_.erase(it);
        }
    }

    GradedPolynomial& operator+=(const GradedPolynomial& o) {
        check_same(o);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    GradedPolynomial& operator-=(const GradedPolynomial& o) {
        check_same(o);
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }
    GradedPolynomial& operator*=(double s) {
        if (s == 0.0) { terms_.clear(); return *this; }
        for (auto& [e, c] : terms_) c *= s;
        return *this;
    }

    friend GradedPolynomial operator+(GradedPolynomial a, const GradedPolynomial& b) { a += b; return a; }
    friend GradedPolynomial operator-(GradedPolynomial a, const GradedPolynomial& b) { a -= b; return a; }
    friend GradedPolynomial operator*(GradedPolynomial a, double s) { a *= s; return a; }
    friend GradedPolynomial operator*(double s, GradedPolynomial a) { a *= s; return a; }

    friend GradedPolynomial operator*(const GradedPolynomial& a, const GradedPolynomial& b) {
        a.check_same(b);
        GradedPolynomial r(a.nvars_);
        Exponents e(a.nvars_);
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) {
                for (int i = 0; i < a.nvars_; ++i) e[i] = ea[i] + eb[i];
                r.add_term(e, ca * cb);
            }
        return r;
    }

    /// d/dx_i, exact.
    GradedPolynomial derivative(int i) const {
        GradedPolynomial r(nvars_);
        for (const auto& [e, c] : terms_) {
            if (e[i] == 0) continue;
            Exponents d = e;
            d[i] -= 1;
            r.add_term(d, c * e[i]);
        }
        return r;
    }

    double eval(std::span<const double> x) const {
        if ((int)x.size() != nvars_) throw std::invalid_argument("eval: wrong point size");
        double s = 0.0;
        for (const auto& [e, c] : terms_) {
            double m = c;
            for (int i = 0; i < nvars_; ++i)
                for (int k = 0; k < e[i]; ++k) m *= x[i];
            s += m;
        }
        return s;
    }

    /// Substitute a polynomial for every variable: P(q_0(y),...,q_{n-1}(y)).
    GradedPolynomial compose(const std::vector<GradedPolynomial>& args) const {
        if ((int)args.size() != nvars_) throw std::invalid_argument("compose: arity");
        int m = args.empty() ? 0 : args[0].nvars_;
        GradedPolynomial r(m);
        for (const auto& [e, c] : terms_) {
            GradedPolynomial t = GradedPolynomial::constant(m, c);
            for (int i = 0; i < nvars_; ++i)
                for (int k = 0; k < e[i]; ++k) t = t * args[i];
            r += t;
        }
        return r;
    }

    /// Fix variables listed in `which` to the given values; the remaining
    /// variables are renumbered in increasing order.
    GradedPolynomial partial_eval(const std::vector<int>& which, std::span<const double> vals) const {
        std::vector<int> newindex(nvars_, -1);
        std::vector<double> fixed(nvars_, 0.0);
        std::vector<bool> isfixed(nvars_, false);
        for (size_t k = 0; k < which.size(); ++k) {
            isfixed[which[k]] = true;
            fixed[which[k]] = vals[k];
        }
        int m = 0;
        for (int i = 0; i < nvars_; ++i)
            if (!isfixed[i]) newindex[i] = m++;
        GradedPolynomial r(m);
        Exponents e2(m);
        for (const auto& [e, c] : terms_) {
            double cc = c;
            std::fill(e2.begin(), e2.end(), 0);
            for (int i = 0; i < nvars_; ++i) {
                if (isfixed[i]) {
                    for (int k = 0; k < e[i]; ++k) cc *= fixed[i];
                } else {
                    e2[newindex[i]] = e[i];
                }
            }
            if (cc != 0.0) r.add_term(e2, cc);
        }
        return r;
    }

    /// Weighted degree of the polynomial: max over nonzero terms of
    /// sum_i w_i * J_i. Returns -1 for the zero polynomial.
    int weighted_degree(std::span<const int> weights) const {
        int d = -1;
        for (const auto& [e, c] : terms_) d = std::max(d, term_degree(e, weights));
        return d;
    }

    static int term_degree(const Exponents& e, std::span<const int> weights) {
        int d = 0;
        for (size_t i = 0; i < e.size(); ++i) d += weights[i] * e[i];
        return d;
    }

    /// Keep only terms of weighted degree <= n.
    GradedPolynomial truncate(std::span<const int> weights, int n) const {
        GradedPolynomial r(nvars_);
        for (const auto& [e, c] : terms_)
            if (term_degree(e, weights) <= n) r.terms_[e] = c;
        return r;
    }

    /// Drop terms with |coef| <= eps (cleanup of float residue in tests/output).
    GradedPolynomial chop(double eps) const {
        GradedPolynomial r(nvars_);
        for (const auto& [e, c] : terms_)
            if (std::abs(c) > eps) r.terms_[e] = c;
        return r;
    }

    double max_abs_coef() const {
        double m = 0.0;
        for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
        return m;
    }

    bool operator==(const GradedPolynomial& o) const {
        return nvars_ == o.nvars_ && terms_ == o.terms_;
    }

    std::string str(const std::vector<std::string>& names = {}) const {
        if (terms_.empty()) return "0";
        std::string s;
        for (const auto& [e, c] : terms_) {
            if (!s.empty()) s += " + ";
            s += std::to_string(c);
            for (int i = 0; i < nvars_; ++i) {
                if (e[i] == 0) continue;
                s += "*";
                s += (i < (int)names.size()) ? names[i] : ("x" + std::to_string(i));
                if (e[i] > 1) s += "^" + std::to_string(e[i]);
            }
        }
        return s;
    }

private:
    void check_same(const GradedPolynomial& o) const {
        if (nvars_ != o.nvars_) throw std::invalid_argument("polynomial arity mismatch");
    }

    int nvars_ = 0;
    std::map<Exponents, double> terms_;
};

} // namespace carnot

#endif
