#ifndef CARNOT_TAYLOR_HPP
#define CARNOT_TAYLOR_HPP

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "carnot/fitting.hpp"
#include "carnot/group.hpp"
#include "carnot/polynomial.hpp"
#include "carnot/random.hpp"
#include "carnot/vector_fields.hpp"

namespace carnot {

/// All exponent vectors with weighted degree sum_i w_i j_i <= n,
/// in deterministic (graded lexicographic-ish) order.
inline std::vector<GradedPolynomial::Exponents> monomials_up_to(const std::vector<int>& weights,
                                                                int n) {
    std::vector<GradedPolynomial::Exponents> out;
    GradedPolynomial::Exponents cur(weights.size(), 0);
    std::function<void(size_t, int)> rec = [&](size_t i, int left) {
        if (i == weights.size()) {
            out.push_back(cur);
            return;
        }
        for (int j = 0; j * weights[i] <= left; ++j) {
            cur[i] = j;
            rec(i + 1, left - j * weights[i]);
        }
        cur[i] = 0;
    };
    rec(0, n);
    return out;
}

/// PBW-ordered derivative words with weighted order <= n: one word per
/// multiset of basis letters, letters sorted ascending by flattened index
/// (layer, then index). In bijection with monomials_up_to, so the Taylor
/// matching system below is square.
inline std::vector<DerivativeWord> pbw_words_up_to(const GroupSpec& g, int n) {
    auto mult = monomials_up_to(g.weights(), n);
    std::vector<DerivativeWord> words;
    words.reserve(mult.size());
    for (const auto& e : mult) {
        DerivativeWord w;
        for (int i = 0; i < (int)e.size(); ++i) w.letters.insert(w.letters.end(), e[i], i);
        words.push_back(std::move(w));
    }
    return words;
}

/// Smooth input for Taylor expansion: either an exact polynomial or an
/// evaluable function handle (derivatives then by nested differences).
using SmoothFn = std::function<double(const Point&)>;
using TaylorInput = std::variant<GradedPolynomial, SmoothFn>;

/// P_n(f,xi): polynomial in the left-translated coordinates. Evaluation at
/// eta uses Q(xi^{-1} eta); X^I-derivatives at xi equal those of f.
struct TaylorPolynomial {
    Point base;
    GradedPolynomial poly; // in canonical coordinates around base

    double eval(const GroupSpec& g, const Point& eta) const {
        Point w = multiply(g, inverse(g, base), eta);
        return poly.eval(w.v);
    }
};

namespace detail {

inline GradedPolynomial translate_poly(const GroupSpec& g, const GradedPolynomial& p,
                                       const Point& xi) {
    // q(w) = p(xi . w), exact polynomial composition
    return p.compose(left_translation(g, xi));
}

} // namespace detail

/// The unique polynomial of homogeneous degree <= n with
/// X^I P (xi) = X^I f (xi) for all PBW words |I| <= n, built by solving
/// the square matching system over the monomial basis.
/// `fd_step` overrides the finite-difference step for function handles
/// (useful when f is only grid-resolved).
inline TaylorPolynomial taylor_poly(const FieldTable& t, const TaylorInput& f, const Point& xi,
                                    int n, double fd_step = 0.0) {
    const GroupSpec& g = t.spec();
    auto weights = g.weights();
    auto monos = monomials_up_to(weights, n);
    auto words = pbw_words_up_to(g, n);
    if (monos.size() != words.size()) throw std::logic_error("taylor: enumeration mismatch");
    const int m = (int)monos.size();

    Eigen::MatrixXd M(m, m);
    std::vector<double> z(g.dim(), 0.0);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) {
            GradedPolynomial mono = GradedPolynomial::monomial(g.dim(), monos[c], 1.0);
            M(r, c) = apply_word(t, words[r], mono).eval(z);
        }

    Eigen::VectorXd rhs(m);
    if (std::holds_alternative<GradedPolynomial>(f)) {
        GradedPolynomial p = std::get<GradedPolynomial>(f);
        bool at_origin = true;
        for (double x : xi.v) at_origin = at_origin && (x == 0.0);
        if (!at_origin) p = detail::translate_poly(g, p, xi);
        for (int r = 0; r < m; ++r) rhs(r) = apply_word(t, words[r], p).eval(z);
    } else {
        const auto& fn = std::get<SmoothFn>(f);
        auto shifted = [&](const Point& w) { return fn(multiply(g, xi, w)); };
        Point zero = origin(g);
        for (int r = 0; r < m; ++r)
            rhs(r) = numeric_word_derivative(g, words[r], shifted, zero, fd_step);
    }

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    Eigen::VectorXd coef = lu.solve(rhs);
    double resid = (M * coef - rhs).norm();
    double scale = rhs.norm() + 1.0;
    if (!coef.allFinite() || resid > 1e-8 * scale)
        throw std::runtime_error("taylor: singular matching system");

    GradedPolynomial q(g.dim());
    for (int c = 0; c < m; ++c)
        if (coef(c) != 0.0) q.add_term(monos[c], coef(c));
    return TaylorPolynomial{xi, q};
}

/// Result of the remainder-order fit. `exact` when the remainder is below
/// floating noise at every radius (f is its own Taylor polynomial).
struct RemainderSlope {
    bool exact = false;
    double slope = 0.0;
    double r2 = 0.0;
    std::vector<double> radii;
    std::vector<double> sups;
};

/// Least-squares slope of log sup_{d(xi,eta)=r} |f - P_n(f,xi)| against
/// log r, sampling eta on gauge spheres.
inline RemainderSlope remainder_slope(const FieldTable& t, const TaylorInput& f, const Point& xi,
                                      int n, const std::vector<double>& radii,
                                      int samples_per_radius = 400, uint64_t seed = 42) {
    const GroupSpec& g = t.spec();
    TaylorPolynomial P = taylor_poly(t, f, xi, n);
    auto feval = [&](const Point& p) -> double {
        if (std::holds_alternative<GradedPolynomial>(f)) return std::get<GradedPolynomial>(f).eval(p.v);
        return std::get<SmoothFn>(f)(p);
    };
    double fscale = std::abs(feval(xi)) + 1.0;

    RemainderSlope out;
    Rng rng(seed);
    for (double r : radii) {
        double sup = 0.0;
        for (int s = 0; s < samples_per_radius; ++s) {
            Point w = random_on_sphere(g, r, rng);
            Point eta = multiply(g, xi, w);
            sup = std::max(sup, std::abs(feval(eta) - P.poly.eval(w.v)));
        }
        out.radii.push_back(r);
        out.sups.push_back(sup);
    }
    const double floor = 1e-13 * fscale;
    bool all_noise = true;
    std::vector<std::pair<double, double>> pts;
    for (size_t i = 0; i < out.radii.size(); ++i) {
        if (out.sups[i] > floor) {
            all_noise = false;
            pts.push_back({out.radii[i], out.sups[i]});
        }
    }
    if (all_noise || pts.size() < 3) {
        out.exact = true;
        return out;
    }
    LineFit fit = fit_exponent(pts, true);
    out.slope = fit.slope;
    out.r2 = fit.r2;
    return out;
}

} // namespace carnot

#endif
