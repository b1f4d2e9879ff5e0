#ifndef CARNOT_GROUP_HPP
#define CARNOT_GROUP_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "carnot/random.hpp"

namespace carnot {

/// A point of the group in exponential coordinates of the first kind,
/// flattened layer by layer: (z_1,...,z_s), length sum(m_l).
struct Point {
    std::vector<double> v;

    Point() = default;
    Point(std::initializer_list<double> init) : v(init) {}
    explicit Point(std::vector<double> coords) : v(std::move(coords)) {}
    explicit Point(size_t n) : v(n, 0.0) {}

    size_t size() const { return v.size(); }
    double& operator[](size_t i) { return v[i]; }
    double operator[](size_t i) const { return v[i]; }
    bool operator==(const Point& o) const { return v == o.v; }
};

struct BracketTerm {
    int target;
    double coef;
};

/// Description of a stratified Lie algebra: step, layer dimensions and
/// structure constants on the flattened basis e_0..e_{N-1}.
/// [e_a, e_b] = sum_c coef * e_c, nonzero only when layer(a)+layer(b) = layer(c).
class GroupSpec {
public:
    GroupSpec() = default;
    GroupSpec(int step, std::vector<int> layer_dims) : step_(step), dims_(std::move(layer_dims)) {
        if (step_ < 1 || (int)dims_.size() != step_)
            throw std::invalid_argument("GroupSpec: layer_dims must have `step` entries");
        for (int m : dims_)
            if (m < 1) throw std::invalid_argument("GroupSpec: layer dims must be positive");
        layer_of_.clear();
        for (int l = 1; l <= step_; ++l)
            for (int i = 0; i < dims_[l - 1]; ++i) layer_of_.push_back(l);
        table_.assign(dim(), std::vector<std::vector<BracketTerm>>(dim()));
    }

    int step() const { return step_; }
    const std::vector<int>& layer_dims() const { return dims_; }
    int dim() const { return (int)layer_of_.size(); }
    int layer_of(int i) const { return layer_of_.at(i); }
    int horizontal_dim() const { return dims_[0]; }

    /// Q = sum_l l*m_l, always derived.
    int homogeneous_dimension() const {
        int q = 0;
        for (int l = 1; l <= step_; ++l) q += l * dims_[l - 1];
        return q;
    }

    /// Flattened index of basis element (layer, k), both 0-based in k.
    int basis_index(int layer, int k) const {
        int idx = 0;
        for (int l = 1; l < layer; ++l) idx += dims_[l - 1];
        return idx + k;
    }

    /// Weight vector for graded-degree bookkeeping (layer per coordinate).
    std::vector<int> weights() const { return std::vector<int>(layer_of_.begin(), layer_of_.end()); }

    /// Declare [e_a, e_b] += coef e_c (and the antisymmetric partner).
    void add_bracket(int a, int b, int c, double coef) {
        if (a == b) throw std::invalid_argument("add_bracket: a == b");
        if (layer_of(a) + layer_of(b) != layer_of(c))
            throw std::invalid_argument("add_bracket: bracket must respect the grading");
        table_[a][b].push_back({c, coef});
        table_[b][a].push_back({c, -coef});
    }

    const std::vector<BracketTerm>& bracket_terms(int a, int b) const { return table_[a][b]; }

    /// Lie bracket of coefficient vectors over any ring T; `conv` lifts the
    /// double structure constants into T.
    template <class T, class Conv>
    std::vector<T> bracket(const std::vector<T>& x, const std::vector<T>& y, Conv conv,
                           const T& zero) const {
        std::vector<T> r(dim(), zero);
        for (int a = 0; a < dim(); ++a) {
            for (int b = 0; b < dim(); ++b) {
                if (layer_of(a) + layer_of(b) > step_) continue;
                for (const auto& t : table_[a][b]) {
                    T term = x[a] * y[b];
                    r[t.target] = r[t.target] + term * conv(t.coef);
                }
            }
        }
        return r;
    }

    std::vector<double> bracket(const std::vector<double>& x, const std::vector<double>& y) const {
        return bracket<double>(x, y, [](double c) { return c; }, 0.0);
    }

    /// Structural sanity: antisymmetry by construction, grading on insert;
    /// here we check Jacobi and the stratification conditions. Throws on failure.
    void validate() const {
        int n = dim();
        // Jacobi on the basis: [[a,b],c] + [[b,c],a] + [[c,a],b] = 0.
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c) {
                    std::vector<double> acc(n, 0.0);
                    auto add_nested = [&](int p, int q, int r) {
                        for (const auto& t1 : table_[p][q])
                            for (const auto& t2 : table_[t1.target][r])
                                acc[t2.target] += t1.coef * t2.coef;
                    };
                    add_nested(a, b, c);
                    add_nested(b, c, a);
                    add_nested(c, a, b);
                    for (double x : acc)
                        if (std::abs(x) > 1e-12) throw std::runtime_error("GroupSpec: Jacobi identity fails");
                }
        // [V1, V_s] = 0.
        for (int a = 0; a < n; ++a) {
            if (layer_of(a) != 1) continue;
            for (int b = 0; b < n; ++b)
                if (layer_of(b) == step_ && !table_[a][b].empty())
                    throw std::runtime_error("GroupSpec: [V1,Vs] must vanish");
        }
        // [V1, V_l] spans V_{l+1}: rank of the bracket images equals m_{l+1}.
        for (int l = 1; l < step_; ++l) {
            int m_next = dims_[l];
            int off = basis_index(l + 1, 0);
            std::vector<std::vector<double>> rows;
            for (int a = 0; a < n; ++a) {
                if (layer_of(a) != 1) continue;
                for (int b = 0; b < n; ++b) {
                    if (layer_of(b) != l) continue;
                    std::vector<double> row(m_next, 0.0);
                    for (const auto& t : table_[a][b]) row[t.target - off] += t.coef;
                    rows.push_back(std::move(row));
                }
            }
            if (rank_of(rows, m_next) != m_next)
                throw std::runtime_error("GroupSpec: [V1,V" + std::to_string(l) +
                                         "] does not span V" + std::to_string(l + 1));
        }
    }

    static GroupSpec named(const std::string& name) {
        if (name == "h1") {
            GroupSpec g(2, {2, 1});
            g.add_bracket(0, 1, 2, 1.0); // [X,Y] = T
            return g;
        }
        if (name == "engel") {
            GroupSpec g(3, {2, 1, 1});
            g.add_bracket(0, 1, 2, 1.0); // [X1,X2] = Y
            g.add_bracket(0, 2, 3, 1.0); // [X1,Y]  = W
            return g;
        }
        if (name == "r2") { // abelian plane, step 1
            return GroupSpec(1, {2});
        }
        throw std::invalid_argument("unknown group spec: " + name);
    }

private:
    static int rank_of(std::vector<std::vector<double>> rows, int ncols) {
        int rank = 0;
        for (int col = 0; col < ncols && rank < (int)rows.size(); ++col) {
            int piv = -1;
            double best = 1e-12;
            for (int r = rank; r < (int)rows.size(); ++r)
                if (std::abs(rows[r][col]) > best) { best = std::abs(rows[r][col]); piv = r; }
            if (piv < 0) continue;
            std::swap(rows[rank], rows[piv]);
            for (int r = 0; r < (int)rows.size(); ++r) {
                if (r == rank) continue;
                double f = rows[r][col] / rows[rank][col];
                for (int c2 = col; c2 < ncols; ++c2) rows[r][c2] -= f * rows[rank][c2];
            }
            ++rank;
        }
        return rank;
    }

    int step_ = 1;
    std::vector<int> dims_{1};
    std::vector<int> layer_of_{1};
    std::vector<std::vector<std::vector<BracketTerm>>> table_;
};

namespace detail {

/// One Dynkin term: sign/(n*W*prod r_i!s_i!) times the right-nested bracket
/// of the letter word X^{r_1}Y^{s_1}...X^{r_n}Y^{s_n}.
struct DynkinTerm {
    std::vector<uint8_t> letters; // 0 = X, 1 = Y
    double coef;
};

/// All Dynkin terms of total word length <= max_weight. Deterministic order.
inline std::vector<DynkinTerm> make_dynkin_terms(int max_weight) {
    std::vector<DynkinTerm> out;
    auto factorial = [](int k) { double f = 1; for (int i = 2; i <= k; ++i) f *= i; return f; };
    // enumerate n blocks of (r_i, s_i), each with r_i+s_i >= 1
    std::vector<std::pair<int, int>> blocks;
    std::function<void(int, int)> rec = [&](int n_blocks, int weight_left) {
        if (!blocks.empty()) {
            int W = 0;
            double denom = 1.0;
            std::vector<uint8_t> letters;
            for (auto [r, s] : blocks) {
                W += r + s;
                denom *= factorial(r) * factorial(s);
                letters.insert(letters.end(), r, 0);
                letters.insert(letters.end(), s, 1);
            }
            int n = (int)blocks.size();
            double coef = ((n % 2) ? 1.0 : -1.0) / (n * W * denom);
            // nested bracket vanishes when the last two letters coincide
            size_t L = letters.size();
            if (L == 1 || letters[L - 1] != letters[L - 2])
                out.push_back({letters, coef});
        }
        if (weight_left == 0) return;
        for (int r = 0; r <= weight_left; ++r)
            for (int s = 0; s + r <= weight_left; ++s) {
                if (r + s == 0) continue;
                blocks.push_back({r, s});
                rec(n_blocks + 1, weight_left - r - s);
                blocks.pop_back();
            }
    };
    rec(0, max_weight);
    return out;
}

inline const std::vector<DynkinTerm>& dynkin_terms(int max_weight) {
    static std::mutex mtx;
    static std::map<int, std::vector<DynkinTerm>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(max_weight);
    if (it == cache.end()) it = cache.emplace(max_weight, make_dynkin_terms(max_weight)).first;
    return it->second;
}

} // namespace detail

/// Truncated Baker-Campbell-Hausdorff sum log(exp x * exp y) over any
/// commutative ring T (double for numerics, exact fractions or polynomials
/// elsewhere). Brackets deeper than the step vanish by nilpotency.
template <class T, class Conv>
std::vector<T> bch_product(const GroupSpec& g, const std::vector<T>& x, const std::vector<T>& y,
                           Conv conv, const T& zero) {
    std::vector<T> acc(g.dim(), zero);
    for (const auto& term : detail::dynkin_terms(g.step())) {
        const auto& w = term.letters;
        std::vector<T> b = (w.back() == 0) ? x : y;
        for (int i = (int)w.size() - 2; i >= 0; --i)
            b = g.bracket<T>((w[i] == 0) ? x : y, b, conv, zero);
        for (int c = 0; c < g.dim(); ++c) acc[c] = acc[c] + b[c] * conv(term.coef);
    }
    return acc;
}

/// Group law xi.eta by the truncated BCH series.
inline Point multiply(const GroupSpec& g, const Point& p, const Point& q) {
    if ((int)p.size() != g.dim() || (int)q.size() != g.dim())
        throw std::invalid_argument("multiply: dimension mismatch");
    auto r = bch_product<double>(g, p.v, q.v, [](double c) { return c; }, 0.0);
    return Point(std::move(r));
}

/// Inverse is negation in exponential coordinates of the first kind.
inline Point inverse(const GroupSpec& g, const Point& p) {
    if ((int)p.size() != g.dim()) throw std::invalid_argument("inverse: dimension mismatch");
    Point r = p;
    for (auto& x : r.v) x = -x;
    return r;
}

/// Anisotropic dilation: layer-l block scales by r^l.
inline Point dilate(const GroupSpec& g, double r, const Point& p) {
    if (r <= 0.0) throw std::invalid_argument("dilate: r must be positive");
    if ((int)p.size() != g.dim()) throw std::invalid_argument("dilate: dimension mismatch");
    Point q = p;
    for (int i = 0; i < g.dim(); ++i) q.v[i] *= std::pow(r, g.layer_of(i));
    return q;
}

/// |xi| = (sum_j |z_j|^{2s!/j})^{1/2s!} with |z_j| the Euclidean layer norm.
inline double gauge_norm(const GroupSpec& g, const Point& p) {
    if ((int)p.size() != g.dim()) throw std::invalid_argument("gauge_norm: dimension mismatch");
    int sfact = 1;
    for (int l = 2; l <= g.step(); ++l) sfact *= l;
    const double top = 2.0 * sfact;
    double s = 0.0;
    int idx = 0;
    for (int l = 1; l <= g.step(); ++l) {
        double z2 = 0.0;
        for (int k = 0; k < g.layer_dims()[l - 1]; ++k, ++idx) z2 += p[idx] * p[idx];
        if (z2 > 0.0) s += std::pow(z2, 0.5 * top / l);
    }
    return (s > 0.0) ? std::pow(s, 1.0 / top) : 0.0;
}

/// Pseudo-distance d(p,q) = |p^{-1} q|.
inline double distance(const GroupSpec& g, const Point& p, const Point& q) {
    return gauge_norm(g, multiply(g, inverse(g, p), q));
}

inline int homogeneous_dimension(const GroupSpec& g) { return g.homogeneous_dimension(); }

inline Point origin(const GroupSpec& g) { return Point((size_t)g.dim()); }

/// Random point of gauge norm exactly r (Gaussian direction re-normalized by
/// a dilation). Not a uniform sphere measure; fine for sampling sups.
inline Point random_on_sphere(const GroupSpec& g, double r, Rng& rng) {
    Point p((size_t)g.dim());
    double nrm = 0.0;
    while (nrm < 1e-12) {
        for (auto& x : p.v) x = rng.normal();
        nrm = gauge_norm(g, p);
    }
    return dilate(g, r / nrm, p);
}

/// Random point with gauge norm < r; radius weighted so the radial law
/// matches the r^Q volume scaling.
inline Point random_in_ball(const GroupSpec& g, double r, Rng& rng) {
    double u = rng.uniform();
    double rad = r * std::pow(u, 1.0 / g.homogeneous_dimension());
    return random_on_sphere(g, rad, rng);
}

} // namespace carnot

#endif
