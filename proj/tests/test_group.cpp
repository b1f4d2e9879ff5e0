#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "carnot/group.hpp"
#include "carnot/serialize.hpp"
#include "carnot/vector_fields.hpp"
#include "oracle_helpers.hpp"

using namespace carnot;

TEST_CASE("named specs validate and report homogeneous dimension") {
    GroupSpec h1 = GroupSpec::named("h1");
    GroupSpec engel = GroupSpec::named("engel");
    GroupSpec r2 = GroupSpec::named("r2");
    CHECK_NOTHROW(h1.validate());
    CHECK_NOTHROW(engel.validate());
    CHECK_NOTHROW(r2.validate());
    CHECK(h1.homogeneous_dimension() == 4);
    CHECK(engel.homogeneous_dimension() == 7);
    CHECK(r2.homogeneous_dimension() == 2);
    CHECK(h1.dim() == 3);
    CHECK(engel.dim() == 4);
}

TEST_CASE("validate rejects a non-stratified algebra") {
    // step 2 with no bracket at all: [V1,V1] cannot span V2
    GroupSpec bad(2, {2, 1});
    CHECK_THROWS(bad.validate());
}

TEST_CASE("h1 multiply matches the closed-form law and the rational oracle") {
    GroupSpec g = GroupSpec::named("h1");

    CHECK(multiply(g, Point{1, 0, 0}, Point{0, 0, 0}) == Point{1, 0, 0});

    Point r = multiply(g, Point{1, 0, 0}, Point{0, 1, 0});
    CHECK(r[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r[2] == doctest::Approx(0.5).epsilon(1e-15));

    // rational instantiation of the generic series is exact
    oracle::FVec x = {oracle::Frac(1), oracle::Frac(0), oracle::Frac(0)};
    oracle::FVec y = {oracle::Frac(0), oracle::Frac(1), oracle::Frac(0)};
    auto z = bch_product<oracle::Frac>(
        g, x, y, [](double c) { return oracle::Frac::from_double(c); }, oracle::Frac(0));
    CHECK(z[0] == oracle::Frac(1));
    CHECK(z[1] == oracle::Frac(1));
    CHECK(z[2] == oracle::Frac(1, 2));

    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        Point p{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        Point q{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        Point got = multiply(g, p, q);
        Point want = oracle::h1_product(p, q);
        for (int i = 0; i < 3; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-14));
    }
}

TEST_CASE("engel multiply matches the exact depth-3 BCH oracle") {
    GroupSpec g = GroupSpec::named("engel");
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        // small dyadic rationals so the oracle stays exact
        oracle::FVec x(4), y(4);
        Point px(4), py(4);
        for (int i = 0; i < 4; ++i) {
            long long a = (long long)std::floor(rng.uniform(-8, 9));
            long long b = (long long)std::floor(rng.uniform(-8, 9));
            x[i] = oracle::Frac(a, 4);
            y[i] = oracle::Frac(b, 4);
            px.v[i] = x[i].value();
            py.v[i] = y[i].value();
        }
        auto want = oracle::bch_depth3(g, x, y);
        Point got = multiply(g, px, py);
        for (int i = 0; i < 4; ++i)
            CHECK(got[i] == doctest::Approx(want[i].value()).epsilon(1e-13).scale(1.0));
    }
}

TEST_CASE("inverse is negation and a true group inverse") {
    GroupSpec g = GroupSpec::named("h1");
    CHECK(inverse(g, Point{1, 2, 3}) == Point{-1, -2, -3});
    CHECK(inverse(g, origin(g)) == origin(g));

    GroupSpec e = GroupSpec::named("engel");
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        Point p = random_in_ball(e, 2.0, rng);
        Point z = multiply(e, p, inverse(e, p));
        for (int i = 0; i < e.dim(); ++i) CHECK(std::abs(z[i]) < 1e-14);
    }
}

TEST_CASE("dilations") {
    GroupSpec g = GroupSpec::named("h1");
    CHECK(dilate(g, 2.0, Point{1, 1, 1}) == Point{2, 2, 4});
    Point p{0.3, -0.2, 0.7};
    CHECK(dilate(g, 1.0, p) == p);
    CHECK_THROWS(dilate(g, 0.0, p));
    CHECK_THROWS(dilate(g, -1.0, p));

    // dilations are group homomorphisms
    for (const char* name : {"h1", "engel"}) {
        GroupSpec spec = GroupSpec::named(name);
        Rng rng(19);
        for (int trial = 0; trial < 100; ++trial) {
            double r = std::exp(rng.uniform(-1.5, 1.5));
            Point a = random_in_ball(spec, 1.5, rng);
            Point b = random_in_ball(spec, 1.5, rng);
            Point lhs = dilate(spec, r, multiply(spec, a, b));
            Point rhs = multiply(spec, dilate(spec, r, a), dilate(spec, r, b));
            for (int i = 0; i < spec.dim(); ++i)
                CHECK(lhs[i] == doctest::Approx(rhs[i]).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("gauge norm values and homogeneity") {
    GroupSpec g = GroupSpec::named("h1");
    CHECK(gauge_norm(g, Point{1, 0, 0}) == doctest::Approx(1.0));
    CHECK(gauge_norm(g, Point{0, 0, 1}) == doctest::Approx(1.0));
    CHECK(gauge_norm(g, Point{1, 1, 2}) == doctest::Approx(std::pow(8.0, 0.25)).epsilon(1e-12));
    CHECK(gauge_norm(g, origin(g)) == 0.0);

    for (const char* name : {"h1", "engel"}) {
        GroupSpec spec = GroupSpec::named(name);
        Rng rng(23);
        for (int trial = 0; trial < 200; ++trial) {
            Point p = random_in_ball(spec, 2.0, rng);
            double r = std::exp(rng.uniform(-2, 2));
            CHECK(gauge_norm(spec, dilate(spec, r, p)) ==
                  doctest::Approx(r * gauge_norm(spec, p)).epsilon(1e-12));
        }
    }
}

TEST_CASE("pseudo-distance: identity, norm reduction, left invariance") {
    GroupSpec g = GroupSpec::named("h1");
    Rng rng(29);
    for (int trial = 0; trial < 100; ++trial) {
        Point p = random_in_ball(g, 1.5, rng);
        Point q = random_in_ball(g, 1.5, rng);
        Point w = random_in_ball(g, 1.5, rng);
        CHECK(distance(g, p, p) == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
        CHECK(distance(g, origin(g), q) == doctest::Approx(gauge_norm(g, q)).epsilon(1e-13));
        CHECK(distance(g, multiply(g, w, p), multiply(g, w, q)) ==
              doctest::Approx(distance(g, p, q)).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("associativity over 1000 random triples") {
    for (const char* name : {"h1", "engel"}) {
        GroupSpec g = GroupSpec::named(name);
        Rng rng(31);
        double worst = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            Point p = random_in_ball(g, 1.5, rng);
            Point q = random_in_ball(g, 1.5, rng);
            Point w = random_in_ball(g, 1.5, rng);
            Point a = multiply(g, multiply(g, p, q), w);
            Point b = multiply(g, p, multiply(g, q, w));
            for (int i = 0; i < g.dim(); ++i)
                worst = std::max(worst, std::abs(a[i] - b[i]) / (1.0 + std::abs(a[i])));
        }
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("quasi-triangle inequality has a finite empirical constant") {
    for (const char* name : {"h1", "engel"}) {
        GroupSpec g = GroupSpec::named(name);
        Rng rng(37);
        double c = 0.0;
        for (int trial = 0; trial < 10000; ++trial) {
            Point p = random_in_ball(g, 1.0, rng);
            Point q = random_in_ball(g, 1.0, rng);
            Point w = random_in_ball(g, 1.0, rng);
            double lhs = distance(g, p, w);
            double rhs = distance(g, p, q) + distance(g, q, w);
            if (rhs > 1e-12) c = std::max(c, lhs / rhs);
        }
        INFO("empirical quasi-triangle constant for " << name << ": " << c);
        CHECK(c >= 1.0 - 1e-9);
        CHECK(c < 5.0);
    }
}

TEST_CASE("left-invariant fields: value at origin and h1 closed form") {
    GroupSpec g = GroupSpec::named("h1");
    auto fields = left_invariant_fields(g);
    REQUIRE(fields.size() == 3);

    // X = d_x - (y/2) d_t
    GradedPolynomial one = GradedPolynomial::constant(3, 1.0);
    CHECK(fields[0].coef[0] == one);
    CHECK(fields[0].coef[1].is_zero());
    CHECK(fields[0].coef[2] == GradedPolynomial::variable(3, 1) * (-0.5));
    // Y = d_y + (x/2) d_t
    CHECK(fields[1].coef[0].is_zero());
    CHECK(fields[1].coef[1] == one);
    CHECK(fields[1].coef[2] == GradedPolynomial::variable(3, 0) * 0.5);
    // T = d_t
    CHECK(fields[2].coef[0].is_zero());
    CHECK(fields[2].coef[1].is_zero());
    CHECK(fields[2].coef[2] == one);

    for (const char* name : {"h1", "engel"}) {
        GroupSpec spec = GroupSpec::named(name);
        auto fs = left_invariant_fields(spec);
        CHECK((int)fs.size() == spec.dim());
        std::vector<double> z(spec.dim(), 0.0);
        for (int a = 0; a < spec.dim(); ++a)
            for (int c = 0; c < spec.dim(); ++c)
                CHECK(fs[a].coef[c].eval(z) == doctest::Approx(a == c ? 1.0 : 0.0));
    }
    CHECK(GroupSpec::named("engel").horizontal_dim() == 2);
}

TEST_CASE("field commutators realize the structure constants") {
    for (const char* name : {"h1", "engel"}) {
        GroupSpec g = GroupSpec::named(name);
        FieldTable t(g);
        for (int a = 0; a < g.dim(); ++a)
            for (int b = 0; b < g.dim(); ++b) {
                VectorField comm = field_commutator(t.field(a), t.field(b));
                // expected: sum_c coef * X_c
                for (int c = 0; c < g.dim(); ++c) {
                    GradedPolynomial expect(g.dim());
                    for (const auto& term : g.bracket_terms(a, b))
                        expect += term.coef * t.field(term.target).coef[c];
                    GradedPolynomial diff = comm.coef[c] - expect;
                    CHECK(diff.max_abs_coef() < 1e-12);
                }
            }
    }
}

TEST_CASE("symbolic fields agree with numeric directional derivatives") {
    GroupSpec g = GroupSpec::named("engel");
    FieldTable t(g);
    auto f = [](const Point& p) {
        return std::sin(p[0]) * p[1] + 0.3 * p[2] * p[2] + std::cos(p[3]) + p[0] * p[2];
    };
    Rng rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        Point p = random_in_ball(g, 1.0, rng);
        for (int a = 0; a < g.dim(); ++a) {
            double numeric = numeric_field_derivative(g, a, f, p, 1e-6);
            // symbolic field applied through the chain rule with exact partials
            double symbolic = 0.0;
            std::vector<double> grad = {std::cos(p[0]) * p[1] + p[2], std::sin(p[0]),
                                        0.6 * p[2] + p[0], -std::sin(p[3])};
            for (int c = 0; c < g.dim(); ++c) symbolic += t.field(a).eval_coef(c, p) * grad[c];
            CHECK(numeric == doctest::Approx(symbolic).epsilon(1e-7).scale(1.0));
        }
    }
}

TEST_CASE("group spec json round trip") {
    for (const char* name : {"h1", "engel"}) {
        GroupSpec g = GroupSpec::named(name);
        json j = to_json(g);
        GroupSpec back = group_from_json(j);
        CHECK(back.step() == g.step());
        CHECK(back.layer_dims() == g.layer_dims());
        Rng rng(43);
        Point p = random_in_ball(g, 1.0, rng);
        Point q = random_in_ball(g, 1.0, rng);
        Point a = multiply(g, p, q);
        Point b = multiply(back, p, q);
        for (int i = 0; i < g.dim(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-15));
    }
    CHECK_THROWS(group_from_json(json{{"step", 2}, {"layer_dims", {2, 1}}, {"brackets", json::array()}}));
}

TEST_CASE("dimension mismatches are rejected") {
    GroupSpec g = GroupSpec::named("h1");
    CHECK_THROWS(multiply(g, Point{1, 0}, Point{0, 0, 0}));
    CHECK_THROWS(inverse(g, Point{1, 0}));
    CHECK_THROWS(gauge_norm(g, Point{1, 0, 0, 0}));
}
