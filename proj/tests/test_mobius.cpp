#include <cmath>
#include <random>

#include "doctest.h"
#include "wpdiag/errors.hpp"
#include "wpdiag/mobius.hpp"

using namespace wpdiag;

namespace {

constexpr int kIterations = 1000;

MobiusMap random_map(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (;;) {
        const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
        if (a * d - b * c > 0.1) return MobiusMap::from_coefficients(a, b, c, d);
    }
}

Mat2 random_sl2(std::mt19937_64& rng) {
    const MobiusMap m = random_map(rng);
    return m.matrix();
}

}  // namespace

TEST_CASE("identity and rotations act on lifts as expected") {
    CHECK(mobius_apply(MobiusMap{}, 0.3) == doctest::Approx(0.3).epsilon(1e-15));
    for (double c : {0.5, -1.2, 1.4}) {
        const LiftedMobius r = LiftedMobius::anchored(MobiusMap::rotation(c), 0.0, c);
        for (double x : {-4.0, 0.0, 0.7, 3.0, 10.0}) CHECK(r(x) == doctest::Approx(x + c).epsilon(1e-13));
    }
    CHECK(mobius_apply(MobiusMap::rotation(0.5), 0.2) == doctest::Approx(0.7));
}

TEST_CASE("hyperbola form evaluates with its pole at Q") {
    const MobiusMap f = MobiusMap::hyperbola(1.0, 1.0, 1.0);
    CHECK(f.apply_affine(0.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(std::isinf(f.apply_affine(1.0)));
    CHECK(f.apply_affine(2.0) == doctest::Approx(1.0 / (1.0 - 2.0) - 1.0));
    CHECK(f.apply_affine(INFINITY) == doctest::Approx(-1.0));
}

TEST_CASE("composition and inversion") {
    const MobiusMap m = MobiusMap::from_coefficients(2.0, 1.0, 0.5, 1.5);
    CHECK(max_abs_diff(m * m.inverse(), MobiusMap{}) < 1e-12);
    CHECK(max_abs_diff(MobiusMap::rotation(0.3) * MobiusMap::rotation(0.9), MobiusMap::rotation(1.2)) < 1e-12);

    // Hand multiplication: H = diag(sqrt2, 1/sqrt2), P = ((1, -1), (0, 1)).
    const double r2 = std::sqrt(2.0);
    const MobiusMap H = MobiusMap::scaling(2.0), P = MobiusMap::translation(-1.0);
    const MobiusMap hp = H * P, ph = P * H;
    CHECK(hp.a() == doctest::Approx(r2));
    CHECK(hp.b() == doctest::Approx(-r2));
    CHECK(hp.c() == doctest::Approx(0.0));
    CHECK(hp.d() == doctest::Approx(1.0 / r2));
    CHECK(ph.a() == doctest::Approx(r2));
    CHECK(ph.b() == doctest::Approx(-1.0 / r2));
    CHECK(ph.d() == doctest::Approx(1.0 / r2));
    CHECK(hp.apply_affine(3.0) == doctest::Approx(4.0));
    CHECK(ph.apply_affine(3.0) == doctest::Approx(5.0));
}

TEST_CASE("canonical representative has det 1 and positive leading entry") {
    const MobiusMap m = MobiusMap::from_coefficients(-2.0, 1.0, 3.0, -4.0);
    CHECK(m.a() > 0.0);
    CHECK(m.a() * m.d() - m.b() * m.c() == doctest::Approx(1.0).epsilon(1e-14));
    const MobiusMap z = MobiusMap::from_coefficients(0.0, -1.0, 1.0, 0.0);
    CHECK(z.b() > 0.0);
    CHECK_THROWS_AS(MobiusMap::from_coefficients(1.0, 2.0, 3.0, 4.0), Error);
}

TEST_CASE("group axioms on random maps") {
    std::mt19937_64 rng(20240601);
    for (int i = 0; i < kIterations; ++i) {
        const MobiusMap f = random_map(rng), g = random_map(rng), h = random_map(rng);
        const MobiusMap left = (f * g) * h, right = f * (g * h);
        REQUIRE(max_abs_diff(left, right) < 1e-12 * (1.0 + std::abs(left.a()) + std::abs(left.d())) * 10);
        REQUIRE(max_abs_diff(f * f.inverse(), MobiusMap{}) < 1e-12);
        REQUIRE(max_abs_diff(f.inverse().inverse(), f) < 1e-12);
        REQUIRE(std::abs(left.a() * left.d() - left.b() * left.c() - 1.0) <= 1e-12);
        REQUIRE(max_abs_diff(f * MobiusMap{}, f) < 1e-14);
    }
}

TEST_CASE("classification by trace") {
    CHECK(mobius_classify(MobiusMap{}) == MobiusKind::identity);
    CHECK(mobius_classify(MobiusMap::scaling(2.0)) == MobiusKind::hyperbolic);
    CHECK(mobius_classify(MobiusMap::translation(1.0)) == MobiusKind::parabolic);
    CHECK(mobius_classify(MobiusMap::rotation(0.4)) == MobiusKind::elliptic);
}

TEST_CASE("jets at zero") {
    const Jet2 id = jet_at_zero(MobiusMap{});
    CHECK(id.value == 0.0);
    CHECK(id.first == 1.0);
    CHECK(id.second == 0.0);
    CHECK(dist_to_identity_estimate(MobiusMap{}) == 0.0);

    const Jet2 tr = jet_at_zero(MobiusMap::translation(0.25));
    CHECK(tr.value == doctest::Approx(0.25));
    CHECK(tr.first == doctest::Approx(1.0));
    CHECK(tr.second == doctest::Approx(0.0));

    // t / (1 - t s / 2): series t + s t^2 / 2 + ..., so h''(0) = s.
    const double s = 0.3;
    const MobiusMap h3 = MobiusMap::from_coefficients(1.0, 0.0, -0.5 * s, 1.0);
    const Jet2 j3 = jet_at_zero(h3);
    CHECK(j3.value == doctest::Approx(0.0));
    CHECK(j3.first == doctest::Approx(1.0));
    CHECK(j3.second == doctest::Approx(s));
    const double t = 1e-3;
    const double second_fd = (h3.apply_affine(t) - 2.0 * h3.apply_affine(0.0) + h3.apply_affine(-t)) / (t * t);
    CHECK(second_fd == doctest::Approx(s).epsilon(1e-5));

    CHECK_THROWS_AS(jet_at_zero(MobiusMap::from_coefficients(0.0, 1.0, -1.0, 0.0)), Error);
}

TEST_CASE("chain rule for jets of compositions") {
    std::mt19937_64 rng(7);
    int tested = 0;
    while (tested < kIterations) {
        const MobiusMap f = random_map(rng), g = random_map(rng);
        Jet2 jg, jf, jfg;
        try {
            jg = jet_at_zero(g);
            jf = affine_jet(f, jg.value);
            jfg = jet_at_zero(f * g);
        } catch (const Error&) {
            continue;
        }
        if (std::abs(jg.value) > 1e3 || std::abs(jf.first) > 1e3 || std::abs(jg.first) > 1e3) continue;
        const double first = jf.first * jg.first;
        const double second = jf.second * jg.first * jg.first + jf.first * jg.second;
        const double scale = 1.0 + std::abs(jfg.first) + std::abs(jfg.second);
        REQUIRE(std::abs(jfg.value - jf.value) <= 1e-9 * (1.0 + std::abs(jf.value)));
        REQUIRE(std::abs(jfg.first - first) <= 1e-9 * scale);
        REQUIRE(std::abs(jfg.second - second) <= 1e-9 * scale);
        ++tested;
    }
}

TEST_CASE("normalising factors send the interval to [-1, 1]") {
    auto check = [](double lo, double hi, double h_slope, double p_shift) {
        const PheFactors f = phe_factors(lo, hi);
        CHECK(f.H.apply_affine(1.0) - f.H.apply_affine(0.0) == doctest::Approx(h_slope));
        CHECK(f.P.apply_affine(0.0) == doctest::Approx(p_shift));
        const MobiusMap ph = f.P * f.H;
        CHECK(ph.apply_affine(lo) == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(ph.apply_affine(hi) == doctest::Approx(1.0).epsilon(1e-12));
    };
    check(-1.0, 1.0, 1.0, 0.0);
    check(1.0, 3.0, 1.0, -2.0);
    check(0.0, 4.0, 0.5, -1.0);
    CHECK(max_abs_diff(phe_factors(-1.0, 1.0).H, MobiusMap{}) < 1e-15);
    CHECK_THROWS_AS(phe_factors(1.0, 1.0), Error);
}

TEST_CASE("matrix bilinear form and the quadric embedding") {
    CHECK(mat_inner(Mat2::identity(), Mat2::identity()) == doctest::Approx(-1.0));
    const MatVector22 e3{0.0, 0.0, 1.0, 0.0};
    CHECK(max_abs_diff(quad_embed(e3), Mat2::identity()) == 0.0);
    CHECK(inner22(e3, e3) == -1.0);

    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int i = 0; i < kIterations; ++i) {
        const MatVector22 x{n(rng), n(rng), n(rng), n(rng)}, y{n(rng), n(rng), n(rng), n(rng)};
        REQUIRE(std::abs(inner22(x, y) - mat_inner(quad_embed(x), quad_embed(y))) < 1e-12);
        const Mat2 m = quad_embed(x);
        REQUIRE(std::abs(m.det() + mat_inner(m, m)) < 1e-12);
        const MatVector22 back = quad_unembed(m);
        REQUIRE(std::abs(back.x1 - x.x1) + std::abs(back.x4 - x.x4) < 1e-14);
    }
}

TEST_CASE("isometry action preserves the form and determinants") {
    const Mat2 a{1.0, 2.0, 3.0, 4.0};
    CHECK(max_abs_diff(isom_action(Mat2::identity(), Mat2::identity(), a), a) == 0.0);
    std::mt19937_64 rng(13);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int i = 0; i < kIterations; ++i) {
        const Mat2 m = random_sl2(rng), nn = random_sl2(rng);
        const Mat2 x{n(rng), n(rng), n(rng), n(rng)}, y{n(rng), n(rng), n(rng), n(rng)};
        const Mat2 ax = isom_action(m, nn, x), ay = isom_action(m, nn, y);
        REQUIRE(std::abs(mat_inner(ax, ay) - mat_inner(x, y)) < 1e-9 * (1.0 + std::abs(mat_inner(x, y))) * 100);
        REQUIRE(std::abs(ax.det() - x.det()) < 1e-9 * (1.0 + std::abs(x.det())) * 100);
    }
}

TEST_CASE("Einstein action of the identity pair is trivial") {
    const auto out = ein_action(Mat2::identity(), Mat2::identity(), {0.4, 2.9});
    CHECK(out.first == doctest::Approx(0.4));
    CHECK(out.second == doctest::Approx(2.9));
}

TEST_CASE("lift evaluation is equivariant and differentiable") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ux(-6.0, 6.0);
    for (int i = 0; i < 200; ++i) {
        const LiftedMobius f(random_map(rng));
        for (int j = 0; j < 10; ++j) {
            const double x = ux(rng);
            REQUIRE(std::abs(f(x + kPi) - f(x) - kPi) < 1e-12);
            const double h = 1e-5;
            const double fd = (f(x + h) - f(x - h)) / (2.0 * h);
            REQUIRE(std::abs(fd - f.derivative(x)) < 1e-6 * (1.0 + f.derivative(x)));
            const double fd2 = (f.derivative(x + h) - f.derivative(x - h)) / (2.0 * h);
            REQUIRE(std::abs(fd2 - f.second_derivative(x)) < 1e-5 * (1.0 + std::abs(f.second_derivative(x))));
            REQUIRE(f(x + 1e-3) > f(x));
        }
        // Cell maxima dominate dense samples.
        const double u = ux(rng), v = u + 0.3;
        double dense = 0.0;
        for (int k = 0; k <= 300; ++k) dense = std::max(dense, f.derivative(u + 0.001 * k));
        REQUIRE(f.max_derivative_on(u, v) >= dense * (1.0 - 1e-12));
        REQUIRE(f.max_derivative_on(u, v) <= f.max_derivative() * (1.0 + 1e-12));
    }
}

TEST_CASE("lifted maps built from jets reproduce the jet") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < kIterations; ++i) {
        const double x = 3.0 * u(rng), y0 = 3.0 * u(rng), y1 = std::exp(u(rng)), y2 = 3.0 * u(rng);
        const LiftedMobius f = LiftedMobius::from_lift_jet(x, y0, y1, y2);
        REQUIRE(std::abs(f(x) - y0) < 1e-12 * (1.0 + std::abs(y0)));
        REQUIRE(std::abs(f.derivative(x) - y1) < 1e-11 * y1);
        REQUIRE(std::abs(f.second_derivative(x) - y2) < 1e-10 * (1.0 + std::abs(y2)));
    }
}

TEST_CASE("lifted composition and inverse") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 200; ++i) {
        const LiftedMobius f(random_map(rng), 1), g(random_map(rng), -2);
        const LiftedMobius fg = compose(f, g);
        const LiftedMobius fi = f.inverse();
        for (double x : {-3.0, 0.1, 2.5}) {
            REQUIRE(std::abs(fg(x) - f(g(x))) < 1e-10);
            REQUIRE(std::abs(fi(f(x)) - x) < 1e-10);
        }
    }
}
