#include <cmath>
#include <random>
#include <variant>

#include "doctest.h"
#include "wpdiag/charts.hpp"
#include "wpdiag/errors.hpp"

using namespace wpdiag;

namespace {

// Projective invariant of four lines given by angles.
double angle_cross_ratio(double a, double b, double c, double d) {
    return std::sin(a - c) * std::sin(b - d) / (std::sin(a - d) * std::sin(b - c));
}

// Lines of the same class up to sign.
double line_distance(const Mat2& x, const Mat2& y) {
    const double nx = std::hypot(std::hypot(x.a, x.b), std::hypot(x.c, x.d));
    const double ny = std::hypot(std::hypot(y.a, y.b), std::hypot(y.c, y.d));
    const Mat2 ux = (1.0 / nx) * x, uy = (1.0 / ny) * y;
    return std::min(max_abs_diff(ux, uy), max_abs_diff(ux, (-1.0) * uy));
}

}  // namespace

TEST_CASE("affine chart of RP1") {
    CHECK(quotient_affine(RP1Point(0.0)) == 0.0);
    CHECK(quotient_affine(RP1Point(kPi / 4)) == doctest::Approx(1.0));
    CHECK(std::isinf(quotient_affine(RP1Point(kPi / 2))));
    CHECK(affine_quotient(INFINITY).angle() == doctest::Approx(kPi / 2));
    CHECK(affine_quotient(-1.0).angle() == doctest::Approx(3 * kPi / 4));
    CHECK(RP1Point(-0.5).angle() == doctest::Approx(kPi - 0.5));
    CHECK(RP1Point(RP1Point(7.0).angle()).angle() == RP1Point(7.0).angle());
}

TEST_CASE("matrix angle representatives and fundamental domain") {
    CHECK(max_abs_diff(matrix_angle(0.0, 0.0), Mat2{1.0, 0.0, 0.0, 0.0}) == 0.0);
    CHECK(max_abs_diff(matrix_angle(kPi / 2, 0.0), Mat2{0.0, 0.0, 1.0, 0.0}) < 1e-16);
    const auto r = reduce_fundamental(kPi + 0.1, -kPi + 0.2);
    CHECK(r.first == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(r.second == doctest::Approx(0.2).epsilon(1e-12));
    const MatVector22 v = ein_null_vector(0.3, 1.1);
    CHECK(std::abs(inner22(v, v)) < 1e-15);
}

TEST_CASE("Penrose charts") {
    CHECK(penrose_rot(0.0, 0.0).first == 0.0);
    CHECK(penrose_mat(0.0, 0.0).second == 0.0);
    const auto rot = penrose_rot(kPi / 4, kPi / 4);
    CHECK(rot.first == doctest::Approx(1.0));
    CHECK(rot.second == doctest::Approx(1.0));
    const auto mat = penrose_mat(kPi / 4, kPi / 4);
    CHECK(mat.first == doctest::Approx(1.0));
    CHECK(mat.second == doctest::Approx(0.0));
    CHECK_THROWS_AS(penrose_rot(kPi / 2, 0.0), Error);
}

TEST_CASE("Kleinian chart examples and round trip") {
    const KleinPoint o = kleinian({0.0, 0.0, 0.0, 1.0});
    CHECK(o.y1 == 0.0);
    CHECK(o.y3 == 0.0);
    const MatVector22 x{1.0, 0.0, 1.0, 1.0};
    CHECK(inner22(x, x) == -1.0);
    const KleinPoint y = kleinian(x);
    CHECK(y.y1 == 1.0);
    CHECK(y.y3 == 1.0);
    CHECK(klein_norm(y) == 0.0);
    CHECK_THROWS_AS(kleinian({1.0, 0.0, 0.0, 0.0}), Error);
    CHECK_THROWS_AS(kleinian_inverse({1.0, 0.5, 0.0}), Error);

    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    int done = 0;
    while (done < 1000) {
        const double x1 = u(rng), x2 = u(rng), x3 = u(rng);
        const double q = 1.0 + x1 * x1 + x2 * x2 - x3 * x3;
        if (q < 1e-3) continue;
        const MatVector22 p{x1, x2, x3, std::sqrt(q)};
        REQUIRE(std::abs(inner22(p, p) + 1.0) < 1e-12);
        const KleinPoint k = kleinian(p);
        REQUIRE(klein_norm(k) < 1.0);
        const MatVector22 back = kleinian_inverse(k);
        const double err = std::abs(back.x1 - p.x1) + std::abs(back.x2 - p.x2) + std::abs(back.x3 - p.x3) +
                           std::abs(back.x4 - p.x4);
        REQUIRE(err < 1e-10 * (1.0 + std::abs(p.x4)));

        const KleinPoint kc = kleinian_centered(p);
        if (klein_norm(kc) < 1.0) {
            const MatVector22 bc = kleinian_centered_inverse(kc);
            const double s = p.x3 / bc.x3;
            REQUIRE(std::abs(s * bc.x4 - p.x4) < 1e-9 * (1.0 + std::abs(p.x4)));
        }
        ++done;
    }
}

TEST_CASE("centered Kleinian chart sends the diagonal to the unit circle") {
    for (double x = 0.05; x < kPi; x += 0.1) {
        const KleinPoint y = kleinian_centered(ein_null_vector(x, x));
        CHECK(y.y3 == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(y.y1 * y.y1 + y.y2 * y.y2 == doctest::Approx(1.0));
    }
}

TEST_CASE("pullback metric of the matrix angle map is dx1 dx2") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    const double h = 1e-5;
    for (int i = 0; i < 1000; ++i) {
        const double x1 = u(rng), x2 = u(rng), v1 = std::cos(u(rng)), v2 = std::sin(u(rng));
        const Mat2 d = matrix_angle(x1 + h * v1, x2 + h * v2) - matrix_angle(x1 - h * v1, x2 - h * v2);
        const double q = mat_inner(d, d) / (4.0 * h * h);
        REQUIRE(std::abs(q - v1 * v2) < 1e-9);
    }
}

TEST_CASE("causal types follow the quadrant table") {
    CHECK(causal_type(1.0, 1.0) == CausalType::spacelike);
    CHECK(causal_type(-1.0, -2.0) == CausalType::spacelike);
    CHECK(causal_type(1.0, -1.0) == CausalType::timelike);
    CHECK(causal_type(-3.0, 1.0) == CausalType::timelike);
    CHECK(causal_type(1.0, 0.0) == CausalType::lightlike);
    CHECK(causal_type(0.0, -2.0) == CausalType::lightlike);
    CHECK_THROWS_AS(causal_type(0.0, 0.0), Error);
}

TEST_CASE("acausal circle descriptors") {
    const auto id = acausal_circle_of(MobiusMap{});
    REQUIRE(std::holds_alternative<CurveLine>(id));
    CHECK(std::get<CurveLine>(id).slope == doctest::Approx(1.0));
    CHECK(std::get<CurveLine>(id).intercept == doctest::Approx(0.0));

    const auto aff = acausal_circle_of(MobiusMap::from_coefficients(2.0, 1.0, 0.0, 1.0));
    REQUIRE(std::holds_alternative<CurveLine>(aff));
    CHECK(std::get<CurveLine>(aff).slope == doctest::Approx(2.0));
    CHECK(std::get<CurveLine>(aff).intercept == doctest::Approx(1.0));

    const auto hyp = acausal_circle_of(MobiusMap::hyperbola(1.0, 1.0, 1.0));
    REQUIRE(std::holds_alternative<CurveHyperbola>(hyp));
    const CurveHyperbola hh = std::get<CurveHyperbola>(hyp);
    CHECK(hh.P == doctest::Approx(1.0));
    CHECK(hh.center().first == doctest::Approx(1.0));
    CHECK(hh.center().second == doctest::Approx(-1.0));

    // The descriptor reproduces the graph.
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
        if (a * d - b * c < 0.1) continue;
        const MobiusMap f = MobiusMap::from_coefficients(a, b, c, d);
        const auto desc = acausal_circle_of(f);
        const double t = u(rng);
        if (std::abs(f.c() * t + f.d()) < 1e-3) continue;
        double y = 0.0;
        if (const auto* line = std::get_if<CurveLine>(&desc)) {
            y = line->slope * t + line->intercept;
            REQUIRE(line->slope > 0.0);
        } else {
            const auto& hy = std::get<CurveHyperbola>(desc);
            y = hy.P / (hy.Q - t) - hy.R;
            REQUIRE(hy.P > 0.0);
        }
        REQUIRE(std::abs(y - f.apply_affine(t)) < 1e-9 * (1.0 + std::abs(y)));
    }
}

TEST_CASE("isometry action maps Moebius graphs to Moebius graphs") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_real_distribution<double> ang(0.0, kPi);
    int done = 0;
    while (done < 200) {
        const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
        const double p = u(rng), q = u(rng), r = u(rng), s = u(rng);
        if (a * d - b * c < 0.1 || p * s - q * r < 0.1) continue;
        const Mat2 m = MobiusMap::from_coefficients(a, b, c, d).matrix();
        const Mat2 n = MobiusMap::from_coefficients(p, q, r, s).matrix();
        const LiftedMobius f(MobiusMap::from_coefficients(u(rng) + 3.0, 0.25 * u(rng), 0.25 * u(rng), u(rng) + 3.0));
        double xs[4], ys[4];
        for (int k = 0; k < 4; ++k) {
            const double x = ang(rng);
            const auto img = ein_action(m, n, {x, f(x)});
            xs[k] = img.first;
            ys[k] = img.second;
        }
        const double cx = angle_cross_ratio(xs[0], xs[1], xs[2], xs[3]);
        const double cy = angle_cross_ratio(ys[0], ys[1], ys[2], ys[3]);
        if (std::abs(cx) > 1e3) continue;
        REQUIRE(std::abs(cx - cy) < 1e-8 * (1.0 + std::abs(cx)));

        // The matrix action corresponds to (M, N^{-t}) on lines.
        const double x1 = ang(rng), x2 = ang(rng);
        const Mat2 moved = isom_action(m, n, matrix_angle(x1, x2));
        const auto lines = ein_action(m, n.inverse(), {x1, x2});
        REQUIRE(line_distance(moved, matrix_angle(lines.first, lines.second)) < 1e-10);
        ++done;
    }
}
