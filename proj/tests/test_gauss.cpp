#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "wpdiag/errors.hpp"
#include "wpdiag/gauss.hpp"

using namespace wpdiag;

namespace {

Mat2 random_sl2(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    for (;;) {
        const Mat2 m{n(rng), n(rng), n(rng), n(rng)};
        const double d = m.det();
        if (d > 0.05) return (1.0 / std::sqrt(d)) * m;
        if (d < -0.05) return (1.0 / std::sqrt(-d)) * Mat2{m.b, m.a, m.d, m.c};
    }
}

// Isometry X -> C X D^{-1} applied to a frame.
SpacelikeFrame move(const SpacelikeFrame& f, const Mat2& c, const Mat2& d) {
    const Mat2 d_inv = d.inverse();
    return {c * f.M * d_inv, c * f.N * d_inv};
}

bool squares_to_minus_id(const Mat2& x) { return max_abs_diff(x * x, (-1.0) * Mat2::identity()) < 1e-10; }

// Metric with a compatible complex structure and shape operator diag(lambda, -lambda) in a g-orthonormal basis.
struct Surface {
    Mat2 g, J, A;
};

Surface surface_data(const Mat2& g, double lambda) {
    // g = L L^t with L lower triangular; E = L^{-t} has g-orthonormal columns.
    const double l11 = std::sqrt(g.a), l21 = g.c / l11, l22 = std::sqrt(g.d - l21 * l21);
    const Mat2 e = Mat2{l11, 0.0, l21, l22}.transpose().inverse();
    const Mat2 e_inv = e.inverse();
    return {g, e * Mat2::J() * e_inv, e * Mat2{lambda, 0.0, 0.0, -lambda} * e_inv};
}

}  // namespace

TEST_CASE("identity frame has both Gauss maps equal to J") {
    const GaussMaps g = gauss_maps(make_frame(Mat2::identity(), Mat2::J()));
    CHECK(max_abs_diff(g.left, Mat2::J()) == 0.0);
    CHECK(max_abs_diff(g.right, Mat2::J()) == 0.0);
    CHECK(g.left_upper);
    CHECK(g.right_upper);
    CHECK_FALSE(in_upper_component((-1.0) * Mat2::J()));
    try {
        make_frame(Mat2::identity(), Mat2::identity());
        FAIL("expected FrameInvalid");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::FrameInvalid);
    }
    CHECK_THROWS_AS(make_frame(2.0 * Mat2::identity(), Mat2::J()), Error);
}

TEST_CASE("left action fixes G_l and conjugates G_r") {
    std::mt19937_64 rng(79);
    for (int i = 0; i < 200; ++i) {
        const SpacelikeFrame f = move({Mat2::identity(), Mat2::J()}, random_sl2(rng), random_sl2(rng));
        const Mat2 a = random_sl2(rng);
        const GaussMaps g0 = gauss_maps(f);
        const GaussMaps g1 = gauss_maps(move(f, a, Mat2::identity()));
        CHECK(squares_to_minus_id(g0.left));
        CHECK(squares_to_minus_id(g0.right));
        CHECK(max_abs_diff(g1.left, g0.left) < 1e-9);
        CHECK(max_abs_diff(g1.right, a * g0.right * a.inverse()) < 1e-9);
        // Isometries in the identity component keep both maps in H+.
        CHECK(g0.left_upper);
        CHECK(g0.right_upper);
    }
}

TEST_CASE("Gauss maps are invariant under the geodesic flow") {
    std::mt19937_64 rng(83);
    for (int i = 0; i < 20; ++i) {
        const SpacelikeFrame f = move({Mat2::identity(), Mat2::J()}, random_sl2(rng), random_sl2(rng));
        const GaussMaps g0 = gauss_maps(f);
        for (int k = 0; k <= 16; ++k) {
            const double t = -kPi + 2.0 * kPi * k / 16;
            const GaussMaps g = gauss_maps(geodesic_flow(f, t));
            CHECK(max_abs_diff(g.left, g0.left) < 1e-9);
            CHECK(max_abs_diff(g.right, g0.right) < 1e-9);
        }
    }
}

TEST_CASE("frames of a totally geodesic plane have a single Moebius correspondence") {
    std::mt19937_64 rng(89);
    std::vector<SpacelikeFrame> plane, generic;
    for (int i = 0; i < 100; ++i) {
        plane.push_back(totally_geodesic_frame(random_sl2(rng)));
        generic.push_back(move({Mat2::identity(), Mat2::J()}, random_sl2(rng), random_sl2(rng)));
    }
    const GaussCorrespondence c = fit_gauss_correspondence(plane);
    CHECK(c.orientation_preserving);
    CHECK(c.residual < 1e-9);
    // B = J^{-1} A J makes G_r = J G_l J^{-1}.
    CHECK(std::min(max_abs_diff(c.phi, Mat2::J()), max_abs_diff(c.phi, (-1.0) * Mat2::J())) < 1e-9);
    CHECK(fit_gauss_correspondence(generic).residual > 1e-3);
}

TEST_CASE("pullback metrics") {
    const Mat2 g{2.0, 0.3, 0.3, 1.0};
    const Surface flat = surface_data(g, 0.0);
    const PullbackMetrics p0 = pullback_metrics(flat.g, flat.J, flat.A);
    CHECK(max_abs_diff(p0.left, g) < 1e-12);
    CHECK(max_abs_diff(p0.right, g) < 1e-12);
    CHECK_FALSE(p0.degenerate);

    for (double lambda : {0.1, 0.5, 0.9, 0.999}) {
        const Surface s = surface_data(g, lambda);
        const PullbackMetrics p = pullback_metrics(s.g, s.J, s.A);
        CHECK(p.lambda == doctest::Approx(lambda).epsilon(1e-12));
        CHECK((s.A + s.J).det() == doctest::Approx(1.0 - lambda * lambda).epsilon(1e-12));
        CHECK((s.A - s.J).det() == doctest::Approx(1.0 - lambda * lambda).epsilon(1e-12));
        const double expected = g.det() * std::pow(1.0 - lambda * lambda, 2);
        CHECK(p.left.det() == doctest::Approx(expected).epsilon(1e-10));
        CHECK(p.right.det() == doctest::Approx(expected).epsilon(1e-10));
        CHECK(p.left.a > 0.0);
        CHECK(p.right.a > 0.0);
        CHECK_FALSE(p.degenerate);
    }

    // At lambda = 1 the null direction of g_l solves A v = -J v, the +1 eigenvector of J A.
    const Surface s = surface_data(g, 1.0);
    const PullbackMetrics p = pullback_metrics(s.g, s.J, s.A);
    CHECK(p.degenerate);
    const Mat2 ja = s.J * s.A;
    // J A is an involution here; (Id + J A) / 2 projects onto its +1 eigenspace.
    const Mat2 proj = 0.5 * (Mat2::identity() + ja);
    const double v1 = proj.a + proj.b, v2 = proj.c + proj.d;
    CHECK(std::abs(ja.a * v1 + ja.b * v2 - v1) < 1e-12);
    const double q = p.left.a * v1 * v1 + 2.0 * p.left.b * v1 * v2 + p.left.d * v2 * v2;
    CHECK(std::abs(q) < 1e-12);
    const Mat2 other = 0.5 * (Mat2::identity() - ja);
    const double w1 = other.a + other.b, w2 = other.c + other.d;
    CHECK(p.left.a * w1 * w1 + 2.0 * p.left.b * w1 * w2 + p.left.d * w2 * w2 > 0.1);

    const Surface bad = surface_data(g, 1.2);
    CHECK_THROWS_AS(pullback_metrics(bad.g, bad.J, bad.A), Error);
    CHECK_THROWS_AS(pullback_metrics(g, Mat2::J(), flat.A), Error);
    CHECK_THROWS_AS(pullback_metrics(flat.g, flat.J, Mat2{0.5, 0.0, 0.0, 0.5}), Error);
}

TEST_CASE("lambda-mu dictionary") {
    CHECK(mu_from_lambda(0.0) == 0.0);
    CHECK(mu_tilde_sq(0.0) == 0.0);
    CHECK(mu_from_lambda(1.0) == 1.0);
    CHECK(mu_tilde_sq(1.0) == 0.0);
    CHECK(mu_from_lambda(0.5) == doctest::Approx(16.0 / 25.0).epsilon(1e-15));
    CHECK(mu_tilde_sq(0.5) == doctest::Approx(12.0 / 25.0).epsilon(1e-15));
    CHECK(lambda_from_mu(1.0) == 1.0);
    CHECK(lambda_from_mu(16.0 / 25.0) == doctest::Approx(0.5).epsilon(1e-15));

    double previous = -1.0;
    for (int i = 0; i <= 10000; ++i) {
        const double lambda = (1.0 - 1e-6) * i / 10000;
        const double mu = mu_from_lambda(lambda);
        CHECK(mu > previous);
        previous = mu;
        CHECK(std::abs(lambda_from_mu(mu) - lambda) < 1e-10);
        const double tilde = mu_tilde_sq(lambda);
        CHECK(tilde == doctest::Approx(mu * (1.0 - lambda * lambda)).epsilon(1e-13));
        if (lambda > 0.0) CHECK(tilde < mu);
    }
    for (double bad : {-0.1, 1.1}) {
        CHECK_THROWS_AS(mu_from_lambda(bad), Error);
        CHECK_THROWS_AS(mu_tilde_sq(bad), Error);
        CHECK_THROWS_AS(lambda_from_mu(bad), Error);
    }
}

TEST_CASE("curvature densities and their integrals") {
    const CurvatureDensities d = curvature_densities(0.5);
    CHECK(d.shape_sq == 0.5);
    CHECK(d.K_int == -0.75);
    const DensityIntegrals zero = integrate_densities(std::vector<double>(7, 0.0), std::vector<double>(7, 0.5));
    CHECK(zero.renormalized_area == 0.0);
    CHECK(zero.total_curvature == doctest::Approx(-3.5));
    CHECK(zero.area == doctest::Approx(3.5));
    const DensityIntegrals c = integrate_densities(std::vector<double>(4, 0.3), std::vector<double>(4, 0.25));
    CHECK(c.renormalized_area == doctest::Approx(2 * 0.09));
    CHECK(c.total_curvature == doctest::Approx(0.09 - 1.0));
    CHECK_THROWS_AS(integrate_densities({0.1}, {}), Error);
    CHECK_THROWS_AS(curvature_densities(1.5), Error);

    const std::vector<DictionaryRow> rows = dictionary_table(5);
    REQUIRE(rows.size() == 5);
    CHECK(rows[2].lambda == 0.5);
    CHECK(rows[2].mu_sq == doctest::Approx(0.64));
    CHECK(rows[4].lambda == 1.0);
    CHECK(rows[4].K_int == 0.0);
}
