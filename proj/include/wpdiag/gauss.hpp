#pragma once

#include <optional>
#include <vector>

#include "wpdiag/mobius.hpp"

namespace wpdiag {

// Point M of AdS (det M = 1) with unit timelike normal N: <N, N> = -1, <M, N> = 0 for mat_inner.
struct SpacelikeFrame {
    Mat2 M, N;
};

// Throws FrameInvalid unless both conditions hold to 1e-10.
SpacelikeFrame make_frame(const Mat2& m, const Mat2& n);
void validate_frame(const SpacelikeFrame& frame);

// (cos t M + sin t N, -sin t M + cos t N).
SpacelikeFrame geodesic_flow(const SpacelikeFrame& frame, double t);
// Image of (Id, J) under X -> A X B^{-1} with B = J^{-1} A J, which preserves the plane J^perp.
SpacelikeFrame totally_geodesic_frame(const Mat2& a);

// X^2 = -Id has two components, told apart by the sign of the lower-left entry; J has +1.
bool in_upper_component(const Mat2& x);

struct GaussMaps {
    Mat2 left, right;
    bool left_upper = true, right_upper = true;
};

// (M^{-1} N, N M^{-1}).
GaussMaps gauss_maps(const SpacelikeFrame& frame);

struct GaussCorrespondence {
    // Phi with det 1 and Phi G_l Phi^{-1} = G_r, fitted by least squares over the frames.
    Mat2 phi;
    // Largest |Phi G_l Phi^{-1} - G_r| entry.
    double residual = 0.0;
    // False when the fitted conjugator has nonpositive determinant.
    bool orientation_preserving = true;
};

GaussCorrespondence fit_gauss_correspondence(const std::vector<SpacelikeFrame>& frames);

struct ShapeData {
    double lambda = 0.0;
    std::optional<Mat2> A;
};

// Shape operator diag(lambda, -lambda) in an orthonormal frame; throws OutOfRange outside [0, 1].
ShapeData diagonal_shape(double lambda);

struct PullbackMetrics {
    // g((A + J) ., (A + J) .) and g((A - J) ., (A - J) .) as Gram matrices.
    Mat2 left, right;
    double lambda = 0.0;
    // Set when lambda reaches 1 and the metrics acquire a null direction.
    bool degenerate = false;
};

// g symmetric positive definite, J^2 = -Id with J^t g J = g, A g-self-adjoint and trace-free.
// Throws FrameInvalid for malformed input and OutOfRange when lambda > 1.
PullbackMetrics pullback_metrics(const Mat2& g, const Mat2& J, const Mat2& A);

// 4 lambda^2 / (1 + lambda^2)^2.
double mu_from_lambda(double lambda);
// 4 lambda^2 (1 - lambda^2) / (1 + lambda^2)^2.
double mu_tilde_sq(double lambda);
// Inverse of mu_from_lambda on [0, 1].
double lambda_from_mu(double mu_sq);

struct CurvatureDensities {
    // |A|^2 = 2 lambda^2 for eigenvalues +-lambda.
    double shape_sq = 0.0;
    // lambda^2 - 1.
    double K_int = 0.0;
};

CurvatureDensities curvature_densities(double lambda);

struct DensityIntegrals {
    double renormalized_area = 0.0;
    double total_curvature = 0.0;
    double area = 0.0;
};

// Quadrature of the densities of a sampled lambda-field with the given area weights.
DensityIntegrals integrate_densities(const std::vector<double>& lambdas, const std::vector<double>& weights);

struct DictionaryRow {
    double lambda = 0.0, mu_sq = 0.0, mu_tilde_sq = 0.0, shape_sq = 0.0, K_int = 0.0;
};

// Rows at lambda = i / (n - 1), i = 0..n-1.
std::vector<DictionaryRow> dictionary_table(int n);

}  // namespace wpdiag
