#include "wpdiag/gauss.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "wpdiag/errors.hpp"

namespace wpdiag {

namespace {

constexpr double kTol = 1e-10;

double frobenius(const Mat2& m) { return std::sqrt(m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d); }

double max_entry(const Mat2& m) { return std::max({std::abs(m.a), std::abs(m.b), std::abs(m.c), std::abs(m.d)}); }

void check_unit(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error(ErrorCode::OutOfRange, "value must lie in [0, 1]");
}

using Sym4 = std::array<std::array<double, 4>, 4>;

// Cyclic Jacobi rotations; returns the eigenvector of the smallest eigenvalue.
std::array<double, 4> smallest_eigenvector(Sym4 a) {
    Sym4 v{};
    for (int i = 0; i < 4; ++i) v[i][i] = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0, diag = 0.0;
        for (int i = 0; i < 4; ++i) {
            diag += a[i][i] * a[i][i];
            for (int j = i + 1; j < 4; ++j) off += a[i][j] * a[i][j];
        }
        if (off <= 1e-32 * diag) break;
        for (int p = 0; p < 4; ++p) {
            for (int q = p + 1; q < 4; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < 4; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < 4; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (int k = 0; k < 4; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    int best = 0;
    for (int i = 1; i < 4; ++i) {
        if (a[i][i] < a[best][best]) best = i;
    }
    return {v[0][best], v[1][best], v[2][best], v[3][best]};
}

}  // namespace

void validate_frame(const SpacelikeFrame& f) {
    // Tolerances scale with the entries so that far-out frames are judged by relative roundoff.
    const double sm = std::max(1.0, frobenius(f.M)), sn = std::max(1.0, frobenius(f.N));
    if (std::abs(f.M.det() - 1.0) > kTol * sm * sm) throw Error(ErrorCode::FrameInvalid, "det M must be 1");
    if (std::abs(mat_inner(f.N, f.N) + 1.0) > kTol * sn * sn) throw Error(ErrorCode::FrameInvalid, "<N, N> must be -1");
    if (std::abs(mat_inner(f.M, f.N)) > kTol * sm * sn) throw Error(ErrorCode::FrameInvalid, "<M, N> must vanish");
}

SpacelikeFrame make_frame(const Mat2& m, const Mat2& n) {
    const SpacelikeFrame f{m, n};
    validate_frame(f);
    return f;
}

SpacelikeFrame geodesic_flow(const SpacelikeFrame& f, double t) {
    const double c = std::cos(t), s = std::sin(t);
    return {c * f.M + s * f.N, (-s) * f.M + c * f.N};
}

SpacelikeFrame totally_geodesic_frame(const Mat2& a) {
    if (!(a.det() > 0.0)) throw Error(ErrorCode::InvalidMap, "isometry factor needs positive determinant");
    const Mat2 u = (1.0 / std::sqrt(a.det())) * a;
    const Mat2 j = Mat2::J();
    const Mat2 b_inv = (j.inverse() * u * j).inverse();
    return {u * b_inv, u * j * b_inv};
}

bool in_upper_component(const Mat2& x) { return x.c > 0.0; }

GaussMaps gauss_maps(const SpacelikeFrame& frame) {
    validate_frame(frame);
    const Mat2 m_inv = frame.M.inverse();
    GaussMaps g;
    g.left = m_inv * frame.N;
    g.right = frame.N * m_inv;
    g.left_upper = in_upper_component(g.left);
    g.right_upper = in_upper_component(g.right);
    return g;
}

GaussCorrespondence fit_gauss_correspondence(const std::vector<SpacelikeFrame>& frames) {
    if (frames.empty()) throw Error(ErrorCode::InvalidConfig, "no frames to fit");
    std::vector<GaussMaps> maps;
    maps.reserve(frames.size());
    for (const SpacelikeFrame& f : frames) maps.push_back(gauss_maps(f));
    // Phi G_l - G_r Phi = 0 is linear in Phi = ((p, q), (r, s)).
    Sym4 normal{};
    for (const GaussMaps& g : maps) {
        const Mat2& x = g.left;
        const Mat2& y = g.right;
        const std::array<std::array<double, 4>, 4> rows{{{x.a - y.a, x.c, -y.b, 0.0},
                                                         {x.b, x.d - y.a, 0.0, -y.b},
                                                         {-y.c, 0.0, x.a - y.d, x.c},
                                                         {0.0, -y.c, x.b, x.d - y.d}}};
        for (const auto& row : rows) {
            for (int i = 0; i < 4; ++i) {
                for (int j = 0; j < 4; ++j) normal[i][j] += row[i] * row[j];
            }
        }
    }
    const std::array<double, 4> v = smallest_eigenvector(normal);
    GaussCorrespondence out;
    Mat2 phi{v[0], v[1], v[2], v[3]};
    const double det = phi.det();
    out.orientation_preserving = det > 0.0;
    phi = (1.0 / std::sqrt(std::abs(det))) * phi;
    if (phi.a < 0.0 || (phi.a == 0.0 && phi.b < 0.0)) phi = (-1.0) * phi;
    out.phi = phi;
    const Mat2 phi_inv = phi.inverse();
    for (const GaussMaps& g : maps) out.residual = std::max(out.residual, max_abs_diff(phi * g.left * phi_inv, g.right));
    return out;
}

ShapeData diagonal_shape(double lambda) {
    check_unit(lambda);
    return {lambda, Mat2{lambda, 0.0, 0.0, -lambda}};
}

PullbackMetrics pullback_metrics(const Mat2& g, const Mat2& J, const Mat2& A) {
    const double sg = std::max(1.0, max_entry(g));
    if (std::abs(g.b - g.c) > kTol * sg || !(g.a > 0.0) || !(g.det() > 0.0)) {
        throw Error(ErrorCode::FrameInvalid, "metric must be symmetric positive definite");
    }
    const double sj = std::max(1.0, max_entry(J));
    if (max_abs_diff(J * J, (-1.0) * Mat2::identity()) > kTol * sj * sj) {
        throw Error(ErrorCode::FrameInvalid, "complex structure must square to -Id");
    }
    if (max_abs_diff(J.transpose() * g * J, g) > kTol * sg * sj * sj) {
        throw Error(ErrorCode::FrameInvalid, "complex structure must preserve the metric");
    }
    const Mat2 ga = g * A;
    const double sa = std::max(1.0, max_entry(A));
    if (std::abs(ga.b - ga.c) > kTol * sg * sa || std::abs(A.trace()) > kTol * sa) {
        throw Error(ErrorCode::FrameInvalid, "shape operator must be self-adjoint and trace-free");
    }
    PullbackMetrics out;
    // Eigenvalues of a trace-free self-adjoint operator are +-sqrt(-det A).
    out.lambda = std::sqrt(std::max(0.0, -A.det()));
    if (out.lambda > 1.0 + kTol) throw Error(ErrorCode::OutOfRange, "lambda exceeds 1");
    const Mat2 plus = A + J, minus = A - J;
    out.left = plus.transpose() * g * plus;
    out.right = minus.transpose() * g * minus;
    out.degenerate = out.lambda >= 1.0 - kTol;
    return out;
}

double mu_from_lambda(double lambda) {
    check_unit(lambda);
    const double s = lambda * lambda;
    return 4.0 * s / ((1.0 + s) * (1.0 + s));
}

double mu_tilde_sq(double lambda) {
    check_unit(lambda);
    const double s = lambda * lambda;
    return 4.0 * s * (1.0 - s) / ((1.0 + s) * (1.0 + s));
}

double lambda_from_mu(double mu_sq) {
    check_unit(mu_sq);
    // Smaller root of mu s^2 + (2 mu - 4) s + mu = 0 in s = lambda^2, written without cancellation.
    const double s = mu_sq / ((2.0 - mu_sq) + 2.0 * std::sqrt(1.0 - mu_sq));
    return std::sqrt(s);
}

CurvatureDensities curvature_densities(double lambda) {
    check_unit(lambda);
    return {2.0 * lambda * lambda, lambda * lambda - 1.0};
}

DensityIntegrals integrate_densities(const std::vector<double>& lambdas, const std::vector<double>& weights) {
    if (lambdas.size() != weights.size()) throw Error(ErrorCode::InvalidConfig, "one weight per sample");
    DensityIntegrals out;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const CurvatureDensities d = curvature_densities(lambdas[i]);
        out.renormalized_area += weights[i] * d.shape_sq;
        out.total_curvature += weights[i] * d.K_int;
        out.area += weights[i];
    }
    return out;
}

std::vector<DictionaryRow> dictionary_table(int n) {
    if (n < 2) throw Error(ErrorCode::InvalidConfig, "dictionary table needs at least two rows");
    std::vector<DictionaryRow> rows;
    rows.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double lambda = i == n - 1 ? 1.0 : static_cast<double>(i) / (n - 1);
        const CurvatureDensities d = curvature_densities(lambda);
        rows.push_back({lambda, mu_from_lambda(lambda), mu_tilde_sq(lambda), d.shape_sq, d.K_int});
    }
    return rows;
}

}  // namespace wpdiag
