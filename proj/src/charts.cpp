#include "wpdiag/charts.hpp"

#include <cmath>
#include <limits>

#include "wpdiag/errors.hpp"

namespace wpdiag {

namespace {

constexpr double kChartEps = 1e-14;

double checked_tan(double x) {
    const double c = std::cos(x);
    if (std::abs(c) < kChartEps) throw Error(ErrorCode::ChartSingularity, "tangent chart undefined at pi/2");
    return std::sin(x) / c;
}

}  // namespace

double reduce_mod_pi(double x) {
    double r = std::fmod(x, kPi);
    if (r < 0.0) r += kPi;
    if (r >= kPi) r -= kPi;
    return r;
}

RP1Point::RP1Point(double angle) : angle_(reduce_mod_pi(angle)) {}

double klein_norm(const KleinPoint& y) { return y.y1 * y.y1 + y.y2 * y.y2 - y.y3 * y.y3; }

double quotient_affine(const RP1Point& x) {
    const double c = std::cos(x.angle());
    if (std::abs(c) < kChartEps) return std::numeric_limits<double>::infinity();
    return std::sin(x.angle()) / c;
}

RP1Point affine_quotient(double t) {
    if (std::isinf(t)) return RP1Point(0.5 * kPi);
    return RP1Point(std::atan(t));
}

Mat2 matrix_angle(double x1, double x2) {
    const double c1 = std::cos(x1), s1 = std::sin(x1), c2 = std::cos(x2), s2 = std::sin(x2);
    return {c1 * c2, c1 * s2, s1 * c2, s1 * s2};
}

std::pair<double, double> reduce_fundamental(double x1, double x2) { return {reduce_mod_pi(x1), reduce_mod_pi(x2)}; }

MatVector22 ein_null_vector(double x1, double x2) { return quad_unembed(matrix_angle(x1, x2)); }

std::pair<double, double> penrose_rot(double x1, double x2) { return {checked_tan(x1), checked_tan(x2)}; }

std::pair<double, double> penrose_mat(double x1, double x2) {
    const double t1 = checked_tan(x1), t2 = checked_tan(x2);
    return {0.5 * (t1 + t2), 0.5 * (-t1 + t2)};
}

KleinPoint kleinian(const MatVector22& x) {
    if (std::abs(x.x4) < kChartEps) throw Error(ErrorCode::OnExcludedPlane, "x4 vanishes");
    return {x.x1 / x.x4, x.x2 / x.x4, x.x3 / x.x4};
}

MatVector22 kleinian_inverse(const KleinPoint& y) {
    const double gap = 1.0 - klein_norm(y);
    if (!(gap > 0.0)) throw Error(ErrorCode::OutsideKleinDomain, "point not in the Kleinian domain");
    const double s = 1.0 / std::sqrt(gap);
    return {s * y.y1, s * y.y2, s * y.y3, s};
}

KleinPoint kleinian_centered(const MatVector22& x) {
    if (std::abs(x.x3) < kChartEps) throw Error(ErrorCode::OnExcludedPlane, "x3 vanishes");
    return {x.x1 / x.x3, x.x2 / x.x3, x.x4 / x.x3};
}

MatVector22 kleinian_centered_inverse(const KleinPoint& y) {
    const double gap = 1.0 - klein_norm(y);
    if (!(gap > 0.0)) throw Error(ErrorCode::OutsideKleinDomain, "point not in the Kleinian domain");
    const double s = 1.0 / std::sqrt(gap);
    return {s * y.y1, s * y.y2, s, s * y.y3};
}

const char* to_string(CausalType type) {
    switch (type) {
    case CausalType::spacelike: return "spacelike";
    case CausalType::timelike: return "timelike";
    case CausalType::lightlike: return "lightlike";
    }
    return "unknown";
}

CausalType causal_type(double dx1, double dx2) {
    if (dx1 == 0.0 && dx2 == 0.0) throw Error(ErrorCode::ZeroVector, "tangent vector is zero");
    const double q = dx1 * dx2;
    if (q > 0.0) return CausalType::spacelike;
    if (q < 0.0) return CausalType::timelike;
    return CausalType::lightlike;
}

AcausalCircle acausal_circle_of(const MobiusMap& f) {
    if (f.c() == 0.0) return CurveLine{f.a() / f.d(), f.b() / f.d()};
    // a/c - 1 / (c (c t + d)) = P / (Q - t) - R.
    return CurveHyperbola{1.0 / (f.c() * f.c()), -f.d() / f.c(), -f.a() / f.c()};
}

}  // namespace wpdiag
