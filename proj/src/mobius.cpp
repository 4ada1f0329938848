#include "wpdiag/mobius.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wpdiag/errors.hpp"

namespace wpdiag {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double reduce_angle(double x) {
    double r = std::fmod(x, kPi);
    if (r < 0.0) r += kPi;
    if (r >= kPi) r -= kPi;
    return r;
}

double line_angle(const Mat2& m, double x) {
    const double c = std::cos(x), s = std::sin(x);
    return reduce_angle(std::atan2(m.c * c + m.d * s, m.a * c + m.b * s));
}

// Minimum of cos over [lo, hi].
// 1 + cos t = 2 cos^2(t / 2), without cancellation near t = pi.
double one_plus_cos(double t) {
    const double c = std::cos(0.5 * t);
    return 2.0 * c * c;
}

double min_one_plus_cos_on(double lo, double hi) {
    if (hi - lo >= 2.0 * kPi) return 0.0;
    const double k = std::ceil((lo - kPi) / (2.0 * kPi));
    if (kPi + 2.0 * k * kPi <= hi) return 0.0;
    return std::min(one_plus_cos(lo), one_plus_cos(hi));
}

}  // namespace

Mat2 Mat2::inverse() const {
    const double det_value = det();
    return {d / det_value, -b / det_value, -c / det_value, a / det_value};
}

Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

Mat2 operator+(const Mat2& x, const Mat2& y) { return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d}; }

Mat2 operator-(const Mat2& x, const Mat2& y) { return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d}; }

Mat2 operator*(double s, const Mat2& x) { return {s * x.a, s * x.b, s * x.c, s * x.d}; }

double max_abs_diff(const Mat2& x, const Mat2& y) {
    return std::max({std::abs(x.a - y.a), std::abs(x.b - y.b), std::abs(x.c - y.c), std::abs(x.d - y.d)});
}

double inner22(const MatVector22& x, const MatVector22& y) {
    return x.x1 * y.x1 + x.x2 * y.x2 - x.x3 * y.x3 - x.x4 * y.x4;
}

double mat_inner(const Mat2& m, const Mat2& n) {
    const Mat2 j = Mat2::J();
    return 0.5 * (m * j * n.transpose() * j).trace();
}

Mat2 quad_embed(const MatVector22& x) {
    return {x.x3 - x.x1, x.x2 - x.x4, x.x2 + x.x4, x.x3 + x.x1};
}

MatVector22 quad_unembed(const Mat2& m) {
    return {0.5 * (m.d - m.a), 0.5 * (m.b + m.c), 0.5 * (m.a + m.d), 0.5 * (m.c - m.b)};
}

Mat2 isom_action(const Mat2& m, const Mat2& n, const Mat2& a) { return m * a * n.inverse(); }

std::pair<double, double> ein_action(const Mat2& m, const Mat2& n, std::pair<double, double> lines) {
    return {line_angle(m, lines.first), line_angle(n.transpose(), lines.second)};
}

MobiusMap MobiusMap::from_coefficients(double a, double b, double c, double d) {
    const double det_value = a * d - b * c;
    if (!(det_value > 0.0) || !std::isfinite(det_value)) {
        throw Error(ErrorCode::InvalidMap, "determinant must be positive and finite");
    }
    const double s = 1.0 / std::sqrt(det_value);
    a *= s;
    b *= s;
    c *= s;
    d *= s;
    const double lead = a != 0.0 ? a : (b != 0.0 ? b : c);
    if (lead < 0.0) {
        a = -a;
        b = -b;
        c = -c;
        d = -d;
    }
    return MobiusMap(a, b, c, d);
}

MobiusMap MobiusMap::rotation(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return from_coefficients(c, s, -s, c);
}

MobiusMap MobiusMap::scaling(double s) {
    if (!(s > 0.0)) throw Error(ErrorCode::InvalidMap, "scaling factor must be positive");
    return from_coefficients(s, 0.0, 0.0, 1.0);
}

MobiusMap MobiusMap::translation(double s) { return from_coefficients(1.0, s, 0.0, 1.0); }

MobiusMap MobiusMap::hyperbola(double p, double q, double r) {
    if (!(p > 0.0)) throw Error(ErrorCode::InvalidMap, "hyperbola requires P > 0");
    // (P - R (Q - t)) / (Q - t) = (R t + P - R Q) / (-t + Q).
    return from_coefficients(r, p - r * q, -1.0, q);
}

double MobiusMap::apply_affine(double t) const {
    if (std::isinf(t)) return c_ == 0.0 ? kInf : a_ / c_;
    const double den = c_ * t + d_;
    if (den == 0.0) return kInf;
    return (a_ * t + b_) / den;
}

MobiusMap MobiusMap::inverse() const { return from_coefficients(d_, -b_, -c_, a_); }

MobiusMap operator*(const MobiusMap& f, const MobiusMap& g) {
    const Mat2 m = f.matrix() * g.matrix();
    return MobiusMap::from_coefficients(m.a, m.b, m.c, m.d);
}

double max_abs_diff(const MobiusMap& f, const MobiusMap& g) { return max_abs_diff(f.matrix(), g.matrix()); }

const char* to_string(MobiusKind kind) {
    switch (kind) {
    case MobiusKind::identity: return "identity";
    case MobiusKind::elliptic: return "elliptic";
    case MobiusKind::parabolic: return "parabolic";
    case MobiusKind::hyperbolic: return "hyperbolic";
    }
    return "unknown";
}

MobiusKind mobius_classify(const MobiusMap& m) {
    if (max_abs_diff(m, MobiusMap{}) <= 1e-12) return MobiusKind::identity;
    const double excess = std::abs(m.a() + m.d()) - 2.0;
    if (std::abs(excess) <= 1e-10) return MobiusKind::parabolic;
    return excess < 0.0 ? MobiusKind::elliptic : MobiusKind::hyperbolic;
}

Jet2 affine_jet(const MobiusMap& m, double t) {
    const double den = m.c() * t + m.d();
    if (std::abs(den) < 1e-14) throw Error(ErrorCode::PoleAtBasepoint, "affine chart singular at basepoint");
    const double inv = 1.0 / den;
    // det = 1: f' = 1 / den^2, f'' = -2c / den^3.
    return {(m.a() * t + m.b()) * inv, inv * inv, -2.0 * m.c() * inv * inv * inv};
}

Jet2 jet_at_zero(const MobiusMap& m) { return affine_jet(m, 0.0); }

double dist_to_identity_estimate(const MobiusMap& m) {
    const Jet2 j = jet_at_zero(m);
    return std::abs(j.value) + std::abs(j.first - 1.0) + std::abs(j.second);
}

PheFactors phe_factors(double lo, double hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || hi - lo < 1e-14) {
        throw Error(ErrorCode::DegenerateInterval, "phe_factors needs a finite interval with hi > lo");
    }
    const double lambda = hi - lo;
    const double mid = 0.5 * (lo + hi);
    return {MobiusMap::translation(-2.0 * mid / lambda), MobiusMap::scaling(2.0 / lambda)};
}

MobiusMap mobius_from_affine_jet(double t0, const Jet2& jet) {
    if (!(jet.first > 0.0)) throw Error(ErrorCode::InvalidMap, "jet slope must be positive");
    // h(s) = y0 + y1 s / (1 - k s), k = y2 / (2 y1), s = t - t0.
    const double k = jet.second / (2.0 * jet.first);
    const MobiusMap h = MobiusMap::from_coefficients(jet.first - jet.value * k, jet.value, -k, 1.0);
    return h * MobiusMap::translation(-t0);
}

LiftedMobius::LiftedMobius(const MobiusMap& m, int sheet) : map_(m), line_(m.line_matrix()), sheet_(sheet) {
    double t = std::atan2(line_.c, line_.a);
    t = reduce_angle(t + 0.5 * kPi) - 0.5 * kPi;
    theta0_ = t;
    const Mat2 s = line_.transpose() * line_;
    const double half_diff = 0.5 * (s.a - s.d);
    mean_ = 0.5 * (s.a + s.d);
    amp_ = std::hypot(half_diff, s.b);
    phase_ = std::atan2(s.b, half_diff);
}

LiftedMobius LiftedMobius::anchored(const MobiusMap& m, double x, double target) {
    const LiftedMobius base(m, 0);
    const int sheet = static_cast<int>(std::lround((target - base(x)) / kPi));
    return LiftedMobius(m, sheet);
}

LiftedMobius LiftedMobius::from_lift_jet(double x, double y0, double y1, double y2) {
    const MobiusMap h = mobius_from_affine_jet(0.0, {0.0, y1, y2});
    const MobiusMap m = MobiusMap::rotation(y0) * h * MobiusMap::rotation(-x);
    return anchored(m, x, y0);
}

double LiftedMobius::canonical(double x) const {
    const double n = std::floor(x / kPi);
    const double r = x - n * kPi;
    const double c = std::cos(r), s = std::sin(r);
    const double vx = line_.a * c + line_.b * s;
    const double vy = line_.c * c + line_.d * s;
    // Increment from the image of angle 0 lies in [0, pi).
    const double cross = line_.a * vy - line_.c * vx;
    const double dot = line_.a * vx + line_.c * vy;
    double inc = std::atan2(cross, dot);
    if (inc < -0.5 * kPi) inc += 2.0 * kPi;
    return theta0_ + inc + n * kPi;
}

double LiftedMobius::operator()(double x) const { return canonical(x) + sheet_ * kPi; }

// mean + amp cos t = 1 / (mean + amp) + amp (1 + cos t), since mean^2 - amp^2 = 1.
double LiftedMobius::derivative(double x) const {
    return 1.0 / (1.0 / (mean_ + amp_) + amp_ * one_plus_cos(2.0 * x - phase_));
}

double LiftedMobius::second_derivative(double x) const {
    const double d = derivative(x);
    return 2.0 * amp_ * std::sin(2.0 * x - phase_) * d * d;
}

double LiftedMobius::max_derivative_on(double u, double v) const {
    return 1.0 / (1.0 / (mean_ + amp_) + amp_ * min_one_plus_cos_on(2.0 * u - phase_, 2.0 * v - phase_));
}

double LiftedMobius::max_derivative() const { return mean_ + amp_; }

// f'' = 2 amp sin(2y - phase) f'^2.
double LiftedMobius::max_second_derivative_on(double u, double v) const {
    const double d = max_derivative_on(u, v);
    return 2.0 * std::abs(amp_) * d * d;
}

LiftedMobius LiftedMobius::inverse() const {
    const double x0 = (*this)(0.0);
    return anchored(map_.inverse(), x0, 0.0);
}

LiftedMobius compose(const LiftedMobius& f, const LiftedMobius& g) {
    return LiftedMobius::anchored(f.map() * g.map(), 0.0, f(g(0.0)));
}

double mobius_apply(const MobiusMap& m, double x) { return LiftedMobius(m)(x); }

}  // namespace wpdiag
