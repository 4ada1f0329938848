#pragma once

#include <numbers>
#include <utility>

namespace wpdiag {

inline constexpr double kPi = std::numbers::pi;

// Row-major 2x2 matrix ((a, b), (c, d)).
struct Mat2 {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    // Complex structure ((0, -1), (1, 0)).
    static constexpr Mat2 J() { return {0.0, -1.0, 1.0, 0.0}; }

    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }
    Mat2 transpose() const { return {a, c, b, d}; }
    Mat2 inverse() const;
};

Mat2 operator*(const Mat2& x, const Mat2& y);
Mat2 operator+(const Mat2& x, const Mat2& y);
Mat2 operator-(const Mat2& x, const Mat2& y);
Mat2 operator*(double s, const Mat2& x);
double max_abs_diff(const Mat2& x, const Mat2& y);

// Point of R^{2,2} with signature (+, +, -, -).
struct MatVector22 {
    double x1 = 0.0, x2 = 0.0, x3 = 0.0, x4 = 0.0;
};

double inner22(const MatVector22& x, const MatVector22& y);

// Half trace of M J N^t J; det M = -<M, M>.
double mat_inner(const Mat2& m, const Mat2& n);
// ((x3 - x1, x2 - x4), (x2 + x4, x3 + x1)); an isometry onto (Mat2, mat_inner).
Mat2 quad_embed(const MatVector22& x);
MatVector22 quad_unembed(const Mat2& m);

// M A N^{-1}.
Mat2 isom_action(const Mat2& m, const Mat2& n, const Mat2& a);
// Lines given by angles mod pi; M acts on the first line, N^t on the second.
// Results are reduced to [0, pi).
std::pair<double, double> ein_action(const Mat2& m, const Mat2& n, std::pair<double, double> lines);

// Fractional linear map t -> (a t + b) / (c t + d) on the affine chart.
// Stored with ad - bc = 1 and the first nonzero coefficient positive.
class MobiusMap {
public:
    MobiusMap() = default;

    // Throws InvalidMap unless ad - bc > 0.
    static MobiusMap from_coefficients(double a, double b, double c, double d);
    // Lift x -> x + angle in the angle model.
    static MobiusMap rotation(double angle);
    // t -> s t, s > 0.
    static MobiusMap scaling(double s);
    // t -> t + s.
    static MobiusMap translation(double s);
    // t -> P / (Q - t) - R, P > 0.
    static MobiusMap hyperbola(double p, double q, double r);

    double a() const { return a_; }
    double b() const { return b_; }
    double c() const { return c_; }
    double d() const { return d_; }

    Mat2 matrix() const { return {a_, b_, c_, d_}; }
    // Linear action on (cos x, sin x); equals ((d, c), (b, a)).
    Mat2 line_matrix() const { return {d_, c_, b_, a_}; }

    // Affine-chart evaluation; infinity is the point at infinity.
    double apply_affine(double t) const;
    MobiusMap inverse() const;

    friend MobiusMap operator*(const MobiusMap& f, const MobiusMap& g);

private:
    MobiusMap(double a, double b, double c, double d) : a_(a), b_(b), c_(c), d_(d) {}

    double a_ = 1.0, b_ = 0.0, c_ = 0.0, d_ = 1.0;
};

double max_abs_diff(const MobiusMap& f, const MobiusMap& g);

enum class MobiusKind { identity, elliptic, parabolic, hyperbolic };
const char* to_string(MobiusKind kind);
MobiusKind mobius_classify(const MobiusMap& m);

struct Jet2 {
    double value = 0.0, first = 0.0, second = 0.0;
};

// Affine-chart jet at t; throws PoleAtBasepoint near the pole.
Jet2 affine_jet(const MobiusMap& m, double t);
Jet2 jet_at_zero(const MobiusMap& m);
// |h(0)| + |h'(0) - 1| + |h''(0)|.
double dist_to_identity_estimate(const MobiusMap& m);

struct PheFactors {
    MobiusMap P;
    MobiusMap H;
};

// H t = 2t / (hi - lo), P t = t - (hi + lo) / (hi - lo); (P H)[lo, hi] = [-1, 1].
PheFactors phe_factors(double lo, double hi);

// Affine map with prescribed jet (value, first, second) at t0; first > 0.
MobiusMap mobius_from_affine_jet(double t0, const Jet2& jet);

// Continuous lift of a Moebius map to R, f(x + pi) = f(x) + pi.
class LiftedMobius {
public:
    LiftedMobius() : LiftedMobius(MobiusMap{}) {}
    // Sheet chosen so that the value at 0 lies in [-pi/2, pi/2).
    explicit LiftedMobius(const MobiusMap& m, int sheet = 0);

    // Sheet chosen so that the value at x is within pi/2 of target.
    static LiftedMobius anchored(const MobiusMap& m, double x, double target);
    // Unique lifted map with value y0, slope y1 > 0 and second derivative y2 at x.
    static LiftedMobius from_lift_jet(double x, double y0, double y1, double y2);

    const MobiusMap& map() const { return map_; }
    int sheet() const { return sheet_; }

    double operator()(double x) const;
    double derivative(double x) const;
    double second_derivative(double x) const;
    // Supremum of the derivative over [u, v].
    double max_derivative_on(double u, double v) const;
    double max_derivative() const;
    // Supremum of |second derivative| over [u, v].
    double max_second_derivative_on(double u, double v) const;

    LiftedMobius inverse() const;
    // Lift of f o g that agrees with the composition of the lifts.
    friend LiftedMobius compose(const LiftedMobius& f, const LiftedMobius& g);

private:
    double canonical(double x) const;

    MobiusMap map_;
    Mat2 line_;
    double theta0_ = 0.0;
    int sheet_ = 0;
    // |L u(y)|^2 = mean + amp cos(2y - phase).
    double mean_ = 1.0, amp_ = 0.0, phase_ = 0.0;
};

LiftedMobius compose(const LiftedMobius& f, const LiftedMobius& g);

// Canonical lift evaluation.
double mobius_apply(const MobiusMap& m, double x);

}  // namespace wpdiag
