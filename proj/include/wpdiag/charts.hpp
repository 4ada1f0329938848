#pragma once

#include <utility>
#include <variant>

#include "wpdiag/mobius.hpp"

namespace wpdiag {

// Point of RP^1 = R / pi Z, stored in [0, pi).
class RP1Point {
public:
    RP1Point() = default;
    explicit RP1Point(double angle);

    double angle() const { return angle_; }

private:
    double angle_ = 0.0;
};

// Representative of x mod pi in [0, pi).
double reduce_mod_pi(double x);

// Matrix-angle coordinates of Ein^{1,1}.
struct EinPoint {
    RP1Point x1, x2;
};

// Kleinian chart coordinates in R^{2,1}.
struct KleinPoint {
    double y1 = 0.0, y2 = 0.0, y3 = 0.0;
};

// y1^2 + y2^2 - y3^2.
double klein_norm(const KleinPoint& y);

// tan x, with pi/2 mapped to +infinity.
double quotient_affine(const RP1Point& x);
RP1Point affine_quotient(double t);

// (cos x1, sin x1)^t (cos x2, sin x2).
Mat2 matrix_angle(double x1, double x2);
std::pair<double, double> reduce_fundamental(double x1, double x2);
// Null vector of R^{2,2} representing the Einstein point.
MatVector22 ein_null_vector(double x1, double x2);

// (tan x1, tan x2); throws ChartSingularity at pi/2.
std::pair<double, double> penrose_rot(double x1, double x2);
// (tan x1 + tan x2, -tan x1 + tan x2) / 2.
std::pair<double, double> penrose_mat(double x1, double x2);

// (x1, x2, x3) / x4; throws OnExcludedPlane when |x4| < 1e-14.
KleinPoint kleinian(const MatVector22& x);
// Representative with <x, x> = -1 and x4 > 0; throws OutsideKleinDomain outside the quadric interior.
MatVector22 kleinian_inverse(const KleinPoint& y);

// Chart (x1, x2, x4) / x3, in which the diagonal of Ein^{1,1} is the unit circle of {y3 = 0}.
KleinPoint kleinian_centered(const MatVector22& x);
MatVector22 kleinian_centered_inverse(const KleinPoint& y);

enum class CausalType { spacelike, timelike, lightlike };
const char* to_string(CausalType type);
// Sign of dx1 dx2; throws ZeroVector for (0, 0).
CausalType causal_type(double dx1, double dx2);

struct CurveLine {
    double slope = 1.0, intercept = 0.0;
};

struct CurveHyperbola {
    double P = 1.0, Q = 0.0, R = 0.0;
    std::pair<double, double> center() const { return {Q, -R}; }
};

using AcausalCircle = std::variant<CurveLine, CurveHyperbola>;

// Graph of f in the rotated Penrose chart.
AcausalCircle acausal_circle_of(const MobiusMap& f);

}  // namespace wpdiag
