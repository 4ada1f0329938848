#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "wpdiag/charts.hpp"
#include "wpdiag/epsilon.hpp"
#include "wpdiag/homeo.hpp"

namespace wpdiag {

// Lifted matrix-angle coordinates (x1, x2) of a point of Ein^{1,1}.
using EinCoords = std::pair<double, double>;

// Product rectangle horizontal x vertical in lifted matrix-angle coordinates.
struct EinDiamond {
    Interval horizontal, vertical;

    bool degenerate() const { return horizontal.length() <= 0.0 || vertical.length() <= 0.0; }
    bool contains(double x1, double x2) const { return horizontal.contains(x1) && vertical.contains(x2); }
};

// [p1.x1, p2.x1] x [p2.x2, p1.x2]; throws NotTimeRelated unless p1.x1 <= p2.x1 and p1.x2 >= p2.x2.
// Equality in one coordinate gives a segment.
EinDiamond diamond_ein(EinCoords p1, EinCoords p2);
// 3I x phi(3I).
EinDiamond boundary_diamond(const CircleHomeo& phi, const DyadicInterval& interval);

// Smaller of the two corner-plane values <X, P_i> at q = X / X3, each signed so that the rectangle
// center is on the nonnegative side; q in the centered Kleinian chart.
// Throws OutsideKleinDomain when q is not in the AdS region and NotTimeRelated for a flat rectangle.
double diamond_ads_margin(EinCoords p1, EinCoords p2, const KleinPoint& q);
// Closed diamond: margin >= 0.
bool diamond_ads_contains(EinCoords p1, EinCoords p2, const KleinPoint& q);

// Diamond with ideal corners given by lightlike rays r1, r2 of the centered chart:
// q below the plane orthogonal to r1 and above the plane orthogonal to r2.
bool ideal_diamond_contains(const KleinPoint& r1, const KleinPoint& r2, const KleinPoint& q);

// T = P H E with E a rotation taking the basepoint to 0 and (P H) the affine normalization.
struct NormalizingMap {
    MobiusMap E, H, P;
    // Lift of P H E with the basepoint sent into (-pi/4, pi/4).
    LiftedMobius lift;

    MobiusMap map() const { return P * H * E; }
    double operator()(double x) const { return lift(x); }
};

struct CanonicalTransform {
    NormalizingMap T1, T2;
    double x = 0.0;
    // T1 applied to x.
    double y = 0.0;
};

// T1 normalizes 3I around x, T2 normalizes phi(3I) around phi(x); x defaults to the midpoint of I.
// Throws ChartSingularity when an end of 3I or phi(3I) is pi/2 or more away from the basepoint.
CanonicalTransform canonical_transform(const CircleHomeo& phi, const Interval& interval,
                                       std::optional<double> x = std::nullopt);

// Distance of both ends of T1 3I and T2 phi(3I) to -pi/4 and pi/4.
double normalization_error(const CanonicalTransform& t, const CircleHomeo& phi, const Interval& interval);

struct NormalizedData {
    CanonicalTransform T;
    CircleHomeo psi;
    // T2 f T1^{-1} for the witness maps, with their jet distance to the identity.
    std::optional<LiftedMobius> g_minus, g_plus;
    double dist_minus = 0.0, dist_plus = 0.0;
};

// The witness basepoint is used as x when a witness is given.
NormalizedData normalized_data(const CircleHomeo& phi, const Interval& interval,
                               const std::optional<EpsilonWitness>& witness = std::nullopt);

// arctan((2k + 1) / 6 -+ 1 / 6).
std::pair<double, double> predicted_corners(int k);

struct CornerReport {
    int k = 0;
    // Lifted ends of T1 J and T2 phi(J).
    std::pair<double, double> domain, image;
    std::pair<double, double> predicted;
    double domain_deviation = 0.0;
    double image_deviation = 0.0;
};

// k minimizes the domain deviation; the image deviation uses the same k.
// Throws OutOfRange unless l(child) = l(I) / 2 and child lies in 3I.
CornerReport corner_positions(const CircleHomeo& phi, const Interval& interval, const Interval& child,
                              const CanonicalTransform& t);
// The six intervals of length l(I) / 2 tiling 3I, left to right.
std::array<Interval, 6> half_children_of_triple(const Interval& interval);

struct LimitingDomain {
    // x_j = arctan(j / 3) for j = -4..4.
    std::array<double, 9> corners{};
    // Farthest point of the region along each sampled direction of the half plane y1 <= 0.
    std::vector<KleinPoint> boundary;
    double r = 0.0;
};

// Closed H0 cap of the normalized diamond minus the six open diamonds over [x_{i-1}, x_{i+2}]^2.
bool limiting_domain_contains(const KleinPoint& q);
LimitingDomain limiting_domain(int samples = 10000);

// y1^2 + y2^2 < 1 + y3^2 and |y3| < c_eps.
bool slab_contains(double c_eps, const KleinPoint& q);

// Largest |y3| over the centered-chart image of graph(f) sampled on [-pi/2, pi/2).
double graph_slab_height(const CircleHomeo& f, int samples = 2000);

struct SlabReport {
    double psi = 0.0;
    // Zero when the witness is absent.
    double g_minus = 0.0, g_plus = 0.0;
};

SlabReport homeo_graph_in_slab(const NormalizedData& data, int samples = 2000);

struct CoverageCount {
    int min = 0, max = 0;
};

// Number of depth-m rectangles 3I x phi(3I) containing (x, phi(x)) on the torus, over sampled x.
CoverageCount graph_coverage(const CircleHomeo& phi, double x0, int depth, int samples = 257);

}  // namespace wpdiag
