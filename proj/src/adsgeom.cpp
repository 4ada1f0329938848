#include "wpdiag/adsgeom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wpdiag/errors.hpp"

namespace wpdiag {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Homogeneous lift (y1, y2, 1, y3) of a centered-chart point.
MatVector22 centered_lift(const KleinPoint& q) { return {q.y1, q.y2, 1.0, q.y3}; }

NormalizingMap normalizing_map(double base, double lo, double hi) {
    if (!(base - lo < 0.5 * kPi && hi - base < 0.5 * kPi)) {
        throw Error(ErrorCode::ChartSingularity, "interval end at pi/2 or more from the basepoint");
    }
    NormalizingMap t;
    t.E = MobiusMap::rotation(-base);
    const PheFactors f = phe_factors(std::tan(lo - base), std::tan(hi - base));
    t.H = f.H;
    t.P = f.P;
    t.lift = LiftedMobius::anchored(t.map(), base, 0.0);
    return t;
}

std::array<double, 9> limit_corners() {
    std::array<double, 9> x{};
    for (int j = -4; j <= 4; ++j) x[j + 4] = std::atan(j / 3.0);
    return x;
}

}  // namespace

EinDiamond diamond_ein(EinCoords p1, EinCoords p2) {
    if (!(p1.first <= p2.first && p1.second >= p2.second)) {
        throw Error(ErrorCode::NotTimeRelated, "corners are not time-related in this chart");
    }
    return {{p1.first, p2.first}, {p2.second, p1.second}};
}

EinDiamond boundary_diamond(const CircleHomeo& phi, const DyadicInterval& interval) {
    const Interval t = interval.tripled();
    return {t, {phi(t.lo), phi(t.hi)}};
}

double diamond_ads_margin(EinCoords p1, EinCoords p2, const KleinPoint& q) {
    if (!(klein_norm(q) < 1.0)) throw Error(ErrorCode::OutsideKleinDomain, "point not in the Kleinian domain");
    const EinDiamond d = diamond_ein(p1, p2);
    if (d.degenerate()) throw Error(ErrorCode::NotTimeRelated, "flat rectangle has no AdS diamond");
    MatVector22 c = ein_null_vector(d.horizontal.mid(), d.vertical.mid());
    if (std::abs(c.x3) < 1e-14) throw Error(ErrorCode::ChartSingularity, "rectangle center on the excluded plane");
    if (c.x3 < 0.0) c = {-c.x1, -c.x2, -c.x3, -c.x4};
    const MatVector22 x = centered_lift(q);
    double margin = kInf;
    for (const EinCoords& p : {p1, p2}) {
        const MatVector22 n = ein_null_vector(p.first, p.second);
        const double side = inner22(c, n);
        if (std::abs(side) < 1e-14) throw Error(ErrorCode::NotTimeRelated, "corner lightlike to the center");
        margin = std::min(margin, side > 0.0 ? inner22(x, n) : -inner22(x, n));
    }
    return margin;
}

bool diamond_ads_contains(EinCoords p1, EinCoords p2, const KleinPoint& q) {
    return diamond_ads_margin(p1, p2, q) >= 0.0;
}

bool ideal_diamond_contains(const KleinPoint& r1, const KleinPoint& r2, const KleinPoint& q) {
    if (!(klein_norm(q) < 1.0)) throw Error(ErrorCode::OutsideKleinDomain, "point not in the Kleinian domain");
    for (const KleinPoint* r : {&r1, &r2}) {
        if (r->y3 == 0.0) throw Error(ErrorCode::ZeroVector, "ray must be nonzero and lightlike");
        const double scale = std::max(std::abs(r->y3), 1.0);
        if (std::abs(klein_norm(*r)) > 1e-12 * scale * scale) {
            throw Error(ErrorCode::InvalidConfig, "ray must be lightlike");
        }
    }
    // <X, R> with R = (r1, r2, 0, r3); the sign of r3 fixes which side is below.
    auto g = [&](const KleinPoint& r) {
        const double v = q.y1 * r.y1 + q.y2 * r.y2 - q.y3 * r.y3;
        return r.y3 > 0.0 ? v : -v;
    };
    return g(r1) >= 0.0 && g(r2) <= 0.0;
}

CanonicalTransform canonical_transform(const CircleHomeo& phi, const Interval& interval, std::optional<double> x) {
    CanonicalTransform t;
    t.x = x.value_or(interval.mid());
    const Interval tri = triple(interval);
    t.T1 = normalizing_map(t.x, tri.lo, tri.hi);
    t.T2 = normalizing_map(phi(t.x), phi(tri.lo), phi(tri.hi));
    t.y = t.T1(t.x);
    return t;
}

double normalization_error(const CanonicalTransform& t, const CircleHomeo& phi, const Interval& interval) {
    const Interval tri = triple(interval);
    const double q = 0.25 * kPi;
    return std::max({std::abs(t.T1(tri.lo) + q), std::abs(t.T1(tri.hi) - q), std::abs(t.T2(phi(tri.lo)) + q),
                     std::abs(t.T2(phi(tri.hi)) - q)});
}

NormalizedData normalized_data(const CircleHomeo& phi, const Interval& interval,
                               const std::optional<EpsilonWitness>& witness) {
    const CanonicalTransform t =
        canonical_transform(phi, interval, witness ? std::optional<double>(witness->x) : std::nullopt);
    const LiftedMobius t1_inv = t.T1.lift.inverse();
    NormalizedData d{t,
                     CircleHomeo::compose(CircleHomeo::from_lifted_mobius(t.T2.lift),
                                          CircleHomeo::compose(phi, CircleHomeo::from_lifted_mobius(t1_inv))),
                     std::nullopt, std::nullopt};
    if (witness) {
        d.g_minus = compose(t.T2.lift, compose(witness->f_minus, t1_inv));
        d.g_plus = compose(t.T2.lift, compose(witness->f_plus, t1_inv));
        d.dist_minus = dist_to_identity_estimate(d.g_minus->map());
        d.dist_plus = dist_to_identity_estimate(d.g_plus->map());
    }
    return d;
}

std::pair<double, double> predicted_corners(int k) {
    const double c = (2.0 * k + 1.0) / 6.0;
    return {std::atan(c - 1.0 / 6.0), std::atan(c + 1.0 / 6.0)};
}

CornerReport corner_positions(const CircleHomeo& phi, const Interval& interval, const Interval& child,
                              const CanonicalTransform& t) {
    const Interval tri = triple(interval);
    if (!tri.contains(child) || std::abs(child.length() - 0.5 * interval.length()) > 1e-12 * interval.length()) {
        throw Error(ErrorCode::OutOfRange, "child must have half the length of I and lie in 3I");
    }
    CornerReport r;
    r.domain = {t.T1(child.lo), t.T1(child.hi)};
    r.image = {t.T2(phi(child.lo)), t.T2(phi(child.hi))};
    auto deviation = [](std::pair<double, double> a, std::pair<double, double> b) {
        return std::max(std::abs(a.first - b.first), std::abs(a.second - b.second));
    };
    r.domain_deviation = kInf;
    // Affine ends of T1 (3I) are -1 and 1, so admissible k lie well inside [-6, 5].
    for (int k = -6; k <= 5; ++k) {
        const double dev = deviation(r.domain, predicted_corners(k));
        if (dev < r.domain_deviation) {
            r.domain_deviation = dev;
            r.k = k;
        }
    }
    r.predicted = predicted_corners(r.k);
    r.image_deviation = deviation(r.image, r.predicted);
    return r;
}

std::array<Interval, 6> half_children_of_triple(const Interval& interval) {
    const double h = 0.5 * interval.length();
    const double s = interval.lo - interval.length();
    std::array<Interval, 6> out;
    for (int j = 0; j < 6; ++j) out[j] = {s + j * h, j == 5 ? interval.hi + interval.length() : s + (j + 1) * h};
    return out;
}

bool limiting_domain_contains(const KleinPoint& q) {
    if (q.y3 != 0.0 || !(q.y1 * q.y1 + q.y2 * q.y2 < 1.0)) return false;
    const double a = 0.25 * kPi;
    // The edge y1 = 0 of the closed cap carries roundoff from the ideal corners.
    if (diamond_ads_margin({-a, a}, {a, -a}, q) < -1e-15) return false;
    static const std::array<double, 9> x = limit_corners();
    for (int i = -3; i <= 2; ++i) {
        const double u = x[i - 1 + 4], v = x[i + 2 + 4];
        if (diamond_ads_margin({u, v}, {v, u}, q) > 0.0) return false;
    }
    return true;
}

LimitingDomain limiting_domain(int samples) {
    if (samples < 2) throw Error(ErrorCode::InvalidConfig, "limiting_domain needs at least two samples");
    LimitingDomain d;
    d.corners = limit_corners();
    d.boundary.reserve(samples);
    // The region is star-shaped from the origin: each removed cap lies beyond a chord missing the origin.
    for (int i = 0; i < samples; ++i) {
        const double t = kPi * i / (samples - 1);
        const double u1 = -std::sin(t), u2 = std::cos(t);
        double lo = 0.0, hi = 1.0;
        while (hi - lo > 1e-15) {
            const double m = 0.5 * (lo + hi);
            if (limiting_domain_contains({m * u1, m * u2, 0.0})) {
                lo = m;
            } else {
                hi = m;
            }
        }
        d.boundary.push_back({lo * u1, lo * u2, 0.0});
        d.r = std::max(d.r, lo);
    }
    return d;
}

bool slab_contains(double c_eps, const KleinPoint& q) { return klein_norm(q) < 1.0 && std::abs(q.y3) < c_eps; }

double graph_slab_height(const CircleHomeo& f, int samples) {
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double x = -0.5 * kPi + kPi * i / samples;
        const MatVector22 n = ein_null_vector(x, f(x));
        // The graph leaves the chart.
        if (std::abs(n.x3) < 1e-14) return kInf;
        worst = std::max(worst, std::abs(kleinian_centered(n).y3));
    }
    return worst;
}

SlabReport homeo_graph_in_slab(const NormalizedData& data, int samples) {
    SlabReport r;
    r.psi = graph_slab_height(data.psi, samples);
    if (data.g_minus) r.g_minus = graph_slab_height(CircleHomeo::from_lifted_mobius(*data.g_minus), samples);
    if (data.g_plus) r.g_plus = graph_slab_height(CircleHomeo::from_lifted_mobius(*data.g_plus), samples);
    return r;
}

CoverageCount graph_coverage(const CircleHomeo& phi, double x0, int depth, int samples) {
    const long long n = DyadicInterval::count_at(depth);
    std::vector<EinDiamond> rects;
    rects.reserve(n);
    for (long long k = 0; k < n; ++k) rects.push_back(boundary_diamond(phi, DyadicInterval(x0, depth, k)));
    auto in_mod_pi = [](double v, const Interval& s) {
        return v + kPi * std::ceil((s.lo - v) / kPi) <= s.hi;
    };
    CoverageCount c{std::numeric_limits<int>::max(), 0};
    // Golden-ratio offset keeps the samples off dyadic endpoints.
    const double offset = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int s = 0; s < samples; ++s) {
        const double x = x0 + kPi * (s + offset) / samples;
        const double y = phi(x);
        int count = 0;
        for (const EinDiamond& r : rects) count += in_mod_pi(x, r.horizontal) && in_mod_pi(y, r.vertical);
        c.min = std::min(c.min, count);
        c.max = std::max(c.max, count);
    }
    return c;
}

}  // namespace wpdiag
