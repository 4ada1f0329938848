#include "wpdiag/homeo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wpdiag/errors.hpp"

namespace wpdiag {

namespace {

double reduce_pi(double x) {
    double r = std::fmod(x, kPi);
    if (r < 0.0) r += kPi;
    if (r >= kPi) r -= kPi;
    return r;
}

// Maximum of cos over [lo, hi].
double max_cos_on(double lo, double hi) {
    if (hi - lo >= 2.0 * kPi) return 1.0;
    const double k = std::ceil(lo / (2.0 * kPi));
    if (2.0 * k * kPi <= hi) return 1.0;
    return std::max(std::cos(lo), std::cos(hi));
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

class RotationModel final : public HomeoModel {
public:
    explicit RotationModel(double c) : c_(c) {}
    double lift(double x) const override { return x + c_; }
    std::optional<double> derivative(double) const override { return 1.0; }
    double max_slope_on(double, double) const override { return 1.0; }
    double lipschitz() const override { return 1.0; }
    std::optional<double> max_curvature_on(double, double) const override { return 0.0; }
    std::optional<LiftedMobius> mobius() const override {
        return LiftedMobius::anchored(MobiusMap::rotation(c_), 0.0, c_);
    }

private:
    double c_;
};

class MobiusModel final : public HomeoModel {
public:
    explicit MobiusModel(const LiftedMobius& m) : m_(m) {}
    double lift(double x) const override { return m_(x); }
    std::optional<double> derivative(double x) const override { return m_.derivative(x); }
    double max_slope_on(double u, double v) const override { return m_.max_derivative_on(u, v); }
    double lipschitz() const override { return m_.max_derivative(); }
    std::optional<double> max_curvature_on(double u, double v) const override {
        return m_.max_second_derivative_on(u, v);
    }
    std::optional<LiftedMobius> mobius() const override { return m_; }

private:
    LiftedMobius m_;
};

class TrigModel final : public HomeoModel {
public:
    explicit TrigModel(double a) : a_(a) {}
    double lift(double x) const override { return x + a_ * std::sin(2.0 * x); }
    std::optional<double> derivative(double x) const override { return 1.0 + 2.0 * a_ * std::cos(2.0 * x); }
    double max_slope_on(double u, double v) const override {
        if (a_ >= 0.0) return 1.0 + 2.0 * a_ * max_cos_on(2.0 * u, 2.0 * v);
        return 1.0 - 2.0 * a_ * max_cos_on(2.0 * u + kPi, 2.0 * v + kPi);
    }
    double lipschitz() const override { return 1.0 + 2.0 * std::abs(a_); }
    std::optional<double> max_curvature_on(double, double) const override { return 4.0 * std::abs(a_); }

private:
    double a_;
};

// Piecewise linear lift through (knots[i], values[i]) over one period starting at knots[0].
class PiecewiseModel final : public HomeoModel {
public:
    PiecewiseModel(std::vector<double> knots, std::vector<double> values, bool kinked)
        : knots_(std::move(knots)), values_(std::move(values)), kinked_(kinked) {
        knots_.push_back(knots_.front() + kPi);
        values_.push_back(values_.front() + kPi);
        for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
            slopes_.push_back((values_[i + 1] - values_[i]) / (knots_[i + 1] - knots_[i]));
        }
        lipschitz_ = *std::max_element(slopes_.begin(), slopes_.end());
    }

    double lift(double x) const override {
        const double n = std::floor((x - knots_.front()) / kPi);
        const double r = x - n * kPi;
        const std::size_t i = piece(r);
        return values_[i] + slopes_[i] * (r - knots_[i]) + n * kPi;
    }

    std::optional<double> derivative(double x) const override {
        if (!kinked_) return std::nullopt;
        const double n = std::floor((x - knots_.front()) / kPi);
        return slopes_[piece(x - n * kPi)];
    }

    double max_slope_on(double u, double v) const override {
        if (v - u >= kPi) return lipschitz_;
        const double n = std::floor((u - knots_.front()) / kPi);
        const double ru = u - n * kPi, rv = v - n * kPi;
        double best = 0.0;
        std::size_t i = piece(ru);
        double start = ru;
        double offset = 0.0;
        while (start < rv) {
            best = std::max(best, slopes_[i]);
            const double end = knots_[i + 1] + offset;
            start = end;
            ++i;
            if (i + 1 == knots_.size()) {
                i = 0;
                offset += kPi;
            }
        }
        return best;
    }

    double lipschitz() const override { return lipschitz_; }

    // Zero unless a knot lies strictly inside.
    std::optional<double> max_curvature_on(double u, double v) const override {
        if (v - u >= kPi) return std::nullopt;
        const double n = std::floor((u - knots_.front()) / kPi);
        const double ru = u - n * kPi, rv = v - n * kPi;
        for (std::size_t i = 0; i < knots_.size(); ++i) {
            if ((knots_[i] > ru && knots_[i] < rv) || (knots_[i] + kPi > ru && knots_[i] + kPi < rv)) return std::nullopt;
        }
        return 0.0;
    }

    std::vector<double> kinks() const override {
        std::vector<double> out;
        for (std::size_t i = 0; i + 1 < knots_.size(); ++i) out.push_back(reduce_pi(knots_[i]));
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::size_t piece(double r) const {
        auto it = std::upper_bound(knots_.begin(), knots_.end(), r);
        std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - knots_.begin()) - 1));
        return std::min(i, slopes_.size() - 1);
    }

    std::vector<double> knots_;
    std::vector<double> values_;
    std::vector<double> slopes_;
    double lipschitz_ = 1.0;
    bool kinked_;
};

class ComposeModel final : public HomeoModel {
public:
    ComposeModel(CircleHomeo f, CircleHomeo g) : f_(std::move(f)), g_(std::move(g)) {}
    double lift(double x) const override { return f_(g_(x)); }
    std::optional<double> derivative(double x) const override {
        const auto dg = g_.derivative(x);
        if (!dg) return std::nullopt;
        const auto df = f_.derivative(g_(x));
        if (!df) return std::nullopt;
        return *df * *dg;
    }
    double max_slope_on(double u, double v) const override {
        return f_.max_slope_on(g_(u), g_(v)) * g_.max_slope_on(u, v);
    }
    double lipschitz() const override { return f_.lipschitz() * g_.lipschitz(); }
    // (f o g)'' = f''(g) g'^2 + f'(g) g''.
    std::optional<double> max_curvature_on(double u, double v) const override {
        const double gu = g_(u), gv = g_(v);
        const auto f2 = f_.max_curvature_on(gu, gv);
        const auto g2 = g_.max_curvature_on(u, v);
        if (!f2 || !g2) return std::nullopt;
        const double g1 = g_.max_slope_on(u, v);
        return *f2 * g1 * g1 + f_.max_slope_on(gu, gv) * *g2;
    }
    std::vector<double> kinks() const override {
        std::vector<double> out = g_.kinks();
        const double g0 = g_(0.0);
        for (double y : f_.kinks()) {
            // Preimage under g of the kink y, found by bisection in one period.
            double target = y;
            while (target < g0) target += kPi;
            while (target >= g0 + kPi) target -= kPi;
            double lo = 0.0, hi = kPi;
            for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
                const double m = 0.5 * (lo + hi);
                (g_(m) < target ? lo : hi) = m;
            }
            out.push_back(reduce_pi(0.5 * (lo + hi)));
        }
        std::sort(out.begin(), out.end());
        return out;
    }
    std::optional<LiftedMobius> mobius() const override {
        const auto mf = f_.mobius();
        const auto mg = g_.mobius();
        if (!mf || !mg) return std::nullopt;
        return wpdiag::compose(*mf, *mg);
    }

private:
    CircleHomeo f_, g_;
};

void validate(const CircleHomeo& phi) {
    // Deterministic sample of the lift over two periods.
    constexpr int kSamples = 1000;
    double prev = phi(-kPi);
    for (int i = 1; i <= 2 * kSamples; ++i) {
        const double x = -kPi + kPi * i / kSamples;
        const double v = phi(x);
        if (!(v > prev)) throw Error(ErrorCode::NotMonotone, "lift not strictly increasing near x=" + fmt(x));
        prev = v;
    }
    for (int i = 0; i < kSamples; ++i) {
        const double x = -3.0 + 6.0 * (i + 0.5) / kSamples;
        if (std::abs(phi(x + kPi) - phi(x) - kPi) > 1e-10) {
            throw Error(ErrorCode::NotEquivariant, "lift(x + pi) != lift(x) + pi at x=" + fmt(x));
        }
    }
}

}  // namespace

Interval scale(const Interval& interval, double lambda) {
    const double half = 0.5 * lambda * interval.length();
    const double m = interval.mid();
    return {m - half, m + half};
}

Interval triple(const Interval& interval) {
    const double len = interval.length();
    return {interval.lo - len, interval.hi + len};
}

Interval translate_to(const Interval& interval, double x) {
    const double half = 0.5 * interval.length();
    return {x - half, x + half};
}

DyadicInterval::DyadicInterval(double x0, int depth, long long index) : x0_(x0), depth_(depth), index_(index) {
    if (depth < 0 || depth > 60 || index < 0 || index >= count_at(depth)) {
        throw Error(ErrorCode::OutOfRange, "dyadic index out of range");
    }
}

double DyadicInterval::lo() const { return x0_ + std::ldexp(static_cast<double>(index_) * kPi, -depth_); }

double DyadicInterval::hi() const { return x0_ + std::ldexp(static_cast<double>(index_ + 1) * kPi, -depth_); }

double DyadicInterval::length() const { return std::ldexp(kPi, -depth_); }

DyadicInterval DyadicInterval::parent() const {
    if (depth_ == 0) throw Error(ErrorCode::OutOfRange, "depth-0 interval has no parent");
    return {x0_, depth_ - 1, index_ / 2};
}

DyadicInterval DyadicInterval::child(int which) const { return {x0_, depth_ + 1, 2 * index_ + (which ? 1 : 0)}; }

std::vector<DyadicInterval> DyadicInterval::chain() const {
    std::vector<DyadicInterval> out;
    DyadicInterval cur = *this;
    while (cur.depth() > 0) {
        cur = cur.parent();
        out.push_back(cur);
    }
    return out;
}

CircleHomeo::CircleHomeo(std::shared_ptr<const HomeoModel> model, std::string tag)
    : model_(std::move(model)), tag_(std::move(tag)) {}

CircleHomeo CircleHomeo::rotation(double c) {
    return CircleHomeo(std::make_shared<RotationModel>(c), "rot:" + fmt(c));
}

CircleHomeo CircleHomeo::from_mobius(const MobiusMap& m) { return from_lifted_mobius(LiftedMobius(m)); }

CircleHomeo CircleHomeo::from_lifted_mobius(const LiftedMobius& m) {
    const MobiusMap& f = m.map();
    return CircleHomeo(std::make_shared<MobiusModel>(m),
                       "mobius:" + fmt(f.a()) + "," + fmt(f.b()) + "," + fmt(f.c()) + "," + fmt(f.d()));
}

CircleHomeo CircleHomeo::trig(double a) {
    if (!(std::abs(2.0 * a) < 1.0)) throw Error(ErrorCode::NotMonotone, "trig requires |2a| < 1");
    return CircleHomeo(std::make_shared<TrigModel>(a), "trig:" + fmt(a));
}

CircleHomeo CircleHomeo::piecewise_linear(const std::vector<double>& breakpoints, const std::vector<double>& slopes) {
    if (breakpoints.empty() || breakpoints.size() != slopes.size()) {
        throw Error(ErrorCode::InvalidSpec, "need one slope per breakpoint");
    }
    for (std::size_t i = 0; i < slopes.size(); ++i) {
        if (!(slopes[i] > 0.0)) throw Error(ErrorCode::NotMonotone, "slopes must be positive");
        const double next = i + 1 < breakpoints.size() ? breakpoints[i + 1] : breakpoints.front() + kPi;
        if (!(next > breakpoints[i])) throw Error(ErrorCode::InvalidSpec, "breakpoints must increase within one period");
    }
    std::vector<double> values{breakpoints.front()};
    double rise = 0.0;
    for (std::size_t i = 0; i < slopes.size(); ++i) {
        const double next = i + 1 < breakpoints.size() ? breakpoints[i + 1] : breakpoints.front() + kPi;
        rise += slopes[i] * (next - breakpoints[i]);
        if (i + 1 < breakpoints.size()) values.push_back(breakpoints.front() + rise);
    }
    if (std::abs(rise - kPi) > 1e-12) throw Error(ErrorCode::NotEquivariant, "total rise over a period must be pi");
    std::string tag = "pwl:";
    for (std::size_t i = 0; i < slopes.size(); ++i) tag += (i ? ";" : "") + fmt(breakpoints[i]) + "@" + fmt(slopes[i]);
    CircleHomeo out(std::make_shared<PiecewiseModel>(breakpoints, values, true), tag);
    validate(out);
    return out;
}

CircleHomeo CircleHomeo::piecewise_equal(double b, const std::vector<double>& slopes) {
    if (slopes.empty()) throw Error(ErrorCode::InvalidSpec, "need at least one slope");
    std::vector<double> breaks;
    const double step = kPi / static_cast<double>(slopes.size());
    for (std::size_t i = 0; i < slopes.size(); ++i) breaks.push_back(b + step * static_cast<double>(i));
    CircleHomeo out = piecewise_linear(breaks, slopes);
    std::string tag = "pwl:" + fmt(b) + ";";
    for (std::size_t i = 0; i < slopes.size(); ++i) tag += (i ? "," : "") + fmt(slopes[i]);
    return CircleHomeo(out.model_, tag);
}

CircleHomeo CircleHomeo::from_samples(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() < 2 || xs.size() != ys.size()) throw Error(ErrorCode::InvalidSpec, "need matching sample tables");
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (!(xs[i] > xs[i - 1])) throw Error(ErrorCode::InvalidSpec, "sample abscissae must increase");
        if (!(ys[i] > ys[i - 1])) throw Error(ErrorCode::NotMonotone, "sample values must increase");
    }
    if (!(xs.back() < xs.front() + kPi)) throw Error(ErrorCode::InvalidSpec, "samples must span less than a period");
    if (!(ys.back() < ys.front() + kPi)) throw Error(ErrorCode::NotMonotone, "sample values exceed one period");
    CircleHomeo out(std::make_shared<PiecewiseModel>(xs, ys, false), "samples:" + std::to_string(xs.size()));
    validate(out);
    return out;
}

CircleHomeo CircleHomeo::compose(const CircleHomeo& f, const CircleHomeo& g) {
    return CircleHomeo(std::make_shared<ComposeModel>(f, g), "compose:" + f.tag() + "|" + g.tag());
}

double CircleHomeo::default_kink_base() { return kPi * (std::sqrt(2.0) - 1.0); }

double image_length(const CircleHomeo& phi, const Interval& interval) { return phi(interval.hi) - phi(interval.lo); }

}  // namespace wpdiag
