#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wpdiag/mobius.hpp"

namespace wpdiag {

// Closed interval of the lift R.
struct Interval {
    double lo = 0.0, hi = 0.0;

    double length() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
};

// Concentric interval scaled by lambda >= 1.
Interval scale(const Interval& interval, double lambda);
Interval triple(const Interval& interval);
// Interval of the same length centered on x.
Interval translate_to(const Interval& interval, double x);

// x0 + [k pi / 2^m, (k + 1) pi / 2^m].
class DyadicInterval {
public:
    DyadicInterval(double x0, int depth, long long index);

    double base() const { return x0_; }
    int depth() const { return depth_; }
    long long index() const { return index_; }

    double lo() const;
    double hi() const;
    double length() const;
    Interval interval() const { return {lo(), hi()}; }
    Interval tripled() const { return triple(interval()); }

    DyadicInterval parent() const;
    DyadicInterval child(int which) const;
    // Ancestors from depth m - 1 down to depth 0.
    std::vector<DyadicInterval> chain() const;

    static long long count_at(int depth) { return 1LL << depth; }

private:
    double x0_;
    int depth_;
    long long index_;
};

// Lift model of an orientation-preserving circle homeomorphism.
class HomeoModel {
public:
    virtual ~HomeoModel() = default;

    virtual double lift(double x) const = 0;
    // Empty when no derivative evaluator is available.
    virtual std::optional<double> derivative(double x) const = 0;
    // Supremum of the lift's slope over [u, v].
    virtual double max_slope_on(double u, double v) const = 0;
    virtual double lipschitz() const = 0;
    // Supremum of |lift''| over [u, v]; empty when the lift is not C^2 there.
    virtual std::optional<double> max_curvature_on(double, double) const { return std::nullopt; }
    // Points of [0, pi) where the derivative jumps.
    virtual std::vector<double> kinks() const { return {}; }
    // Exact Moebius representation, when the lift is one.
    virtual std::optional<LiftedMobius> mobius() const { return std::nullopt; }
};

class CircleHomeo {
public:
    static CircleHomeo rotation(double c);
    static CircleHomeo from_mobius(const MobiusMap& m);
    static CircleHomeo from_lifted_mobius(const LiftedMobius& m);
    // x + a sin(2x), |a| < 1/2.
    static CircleHomeo trig(double a);
    // Slope slopes[i] on [breakpoints[i], breakpoints[i+1]], last piece ending at breakpoints[0] + pi.
    // Lift fixes breakpoints[0].
    static CircleHomeo piecewise_linear(const std::vector<double>& breakpoints, const std::vector<double>& slopes);
    // Equal pieces of [b, b + pi].
    static CircleHomeo piecewise_equal(double b, const std::vector<double>& slopes);
    // Linear interpolation of one period of samples xs[i] -> ys[i]; xs strictly increasing with span < pi.
    static CircleHomeo from_samples(const std::vector<double>& xs, const std::vector<double>& ys);
    // f o g.
    static CircleHomeo compose(const CircleHomeo& f, const CircleHomeo& g);

    static double default_kink_base();

    double operator()(double x) const { return model_->lift(x); }
    std::optional<double> derivative(double x) const { return model_->derivative(x); }
    double max_slope_on(double u, double v) const { return model_->max_slope_on(u, v); }
    double lipschitz() const { return model_->lipschitz(); }
    std::optional<double> max_curvature_on(double u, double v) const { return model_->max_curvature_on(u, v); }
    // Modulus of continuity of the lift.
    double modulus(double h) const { return model_->lipschitz() * h; }
    std::vector<double> kinks() const { return model_->kinks(); }
    std::optional<LiftedMobius> mobius() const { return model_->mobius(); }
    const std::string& tag() const { return tag_; }

    CircleHomeo(std::shared_ptr<const HomeoModel> model, std::string tag);

private:
    std::shared_ptr<const HomeoModel> model_;
    std::string tag_;
};

// phi(I_+) - phi(I_-).
double image_length(const CircleHomeo& phi, const Interval& interval);

enum class SeminormVerdict { converged, diverging };
const char* to_string(SeminormVerdict verdict);

struct HHalfOptions {
    int k_start = 4;
    int doublings = 8;
    double tol = 1e-6;
    int regression_window = 5;
    // Absolute floor below which S_K counts as zero.
    double zero_floor = 1e-20;
};

struct HHalfResult {
    std::vector<int> K;
    std::vector<double> S;
    SeminormVerdict verdict = SeminormVerdict::converged;
    double value = 0.0;
    // Least-squares slope of S_K against log2 K over the regression window.
    double growth_per_doubling = 0.0;
};

// Partial sums of sum |k| |c_k|^2 for log phi' on R / pi Z.
HHalfResult h_half_seminorm(const CircleHomeo& phi, const HHalfOptions& options = {});
// Fourier coefficients c_1..c_K of log phi' in the basis e^{2ikx}, as (re, im) pairs.
std::vector<std::pair<double, double>> log_derivative_coefficients(const CircleHomeo& phi, int K);

}  // namespace wpdiag
