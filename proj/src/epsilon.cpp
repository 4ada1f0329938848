#include "wpdiag/epsilon.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>

#include "wpdiag/errors.hpp"
#include "wpdiag/parallel.hpp"

namespace wpdiag {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Slack for floating-point ties in monitored inequalities.
constexpr double kRoundoff = 1e-12;
constexpr double kGolden = 0.6180339887498949;

// Roundoff tolerance for a bound on differences of lift values near size scale.
double slack(double scale) { return kRoundoff * std::max(1.0, std::abs(scale)); }

bool le(double a, double b) { return a <= b + kRoundoff * std::max({1.0, std::abs(a), std::abs(b)}); }

// Kinks of phi inside (lo, hi), lifted.
std::vector<double> kinks_in(const CircleHomeo& phi, double lo, double hi) {
    std::vector<double> out;
    for (double k : phi.kinks()) {
        for (double y = k + kPi * std::ceil((lo - k) / kPi); y < hi; y += kPi) {
            if (y > lo) out.push_back(y);
        }
    }
    return out;
}

struct Cell {
    double a, b, ga, gb, lb;
    bool operator<(const Cell& other) const { return lb > other.lb; }
};

struct CertifyResult {
    double lower = kInf;
    double sampled_min = kInf;
    double argmin = 0.0;
    int cells = 0;
};

// Lower bound of g on [lo, hi] from |g'| <= lip(a, b) and, when known, |g''| <= curv(a, b) on each cell.
CertifyResult certify(const std::function<double(double)>& g, const std::function<double(double, double)>& lip,
                      const std::function<std::optional<double>(double, double)>& curv, double lo, double hi,
                      std::vector<double> points, const PinchOptions& options) {
    constexpr int kInitialCells = 64;
    for (int i = 0; i <= kInitialCells; ++i) points.push_back(lo + (hi - lo) * i / kInitialCells);
    points.push_back(hi);
    std::sort(points.begin(), points.end());
    points.erase(std::remove_if(points.begin(), points.end(), [&](double y) { return y < lo || y > hi; }), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    CertifyResult out;
    auto sample = [&](double y) {
        const double v = g(y);
        if (v < out.sampled_min) {
            out.sampled_min = v;
            out.argmin = y;
        }
        return v;
    };
    auto make = [&](double a, double b, double ga, double gb) {
        const double h = b - a;
        double lb = 0.5 * (ga + gb) - 0.5 * lip(a, b) * h;
        if (const auto c = curv(a, b)) lb = std::max(lb, std::min(ga, gb) - 0.125 * *c * h * h);
        return Cell{a, b, ga, gb, lb};
    };

    std::vector<double> values(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) values[i] = sample(points[i]);
    std::priority_queue<Cell> queue;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) queue.push(make(points[i], points[i + 1], values[i], values[i + 1]));
    out.cells = static_cast<int>(queue.size());
    if (queue.empty()) {
        out.lower = out.sampled_min;
        return out;
    }

    double settled = kInf;
    while (!queue.empty()) {
        const Cell c = queue.top();
        if (c.lb >= 0.0 || out.cells >= options.max_cells) {
            out.lower = std::min(settled, c.lb);
            return out;
        }
        queue.pop();
        if (c.b - c.a <= options.min_cell) {
            settled = std::min(settled, c.lb);
            continue;
        }
        const double m = 0.5 * (c.a + c.b);
        const double gm = sample(m);
        queue.push(make(c.a, m, c.ga, gm));
        queue.push(make(m, c.b, gm, c.gb));
        ++out.cells;
    }
    out.lower = settled;
    return out;
}

struct Scales {
    Interval tripled;
    double l3 = 0.0, lphi = 0.0;
    double slope = 0.0, curvature = 0.0;
};

Scales scales_of(const CircleHomeo& phi, const Interval& interval) {
    Scales s;
    s.tripled = triple(interval);
    s.l3 = s.tripled.length();
    s.lphi = phi(s.tripled.hi) - phi(s.tripled.lo);
    s.slope = s.lphi / s.l3;
    s.curvature = s.lphi / (s.l3 * s.l3);
    return s;
}

bool same_map(const CircleHomeo& phi, const LiftedMobius& f, double x) {
    const auto m = phi.mobius();
    return m && max_abs_diff(m->map(), f.map()) < 1e-12 && std::abs((*m)(x) - f(x)) < 1e-12;
}

}  // namespace

std::array<double, 3> jet_defects(const CircleHomeo& phi, const Interval& interval, const LiftedMobius& f, double x) {
    const Scales s = scales_of(phi, interval);
    return {std::abs(f(x) - phi(x)) / s.lphi, std::abs(f.derivative(x) - s.slope) / s.slope,
            std::abs(f.second_derivative(x)) / s.curvature};
}

PinchBound pinch_bound(const CircleHomeo& phi, const LiftedMobius& f, int side, double lo, double hi,
                       const std::vector<double>& seeds, const PinchOptions& options) {
    const double sgn = side >= 0 ? 1.0 : -1.0;
    std::vector<double> points = seeds;
    for (double k : kinks_in(phi, lo, hi)) points.push_back(k);
    const CertifyResult r = certify([&](double y) { return sgn * (f(y) - phi(y)); },
                                    [&](double a, double b) { return f.max_derivative_on(a, b) + phi.max_slope_on(a, b); },
                                    [&](double a, double b) -> std::optional<double> {
                                        const auto c = phi.max_curvature_on(a, b);
                                        if (!c) return std::nullopt;
                                        return *c + f.max_second_derivative_on(a, b);
                                    },
                                    lo, hi, std::move(points), options);
    PinchBound out;
    out.lower = r.lower;
    out.sampled_min = r.sampled_min;
    out.argmin = r.argmin;
    out.certified = r.lower >= -slack(std::max(std::abs(lo), std::abs(hi)) + kPi);
    out.cells = r.cells;
    return out;
}

Feasibility witness_feasible(const CircleHomeo& phi, const Interval& interval, const EpsilonWitness& w, double eps,
                             const PinchOptions& options) {
    const double px = phi(w.x);
    for (const LiftedMobius* f : {&w.f_minus, &w.f_plus}) {
        if (!(std::abs((*f)(w.x) - px) < 0.5 * kPi)) {
            throw Error(ErrorCode::LiftMismatch, "witness lift is not the branch through phi(x)");
        }
    }
    const Scales s = scales_of(phi, interval);
    Feasibility out;
    out.margin = kInf;
    out.certified = true;
    for (const auto& d : {jet_defects(phi, interval, w.f_minus, w.x), jet_defects(phi, interval, w.f_plus, w.x)}) {
        for (double v : d) out.margin = std::min(out.margin, eps - v);
    }
    const int sides[2] = {-1, 1};
    const LiftedMobius* maps[2] = {&w.f_minus, &w.f_plus};
    for (int i = 0; i < 2; ++i) {
        if (same_map(phi, *maps[i], w.x)) {
            out.margin = std::min(out.margin, 0.0);
            continue;
        }
        const PinchBound b = pinch_bound(phi, *maps[i], sides[i], w.x - 0.5 * kPi, w.x + 0.5 * kPi, {w.x}, options);
        if (b.sampled_min / s.lphi < out.margin) {
            out.margin = b.sampled_min / s.lphi;
            out.worst_at = b.argmin;
        }
        out.certified = out.certified && b.certified;
    }
    out.feasible = out.margin >= -kRoundoff;
    return out;
}

double gronwall_threshold(double eta) { return (std::pow(2.0, eta) - 1.0) / 32.0; }

double majorant_constant(double eta) {
    if (!(eta > 0.0 && eta <= 1.0)) throw Error(ErrorCode::InvalidConfig, "eta must lie in (0, 1]");
    if (eta == 1.0) throw Error(ErrorCode::InvalidConfig, "the geometric series diverges at eta = 1");
    const double c1 = 76.0 * std::pow(2.0, -eta);
    return 256.0 * c1 / (1.0 - std::pow(2.0, eta - 1.0));
}

DeltaScan scan_delta(const CircleHomeo& phi, double x0, int max_depth, double eta, int jobs) {
    const double threshold = gronwall_threshold(eta);
    std::vector<double> worst(static_cast<std::size_t>(max_depth) + 1, 0.0);
    for (int m = 0; m <= max_depth; ++m) {
        const auto count = static_cast<std::size_t>(DyadicInterval::count_at(m));
        std::vector<double> b(count);
        parallel_for(count, jobs, [&](std::size_t k) {
            b[k] = beta_number(phi, DyadicInterval(x0, m, static_cast<long long>(k)).tripled());
        });
        worst[m] = *std::max_element(b.begin(), b.end());
    }
    DeltaScan out;
    double tail = 0.0;
    int m = max_depth + 1;
    while (m > 0 && worst[m - 1] < threshold) {
        --m;
        tail = std::max(tail, worst[m]);
    }
    out.found = m <= max_depth;
    out.depth = m;
    out.worst_beta_above = tail;
    out.delta = kPi * std::ldexp(1.0, 1 - m) / 24.0;
    return out;
}

double MajorantData::p(double y) const {
    const double t = y - x;
    return phi_x + gamma * t + 2.0 * beta * image_length + gamma * t * t / (16.0 * Q);
}

MajorantData quadratic_majorant(const CircleHomeo& phi, const DyadicInterval& interval, double x,
                                const MajorantOptions& options) {
    if (!interval.interval().contains(x)) throw Error(ErrorCode::OutOfRange, "basepoint outside the interval");
    MajorantData d;
    d.eta = options.eta;
    d.C = majorant_constant(options.eta);
    if (options.delta) {
        d.delta = *options.delta;
    } else {
        const DeltaScan scan = scan_delta(phi, interval.base(), interval.depth(), options.eta);
        if (!scan.found) throw Error(ErrorCode::ScaleTooCoarse, "no depth satisfies the beta threshold");
        d.delta = scan.delta;
    }
    const double len = interval.length();
    if (options.strict_scale && !(len < std::pow(d.delta, 4))) {
        throw Error(ErrorCode::ScaleTooCoarse, "interval not shorter than delta^4");
    }
    if (!(len < 24.0 * d.delta)) throw Error(ErrorCode::ScaleTooCoarse, "interval not shorter than 24 delta");

    const double threshold = gronwall_threshold(options.eta);
    double sum = 0.0;
    for (DyadicInterval J = interval;;) {
        const double b = beta_number(phi, J.tripled());
        if (!(b < threshold)) throw Error(ErrorCode::ScaleTooCoarse, "beta threshold fails on the ancestor chain");
        sum += b * std::pow(len / J.length(), 1.0 - options.eta);
        ++d.chain_length;
        if (J.depth() == 0) break;
        J = J.parent();
        if (!(J.length() < 24.0 * d.delta)) break;
    }

    const IntervalStats s = interval_stats(phi, interval.tripled());
    d.x = x;
    d.phi_x = phi(x);
    d.gamma = s.gamma;
    d.beta = s.beta;
    d.image_length = s.image_length;
    d.length = s.length;
    d.Q = 1.0 / (std::pow(len, -0.25) + d.C / len * sum);
    d.P = d.gamma * d.Q * d.Q;
    d.R = d.P / d.Q - 2.0 * d.beta * d.image_length;
    return d;
}

MajorantCheck verify_quadratic(const CircleHomeo& phi, const MajorantData& data, const PinchOptions& options) {
    const Interval w = data.window();
    const double c2 = data.gamma / (8.0 * data.Q);
    auto slope = [&](double y) { return data.gamma + c2 * (y - data.x); };
    std::vector<double> points{data.x};
    for (double k : kinks_in(phi, w.lo, w.hi)) points.push_back(k);
    const CertifyResult r = certify(
        [&](double y) { return data.p(y) - phi(y); },
        [&](double a, double b) { return std::max(std::abs(slope(a)), std::abs(slope(b))) + phi.max_slope_on(a, b); },
        [&](double a, double b) -> std::optional<double> {
            const auto c = phi.max_curvature_on(a, b);
            if (!c) return std::nullopt;
            return *c + c2;
        },
        w.lo, w.hi, std::move(points), options);
    return {r.lower, r.sampled_min, r.argmin, r.lower >= -slack(std::abs(data.phi_x) + kPi)};
}

LiftedMobius fractional_jet_map(const MajorantData& data, int side) {
    const double sgn = side >= 0 ? 1.0 : -1.0;
    const double q = data.Q;
    return LiftedMobius::from_lift_jet(data.x, data.phi_x + sgn * (data.P / q - data.R), data.P / (q * q),
                                       sgn * 2.0 * data.P / (q * q * q));
}

MajorantCheck verify_fractional(const CircleHomeo& phi, const MajorantData& data, const LiftedMobius& f, int side,
                                const PinchOptions& options) {
    // The pole of f sits near x + side Q; seeding the partition there keeps cells small.
    std::vector<double> seeds{data.x};
    for (double t : {-4.0, -1.0, -0.5, 0.5, 1.0, 2.0}) seeds.push_back(data.x + t * data.Q);
    const PinchBound b = pinch_bound(phi, f, side, data.x - 0.5 * kPi, data.x + 0.5 * kPi, seeds, options);
    return {b.lower, b.sampled_min, b.argmin, b.certified};
}

LiftedMobius fractional_majorant(const CircleHomeo& phi, const MajorantData& data, int side) {
    const LiftedMobius f = fractional_jet_map(data, side);
    const MajorantCheck c = verify_fractional(phi, data, f, side);
    if (c.sampled_min < -slack(std::abs(data.phi_x) + kPi)) {
        std::ostringstream os;
        os.precision(17);
        os << "fractional map crosses the graph at y=" << c.argmin;
        throw Error(ErrorCode::PinchFailure, os.str());
    }
    return f;
}

double fractional_tilde(double P, double Q, double t) { return P / (Q - t) - P / Q; }

double quadratic_tilde(double P, double Q, double t) { return P * t / (Q * Q) + P * t * t / (8.0 * Q * Q * Q); }

double fractional_gap(double P, double Q, double t) { return P * t * t * (t + 7.0 * Q) / (8.0 * Q * Q * Q * (Q - t)); }

namespace {

// Pinching problem at a fixed basepoint: f = phi(x) + side u0 l(phi 3I) + F, F the lift with jet (0, y1, y2) at x.
class WitnessSearch {
public:
    WitnessSearch(const CircleHomeo& phi, const Interval& interval, double x)
        : phi_(phi), s_(scales_of(phi, interval)), x_(x), phi_x_(phi(x)) {
        const double lo = x - 0.5 * kPi, hi = x + 0.5 * kPi;
        const double len = interval.length();
        std::vector<double> ys;
        constexpr int kUniform = 96;
        for (int i = 0; i <= kUniform; ++i) ys.push_back(lo + kPi * i / kUniform);
        for (int j = -8;; ++j) {
            const double t = len * std::exp2(0.5 * j);
            if (t >= 0.5 * kPi) break;
            ys.push_back(x - t);
            ys.push_back(x + t);
        }
        ys.push_back(s_.tripled.lo);
        ys.push_back(s_.tripled.hi);
        for (double k : kinks_in(phi, lo, hi)) ys.push_back(k);
        std::sort(ys.begin(), ys.end());
        ys.erase(std::remove_if(ys.begin(), ys.end(), [&](double y) { return y < lo || y > hi; }), ys.end());
        ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
        ys_ = ys;
        for (double y : ys_) {
            dphi_.push_back(phi(y) - phi_x_);
            in_window_.push_back(s_.tripled.contains(y) ? 1 : 0);
        }
    }

    const Scales& scales() const { return s_; }
    double x() const { return x_; }
    const std::vector<double>& samples() const { return ys_; }

    LiftedMobius shape(double u1, double u2) const {
        return LiftedMobius::from_lift_jet(x_, 0.0, s_.slope * (1.0 + u1), u2 * s_.curvature);
    }

    // Smallest u0 making side * (f - phi) >= 0 on the samples, refined near the largest violations.
    double u0_star(double u1, double u2, int side, bool window_only) const {
        const LiftedMobius F = shape(u1, u2);
        const double sgn = side >= 0 ? 1.0 : -1.0;
        auto excess = [&](double y) { return sgn * (phi_(y) - phi_x_ - F(y)); };
        const std::size_t n = ys_.size();
        std::vector<double> v(n, -kInf);
        std::size_t first = 0, second = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (window_only && !in_window_[i]) continue;
            v[i] = sgn * (dphi_[i] - F(ys_[i]));
            if (v[i] > v[first] || (window_only && !in_window_[first])) first = i;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (i == first || v[i] == -kInf || v[i] < v[i - 1] || v[i] < v[i + 1]) continue;
            if (second == n || v[i] > v[second]) second = i;
        }
        double best = std::max(0.0, v[first]);
        for (std::size_t i : {first, second}) {
            if (i == n || i == 0 || i + 1 == n || v[i - 1] == -kInf || v[i + 1] == -kInf) continue;
            double a = ys_[i - 1], b = ys_[i + 1];
            double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
            double f1 = excess(x1), f2 = excess(x2);
            // The maximum value is quadratic in the location error.
            const double tol = std::max(1e-7 * (b - a), 1e-15 * (1.0 + std::abs(b)));
            while (b - a > tol) {
                if (f1 < f2) {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + kGolden * (b - a);
                    f2 = excess(x2);
                } else {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - kGolden * (b - a);
                    f1 = excess(x1);
                }
            }
            best = std::max({best, f1, f2});
        }
        return best / s_.lphi;
    }

    double objective(double u1, double u2, int side, bool window_only) const {
        if (!(u1 > -1.0) || !std::isfinite(u1) || !std::isfinite(u2)) return kInf;
        return std::max({u0_star(u1, u2, side, window_only), std::abs(u1), std::abs(u2)});
    }

    struct Optimum {
        double value = kInf;
        std::array<double, 2> u{};
        double step = 0.0;
    };

    // Compass search over (u1, u2) from the best seed; step 0 picks half the seed value.
    Optimum minimize(const std::vector<std::array<double, 2>>& seeds, int side, bool window_only, double rel_step,
                     int max_evaluations, double step = 0.0) const {
        Optimum o;
        int evals = 0;
        for (const auto& s : seeds) {
            const double e = objective(s[0], s[1], side, window_only);
            ++evals;
            if (e < o.value) {
                o.value = e;
                o.u = s;
            }
        }
        static constexpr double kDirs[8][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}, {1, -1}, {-1, 1}};
        if (step <= 0.0) step = 0.5 * std::max(o.value, 1e-9);
        while (o.value > 0.0 && evals < max_evaluations) {
            bool moved = false;
            for (const auto& d : kDirs) {
                const std::array<double, 2> c{o.u[0] + step * d[0], o.u[1] + step * d[1]};
                const double e = objective(c[0], c[1], side, window_only);
                ++evals;
                if (e < o.value * (1.0 - kRoundoff)) {
                    o.value = e;
                    o.u = c;
                    moved = true;
                    break;
                }
            }
            if (!moved) {
                step *= 0.5;
                if (step < rel_step * o.value || step < 1e-15) break;
            }
        }
        o.step = step;
        return o;
    }

    std::array<double, 2> osculating_seed() const {
        if (const auto m = phi_.mobius()) {
            return {m->derivative(x_) / s_.slope - 1.0, m->second_derivative(x_) / s_.curvature};
        }
        const double h = 0.5 * s_.tripled.length() / 3.0;
        const double fp = phi_(x_ + h), fm = phi_(x_ - h);
        const auto d = phi_.derivative(x_);
        const double y1 = d ? *d : (fp - fm) / (2.0 * h);
        const double y2 = (fp - 2.0 * phi_x_ + fm) / (h * h);
        return {y1 / s_.slope - 1.0, y2 / s_.curvature};
    }

    LiftedMobius realize(const std::array<double, 2>& u, double u0, int side) const {
        const double sgn = side >= 0 ? 1.0 : -1.0;
        return LiftedMobius::from_lift_jet(x_, phi_x_ + sgn * u0 * s_.lphi, s_.slope * (1.0 + u[0]), u[1] * s_.curvature);
    }

private:
    const CircleHomeo& phi_;
    Scales s_;
    double x_, phi_x_;
    std::vector<double> ys_;
    std::vector<double> dphi_;
    std::vector<char> in_window_;
};

EpsilonResult epsilon_impl(const CircleHomeo& phi, const Interval& interval, const EpsilonOptions& options,
                           const std::function<std::optional<MajorantData>(double)>& constructive) {
    if (!(interval.length() > 0.0)) throw Error(ErrorCode::DegenerateInterval, "epsilon needs a nondegenerate interval");
    EpsilonResult out;
    const int nx = std::max(1, options.x_grid);
    auto grid_point = [&](int i) { return interval.lo + interval.length() * (i + 1) / (nx + 1); };

    // A Moebius phi pinches itself; its defects are those of its own jet against the scales of 3I.
    std::optional<EpsilonWitness> self;
    if (const auto m = phi.mobius()) {
        for (int i = 0; i < nx; ++i) {
            EpsilonWitness w;
            w.x = grid_point(i);
            w.f_minus = w.f_plus = *m;
            w.defects_minus = w.defects_plus = jet_defects(phi, interval, *m, w.x);
            w.epsilon = *std::max_element(w.defects_plus.begin(), w.defects_plus.end());
            if (!self || w.epsilon < self->epsilon) self = w;
        }
        if (self->epsilon == 0.0) {
            out.lo = out.hi = 0.0;
            out.exact = out.certified = true;
            out.witness = *self;
            return out;
        }
    }

    std::vector<WitnessSearch> searches;
    using Optimum = WitnessSearch::Optimum;
    // Coarse search at every basepoint, then refinement at the best one.
    constexpr double kCoarseStep = 0.05;
    std::vector<std::array<Optimum, 2>> sides(static_cast<std::size_t>(nx));
    for (int i = 0; i < nx; ++i) {
        searches.emplace_back(phi, interval, grid_point(i));
    }
    std::size_t best_x = 0;
    double best_value = kInf;
    for (std::size_t i = 0; i < searches.size(); ++i) {
        const WitnessSearch& ws = searches[i];
        const auto osc = ws.osculating_seed();
        const auto data = constructive ? constructive(ws.x()) : std::nullopt;
        for (int s = 0; s < 2; ++s) {
            const int side = s == 0 ? -1 : 1;
            std::vector<std::array<double, 2>> seeds{{0.0, 0.0}, osc};
            if (data) {
                const double q = data->Q;
                seeds.push_back({data->P / (q * q) / ws.scales().slope - 1.0,
                                 side * 2.0 * data->P / (q * q * q) / ws.scales().curvature});
            }
            sides[i][s] = ws.minimize(seeds, side, false, std::max(kCoarseStep, options.rel_step), options.max_evaluations);
        }
        const double v = std::max(sides[i][0].value, sides[i][1].value);
        if (v < best_value) {
            best_value = v;
            best_x = i;
        }
    }

    for (int s = 0; s < 2; ++s) {
        Optimum& o = sides[best_x][s];
        o = searches[best_x].minimize({o.u}, s == 0 ? -1 : 1, false, options.rel_step, options.max_evaluations, o.step);
    }

    // Certify the chosen witness, raising the value offset by any certified deficit.
    const WitnessSearch& ws = searches[best_x];
    const Scales& sc = ws.scales();
    LiftedMobius maps[2];
    out.certified = true;
    for (int s = 0; s < 2; ++s) {
        const int side = s == 0 ? -1 : 1;
        const auto& u = sides[best_x][s].u;
        double u0 = ws.u0_star(u[0], u[1], side, false);
        LiftedMobius f = ws.realize(u, u0, side);
        const PinchBound b = pinch_bound(phi, f, side, ws.x() - 0.5 * kPi, ws.x() + 0.5 * kPi, ws.samples(), options.pinch);
        if (b.lower < 0.0) {
            const double bump = -b.lower * (1.0 + 1e-9) / sc.lphi;
            out.correction = std::max(out.correction, bump);
            u0 += bump;
            f = ws.realize(u, u0, side);
            out.certified = out.certified && std::isfinite(b.lower);
        }
        maps[s] = f;
    }
    out.witness.x = ws.x();
    out.witness.f_minus = maps[0];
    out.witness.f_plus = maps[1];
    out.witness.defects_minus = jet_defects(phi, interval, maps[0], ws.x());
    out.witness.defects_plus = jet_defects(phi, interval, maps[1], ws.x());
    double eps = 0.0;
    for (double d : out.witness.defects_minus) eps = std::max(eps, d);
    for (double d : out.witness.defects_plus) eps = std::max(eps, d);
    out.witness.epsilon = eps;
    if (self && self->epsilon <= eps) {
        out.witness = *self;
        out.exact = out.certified = true;
        out.correction = 0.0;
    }
    out.hi = std::min(1.0, out.witness.epsilon);

    if (options.compute_lo) {
        // Relaxation: pinching only over 3I, started from the full-period optimum so lo <= hi.
        double lo = kInf;
        for (std::size_t i = 0; i < searches.size(); ++i) {
            double v = 0.0;
            for (int s = 0; s < 2; ++s) {
                const int side = s == 0 ? -1 : 1;
                v = std::max(v, searches[i]
                                    .minimize({sides[i][s].u}, side, true, options.rel_step, options.max_evaluations)
                                    .value);
            }
            lo = std::min(lo, v);
        }
        out.lo = std::min(lo, out.hi);
    } else {
        out.lo = 0.0;
    }
    return out;
}

}  // namespace

EpsilonResult epsilon_number(const CircleHomeo& phi, const Interval& interval, const EpsilonOptions& options) {
    return epsilon_impl(phi, interval, options, nullptr);
}

EpsilonResult epsilon_number(const CircleHomeo& phi, const DyadicInterval& interval, const EpsilonOptions& options) {
    if (!options.majorant) return epsilon_impl(phi, interval.interval(), options, nullptr);
    MajorantOptions mo = *options.majorant;
    mo.strict_scale = false;
    return epsilon_impl(phi, interval.interval(), options, [&](double x) -> std::optional<MajorantData> {
        try {
            return quadratic_majorant(phi, interval, x, mo);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ScaleTooCoarse) return std::nullopt;
            throw;
        }
    });
}

double epsilon_upper(const CircleHomeo& phi, const Interval& interval, const EpsilonOptions& options) {
    EpsilonOptions o = options;
    o.compute_lo = false;
    return epsilon_number(phi, interval, o).hi;
}

EpsilonSumResult epsilon_sum(const CircleHomeo& phi, double x0, int max_depth, const SumOptions& sum_options,
                             const EpsilonOptions& options) {
    if (max_depth < 0 || max_depth > sum_options.max_depth_guard) {
        throw Error(ErrorCode::InvalidConfig, "depth outside the guard");
    }
    EpsilonSumResult out;
    std::vector<double> per_depth;
    for (int m = 0; m <= max_depth; ++m) {
        const auto count = static_cast<std::size_t>(DyadicInterval::count_at(m));
        std::vector<EpsilonResult> row(count);
        parallel_for(count, sum_options.jobs, [&](std::size_t k) {
            row[k] = epsilon_number(phi, DyadicInterval(x0, m, static_cast<long long>(k)), options);
        });
        double s = 0.0;
        for (const auto& r : row) s += r.hi * r.hi;
        per_depth.push_back(s);
        out.results.push_back(std::move(row));
    }
    out.report = summarize_sums(per_depth, sum_options);
    return out;
}

BetaEpsilonReport beta_epsilon_inequality(const CircleHomeo& phi, double x0, int min_depth, int max_depth,
                                          const EpsilonSumResult& eps) {
    BetaEpsilonReport out;
    for (int m = std::max(0, min_depth); m <= max_depth && m < static_cast<int>(eps.results.size()); ++m) {
        for (long long k = 0; k < DyadicInterval::count_at(m); ++k) {
            const IntervalStats s = interval_stats(phi, DyadicInterval(x0, m, k).interval());
            // Roundoff-level beta counts as zero, matching the default zero floor of the sums.
            if (s.beta <= 1e-12) {
                ++out.skipped;
                continue;
            }
            const double rhs = eps.results[m][k].hi + s.length * s.length + s.image_length * s.image_length;
            const double ratio = s.beta / rhs;
            ++out.used;
            if (ratio > out.K) {
                out.K = ratio;
                out.depth = m;
                out.index = k;
            }
        }
    }
    return out;
}

GronwallAudit audit_gronwall(const CircleHomeo& phi, double x0, int max_depth, double eta, int jobs) {
    const double threshold = gronwall_threshold(eta);
    std::vector<std::vector<IntervalStats>> stats;
    for (int m = 0; m <= max_depth; ++m) {
        const auto count = static_cast<std::size_t>(DyadicInterval::count_at(m));
        std::vector<IntervalStats> row(count);
        parallel_for(count, jobs, [&](std::size_t k) {
            row[k] = interval_stats(phi, DyadicInterval(x0, m, static_cast<long long>(k)).tripled());
        });
        stats.push_back(std::move(row));
    }

    GronwallAudit out;
    for (int m = 0; m <= max_depth; ++m) {
        for (long long k0 = 0; k0 < DyadicInterval::count_at(m); ++k0) {
            const IntervalStats& base = stats[m][k0];
            if (!(base.beta <= threshold)) continue;
            ++out.chains;
            const DyadicInterval I0(x0, m, k0);
            const double g0 = base.gamma;
            double sum = 0.0;
            long long k = k0;
            for (int step = 0; step <= m; ++step, k /= 2) {
                const IntervalStats& s = stats[m - step][k];
                if (!(s.beta <= threshold)) break;
                sum += s.beta;
                const double factor = std::pow(2.0, eta * (step - 1)) * sum;
                std::ostringstream what;
                what << "chain from depth " << m << " index " << k0 << " step " << step;
                out.gradient.record(le(std::abs(s.gamma - g0), 32.0 * g0 * factor), "gradient drift at " + what.str());
                const DyadicInterval Ik(x0, m - step, k);
                const double bound = 76.0 * g0 * Ik.length() * factor;
                bool ok = true;
                for (double xf : {0.0, 0.5, 1.0}) {
                    const double x = I0.lo() + xf * I0.length();
                    const Interval around = translate_to(Ik.interval(), x);
                    const double px = phi(x);
                    for (int j = 0; j <= 8; ++j) {
                        const double y = around.lo + around.length() * j / 8.0;
                        ok = ok && le(std::abs(phi(y) - px - g0 * (y - x)), bound);
                    }
                }
                out.increment.record(ok, "increment bound at " + what.str());
            }
        }
    }
    return out;
}

}  // namespace wpdiag
