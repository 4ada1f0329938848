#include "wpdiag/beta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wpdiag/errors.hpp"
#include "wpdiag/parallel.hpp"

namespace wpdiag {

namespace {

// Slack for floating-point ties in monitored inequalities.
constexpr double kRoundoff = 1e-12;

struct Line {
    double gamma = 0.0, delta = 0.0, h = 0.0;
};

Line solve_reference(const std::vector<double>& u, const std::vector<double>& f, const std::array<std::size_t, 3>& ref) {
    const double u0 = u[ref[0]], u1 = u[ref[1]], u2 = u[ref[2]];
    const double f0 = f[ref[0]], f1 = f[ref[1]], f2 = f[ref[2]];
    Line line;
    line.gamma = (f2 - f0) / (u2 - u0);
    const double e0 = f0 - line.gamma * u0, e1 = f1 - line.gamma * u1;
    line.delta = 0.5 * (e0 + e1);
    line.h = 0.5 * (e0 - e1);
    return line;
}

int sign_of(double v) { return v < 0.0 ? -1 : 1; }

// Discrete Chebyshev fit by single-point exchange on sorted abscissae.
// Residuals below `floor` are treated as roundoff.
Line exchange(const std::vector<double>& u, const std::vector<double>& f, std::array<std::size_t, 3>& ref, double floor) {
    Line line = solve_reference(u, f, ref);
    for (int iter = 0; iter < 500; ++iter) {
        std::size_t j = 0;
        double worst = -1.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double r = std::abs(f[i] - line.gamma * u[i] - line.delta);
            if (r > worst) {
                worst = r;
                j = i;
            }
        }
        if (worst <= std::abs(line.h) * (1.0 + 1e-15) + floor) break;
        const int sh = sign_of(line.h);
        const int sj = sign_of(f[j] - line.gamma * u[j] - line.delta);
        const int s0 = sh, s1 = -sh, s2 = sh;
        if (j < ref[0]) {
            if (sj == s0) {
                ref[0] = j;
            } else {
                ref = {j, ref[0], ref[1]};
            }
        } else if (j > ref[2]) {
            if (sj == s2) {
                ref[2] = j;
            } else {
                ref = {ref[1], ref[2], j};
            }
        } else if (j < ref[1]) {
            (sj == s0 ? ref[0] : ref[1]) = j;
        } else {
            (sj == s1 ? ref[1] : ref[2]) = j;
        }
        line = solve_reference(u, f, ref);
    }
    return line;
}

}  // namespace

BestLine best_linear_linf(const CircleHomeo& phi, const Interval& interval, const BestLineOptions& options) {
    if (!(interval.length() > 0.0)) throw Error(ErrorCode::DegenerateInterval, "best line needs a nondegenerate interval");
    const double c = interval.mid();
    const double fc = phi(c);
    auto value = [&](double uu) { return phi(c + uu) - fc; };

    std::vector<double> u;
    const int n = std::max(3, options.grid);
    for (int i = 0; i < n; ++i) {
        u.push_back(i + 1 == n ? interval.hi - c : interval.lo - c + interval.length() * i / (n - 1));
    }
    for (double k : phi.kinks()) {
        for (double x = k + kPi * std::ceil((interval.lo - k) / kPi); x < interval.hi; x += kPi) {
            if (x > interval.lo) u.push_back(x - c);
        }
    }
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    std::vector<double> f(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) f[i] = value(u[i]);

    double scale = std::abs(fc) + std::abs(c);
    for (double v : f) scale = std::max(scale, std::abs(v));
    const double floor = 16.0 * std::numeric_limits<double>::epsilon() * scale;

    std::array<std::size_t, 3> ref{0, u.size() / 2, u.size() - 1};
    Line line = exchange(u, f, ref, floor);
    double error = std::abs(line.h);

    for (int round = 0; round < options.max_rounds; ++round) {
        auto resid = [&](double uu, double fu) { return fu - line.gamma * uu - line.delta; };
        std::vector<double> r(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) r[i] = resid(u[i], f[i]);
        const double h = std::abs(line.h);
        std::vector<std::pair<double, double>> added;
        double continuum = h;
        for (std::size_t i = 1; i + 1 < u.size(); ++i) {
            const double ai = std::abs(r[i]);
            if (ai < 0.5 * h || ai < floor || ai < std::abs(r[i - 1]) || ai < std::abs(r[i + 1])) continue;
            const int s = sign_of(r[i]);
            // Golden-section maximisation of s * residual on the bracket.
            double a = u[i - 1], b = u[i + 1];
            const double g = 0.5 * (std::sqrt(5.0) - 1.0);
            double x1 = b - g * (b - a), x2 = a + g * (b - a);
            double v1 = s * resid(x1, value(x1)), v2 = s * resid(x2, value(x2));
            for (int it = 0; it < 80 && b - a > 1e-13 * interval.length(); ++it) {
                if (v1 < v2) {
                    a = x1;
                    x1 = x2;
                    v1 = v2;
                    x2 = a + g * (b - a);
                    v2 = s * resid(x2, value(x2));
                } else {
                    b = x2;
                    x2 = x1;
                    v2 = v1;
                    x1 = b - g * (b - a);
                    v1 = s * resid(x1, value(x1));
                }
            }
            const double xb = v1 > v2 ? x1 : x2;
            const double fb = value(xb);
            const double rb = std::abs(resid(xb, fb));
            continuum = std::max(continuum, rb);
            if (rb > h * (1.0 + options.rel_tol) + floor) added.emplace_back(xb, fb);
        }
        error = continuum;
        if (added.empty()) break;
        const std::array<double, 3> ref_u{u[ref[0]], u[ref[1]], u[ref[2]]};
        for (const auto& [x, fx] : added) {
            const auto it = std::lower_bound(u.begin(), u.end(), x);
            const auto pos = it - u.begin();
            if (it != u.end() && *it == x) continue;
            u.insert(it, x);
            f.insert(f.begin() + pos, fx);
        }
        for (int q = 0; q < 3; ++q) ref[q] = static_cast<std::size_t>(std::lower_bound(u.begin(), u.end(), ref_u[q]) - u.begin());
        line = exchange(u, f, ref, floor);
        error = std::abs(line.h);
    }

    BestLine out;
    out.gamma = line.gamma;
    out.intercept = line.delta + fc - line.gamma * c;
    out.error = error;
    for (int q = 0; q < 3; ++q) {
        out.witnesses[q] = u[ref[q]] + c;
        out.signs[q] = sign_of(f[ref[q]] - line.gamma * u[ref[q]] - line.delta);
    }
    return out;
}

double beta_number(const CircleHomeo& phi, const Interval& interval) { return interval_stats(phi, interval).beta; }

double gamma(const CircleHomeo& phi, const Interval& interval) { return best_linear_linf(phi, interval).gamma; }

double qs_number(const CircleHomeo& phi, const Interval& interval) { return interval_stats(phi, interval).qs; }

IntervalStats interval_stats(const CircleHomeo& phi, const Interval& interval) {
    const BestLine line = best_linear_linf(phi, interval);
    IntervalStats s;
    s.interval = interval;
    s.length = interval.length();
    const double lo = phi(interval.lo), hi = phi(interval.hi);
    s.image_length = hi - lo;
    s.error = line.error;
    s.beta = line.error / s.image_length;
    s.gamma = line.gamma;
    s.qs = std::abs(phi(interval.mid()) - 0.5 * (lo + hi)) / s.image_length;
    return s;
}

const char* to_string(SumVerdict verdict) { return verdict == SumVerdict::converging ? "converging" : "diverging"; }

SumReport summarize_sums(const std::vector<double>& per_depth, const SumOptions& options) {
    SumReport r;
    r.per_depth = per_depth;
    double acc = 0.0;
    for (double s : per_depth) {
        acc += s;
        r.cumulative.push_back(acc);
    }
    for (std::size_t m = 1; m < per_depth.size(); ++m) {
        r.ratios.push_back(per_depth[m - 1] > 0.0 ? per_depth[m] / per_depth[m - 1] : 0.0);
    }
    const std::size_t tail = static_cast<std::size_t>(std::max(1, options.tail));
    const std::size_t n = per_depth.size();
    r.tail_floor = n ? per_depth.back() : 0.0;
    bool all_zero = true;
    for (std::size_t m = n >= tail ? n - tail : 0; m < n; ++m) {
        r.tail_floor = std::min(r.tail_floor, per_depth[m]);
        if (per_depth[m] > std::ldexp(options.zero_floor, 3 * static_cast<int>(m))) all_zero = false;
    }
    bool geometric = r.ratios.size() >= tail;
    for (std::size_t i = r.ratios.size() >= tail ? r.ratios.size() - tail : 0; geometric && i < r.ratios.size(); ++i) {
        if (!(r.ratios[i] < options.theta)) geometric = false;
    }
    r.verdict = (all_zero || geometric) ? SumVerdict::converging : SumVerdict::diverging;
    return r;
}

BetaSumResult beta_sum(const CircleHomeo& phi, double x0, double lambda, int max_depth, const SumOptions& options) {
    if (max_depth < 0 || max_depth > options.max_depth_guard) throw Error(ErrorCode::InvalidConfig, "depth outside the guard");
    if (!(lambda >= 1.0)) throw Error(ErrorCode::InvalidConfig, "multiplier must be >= 1");
    BetaSumResult out;
    std::vector<double> per_depth;
    for (int m = 0; m <= max_depth; ++m) {
        const auto count = static_cast<std::size_t>(DyadicInterval::count_at(m));
        std::vector<IntervalStats> row(count);
        parallel_for(count, options.jobs, [&](std::size_t k) {
            const DyadicInterval I(x0, m, static_cast<long long>(k));
            row[k] = interval_stats(phi, scale(I.interval(), lambda));
        });
        double s = 0.0;
        for (const auto& st : row) s += st.beta * st.beta;
        per_depth.push_back(s);
        out.stats.push_back(std::move(row));
    }
    out.report = summarize_sums(per_depth, options);
    return out;
}

void InequalityAudit::record(bool ok, const std::string& what) {
    ++checks;
    if (!ok) {
        ++violations;
        if (failures.size() < 20) failures.push_back(what);
    }
}

void InequalityAudit::merge(const InequalityAudit& other) {
    checks += other.checks;
    violations += other.violations;
    for (const auto& f : other.failures) {
        if (failures.size() < 20) failures.push_back(f);
    }
}

namespace {

bool le(double a, double b) { return a <= b + kRoundoff * std::max({1.0, std::abs(a), std::abs(b)}); }

std::string describe(const char* what, int m, long long k) {
    std::ostringstream os;
    os << what << " at depth " << m << " index " << k;
    return os.str();
}

void check_single(BetaAudit& a, const IntervalStats& s, int m, long long k) {
    a.beta_below_half.record(s.beta < 0.5, describe("beta >= 1/2", m, k));
    const double ratio = s.image_length / s.length;
    a.gamma_bounds.record(le((1.0 - 2.0 * s.beta) * ratio, s.gamma) && le(s.gamma, (1.0 + 2.0 * s.beta) * ratio),
                          describe("gradient outside (1 +- 2 beta) l(phi I)/l(I)", m, k));
    a.qs.record(le(s.qs, 2.0 * s.beta), describe("qs > 2 beta", m, k));
}

// I inside I' with l(I') <= lambda l(I).
void check_nested(BetaAudit& a, const IntervalStats& small, const IntervalStats& big, double lambda, int m, long long k) {
    if (big.beta <= 0.25) {
        a.gamma_ratio.record(le(std::abs(small.gamma / big.gamma - 1.0), 8.0 * lambda * big.beta),
                             describe("gradient ratio bound", m, k));
    }
    if (big.beta <= 1.0 / (16.0 * lambda)) {
        a.image_ratio.record(le(big.image_length, 4.0 * lambda * small.image_length), describe("image length ratio bound", m, k));
    }
}

}  // namespace

BetaAudit audit_beta_inequalities(const CircleHomeo& phi, double x0, int max_depth, int jobs) {
    std::vector<std::vector<IntervalStats>> plain, tripled;
    for (int m = 0; m <= max_depth; ++m) {
        const auto count = static_cast<std::size_t>(DyadicInterval::count_at(m));
        std::vector<IntervalStats> p(count), t(count);
        parallel_for(count, jobs, [&](std::size_t k) {
            const DyadicInterval I(x0, m, static_cast<long long>(k));
            p[k] = interval_stats(phi, I.interval());
            t[k] = interval_stats(phi, I.tripled());
        });
        plain.push_back(std::move(p));
        tripled.push_back(std::move(t));
    }
    BetaAudit a;
    for (int m = 0; m <= max_depth; ++m) {
        for (long long k = 0; k < DyadicInterval::count_at(m); ++k) {
            const auto& p = plain[m][k];
            const auto& t = tripled[m][k];
            check_single(a, p, m, k);
            check_single(a, t, m, k);
            check_nested(a, p, t, 3.0, m, k);
            a.restriction.record(le(p.error, t.error), describe("restriction of the minimum increased", m, k));
            if (m > 0) {
                const auto& pp = plain[m - 1][k / 2];
                const auto& tp = tripled[m - 1][k / 2];
                check_nested(a, p, pp, 2.0, m, k);
                check_nested(a, t, tp, 2.0, m, k);
                check_nested(a, p, tp, 6.0, m, k);
            }
        }
    }
    return a;
}

}  // namespace wpdiag
