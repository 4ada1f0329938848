#include <algorithm>
#include <cmath>
#include <complex>

#include "wpdiag/errors.hpp"
#include "wpdiag/homeo.hpp"

namespace wpdiag {

namespace {

constexpr int kNodesPerPanel = 8;

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

GaussRule gauss_legendre(int n) {
    GaussRule rule;
    for (int i = 1; i <= n; ++i) {
        double x = std::cos(kPi * (i - 0.25) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double step = p1 / dp;
            x -= step;
            if (std::abs(step) < 1e-16) break;
        }
        rule.nodes.push_back(x);
        rule.weights.push_back(2.0 / ((1.0 - x * x) * dp * dp));
    }
    return rule;
}

struct Samples {
    std::vector<double> x;
    std::vector<double> w;
};

Samples quadrature_grid(const CircleHomeo& phi, int k_max) {
    std::vector<double> cuts{0.0, kPi};
    for (double k : phi.kinks()) {
        if (k > 0.0 && k < kPi) cuts.push_back(k);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    const GaussRule rule = gauss_legendre(kNodesPerPanel);
    const double max_panel = kPi / (4.0 * k_max);
    Samples s;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        if (b - a <= 0.0) continue;
        const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / max_panel)));
        const double h = (b - a) / panels;
        for (int p = 0; p < panels; ++p) {
            const double lo = a + p * h;
            for (int j = 0; j < kNodesPerPanel; ++j) {
                s.x.push_back(lo + 0.5 * h * (rule.nodes[j] + 1.0));
                s.w.push_back(0.5 * h * rule.weights[j]);
            }
        }
    }
    return s;
}

std::vector<double> log_derivative(const CircleHomeo& phi, const std::vector<double>& xs, double step) {
    std::vector<double> g(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double d;
        if (step > 0.0) {
            d = (phi(xs[i] + step) - phi(xs[i] - step)) / (2.0 * step);
        } else {
            d = *phi.derivative(xs[i]);
        }
        if (!(d > 0.0) || !std::isfinite(d)) {
            throw Error(ErrorCode::NonAbsolutelyContinuous, "derivative not positive and finite");
        }
        g[i] = std::log(d);
    }
    return g;
}

std::vector<std::complex<double>> coefficients(const Samples& s, const std::vector<double>& g, int K) {
    std::vector<std::complex<double>> out(K);
    std::vector<std::complex<double>> power(s.x.size(), {1.0, 0.0});
    std::vector<std::complex<double>> base(s.x.size());
    for (std::size_t j = 0; j < s.x.size(); ++j) base[j] = std::polar(1.0, -2.0 * s.x[j]);
    for (int k = 1; k <= K; ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t j = 0; j < s.x.size(); ++j) {
            power[j] *= base[j];
            acc += (s.w[j] * g[j]) * power[j];
        }
        out[k - 1] = acc / kPi;
    }
    return out;
}

double partial_sum(const std::vector<std::complex<double>>& c, int K) {
    double s = 0.0;
    for (int k = 1; k <= K; ++k) s += 2.0 * k * std::norm(c[k - 1]);
    return s;
}

std::vector<std::complex<double>> compute_coefficients(const CircleHomeo& phi, int K) {
    const Samples s = quadrature_grid(phi, K);
    if (phi.derivative(0.5)) return coefficients(s, log_derivative(phi, s.x, 0.0), K);
    // Difference quotients, accepted only if a finer step reproduces the partial sums.
    const double step = 1e-7;
    const auto coarse = coefficients(s, log_derivative(phi, s.x, step), K);
    const auto fine = coefficients(s, log_derivative(phi, s.x, step / 8.0), K);
    const double a = partial_sum(coarse, K), b = partial_sum(fine, K);
    if (std::abs(a - b) > 1e-6 * std::max(1.0, std::abs(b))) {
        throw Error(ErrorCode::NonAbsolutelyContinuous, "difference quotients do not stabilise under refinement");
    }
    return fine;
}

}  // namespace

const char* to_string(SeminormVerdict verdict) {
    return verdict == SeminormVerdict::converged ? "converged" : "diverging";
}

std::vector<std::pair<double, double>> log_derivative_coefficients(const CircleHomeo& phi, int K) {
    std::vector<std::pair<double, double>> out;
    for (const auto& c : compute_coefficients(phi, K)) out.emplace_back(c.real(), c.imag());
    return out;
}

HHalfResult h_half_seminorm(const CircleHomeo& phi, const HHalfOptions& options) {
    const int k_max = options.k_start << options.doublings;
    const auto c = compute_coefficients(phi, k_max);
    HHalfResult r;
    for (int K = options.k_start; K <= k_max; K *= 2) {
        r.K.push_back(K);
        r.S.push_back(partial_sum(c, K));
    }
    const std::size_t n = r.S.size();
    r.value = r.S.back();

    const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(options.regression_window), n);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = n - w; i < n; ++i) {
        const double x = std::log2(static_cast<double>(r.K[i]));
        sx += x;
        sy += r.S[i];
        sxx += x * x;
        sxy += x * r.S[i];
    }
    const double denom = w * sxx - sx * sx;
    r.growth_per_doubling = denom > 0.0 ? (w * sxy - sx * sy) / denom : 0.0;

    bool converged = r.value <= options.zero_floor;
    if (!converged && n >= 4) {
        converged = true;
        for (std::size_t i = n - 3; i < n; ++i) {
            if (std::abs(r.S[i] - r.S[i - 1]) >= options.tol * r.S[i]) converged = false;
        }
    }
    r.verdict = converged ? SeminormVerdict::converged : SeminormVerdict::diverging;
    return r;
}

}  // namespace wpdiag
