#pragma once

#include <array>
#include <string>
#include <vector>

#include "wpdiag/homeo.hpp"

namespace wpdiag {

struct BestLine {
    double gamma = 0.0;
    double intercept = 0.0;
    double error = 0.0;
    // Reference points of the final exchange; residual signs alternate.
    std::array<double, 3> witnesses{};
    std::array<int, 3> signs{};

    double operator()(double x) const { return gamma * x + intercept; }
};

struct BestLineOptions {
    int grid = 257;
    double rel_tol = 1e-10;
    int max_rounds = 30;
};

// Chebyshev L-infinity affine fit of the lift over the interval.
BestLine best_linear_linf(const CircleHomeo& phi, const Interval& interval, const BestLineOptions& options = {});

double beta_number(const CircleHomeo& phi, const Interval& interval);
double gamma(const CircleHomeo& phi, const Interval& interval);
// |phi(m_I) - m_{phi(I)}| / l(phi(I)).
double qs_number(const CircleHomeo& phi, const Interval& interval);

struct IntervalStats {
    Interval interval;
    double length = 0.0;
    double image_length = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double qs = 0.0;
    double error = 0.0;
};

IntervalStats interval_stats(const CircleHomeo& phi, const Interval& interval);

enum class SumVerdict { converging, diverging };
const char* to_string(SumVerdict verdict);

struct SumOptions {
    double theta = 0.7;
    int tail = 3;
    // Depth-m sums at most zero_floor * 8^m count as zero: 2^m intervals with rounding-level
    // betas of size about 2^m u give noise growing like 8^m.
    double zero_floor = 1e-28;
    int max_depth_guard = 24;
    int jobs = 1;
};

struct SumReport {
    std::vector<double> per_depth;
    std::vector<double> cumulative;
    SumVerdict verdict = SumVerdict::converging;
    // Ratios s_{m+1} / s_m; zero where s_m vanishes.
    std::vector<double> ratios;
    // Smallest per-depth sum over the tail.
    double tail_floor = 0.0;
};

// Heuristic finite-depth verdict on per-depth sums.
SumReport summarize_sums(const std::vector<double>& per_depth, const SumOptions& options);

struct BetaSumResult {
    SumReport report;
    // stats[m][k] for beta(lambda I_{m,k}).
    std::vector<std::vector<IntervalStats>> stats;
};

// Per-depth sums of beta(lambda I)^2 over the decomposition based at x0.
BetaSumResult beta_sum(const CircleHomeo& phi, double x0, double lambda, int max_depth,
                       const SumOptions& options = {});

struct InequalityAudit {
    long long checks = 0;
    long long violations = 0;
    std::vector<std::string> failures;

    void record(bool ok, const std::string& what);
    void merge(const InequalityAudit& other);
};

// Bounds on beta, gamma, qs and image lengths over every interval of depth <= max_depth.
struct BetaAudit {
    InequalityAudit beta_below_half;
    InequalityAudit gamma_bounds;
    InequalityAudit gamma_ratio;
    InequalityAudit image_ratio;
    InequalityAudit restriction;
    InequalityAudit qs;
};

BetaAudit audit_beta_inequalities(const CircleHomeo& phi, double x0, int max_depth, int jobs = 1);

}  // namespace wpdiag
