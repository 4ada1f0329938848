#pragma once

#include <array>
#include <optional>
#include <vector>

#include "wpdiag/beta.hpp"
#include "wpdiag/homeo.hpp"

namespace wpdiag {

// Normalized jet defects of f at x: value / l(phi 3I), slope / (l(phi 3I) / l(3I)),
// curvature / (l(phi 3I) / l(3I)^2).
std::array<double, 3> jet_defects(const CircleHomeo& phi, const Interval& interval, const LiftedMobius& f, double x);

// Certified lower bound of side * (f - phi) over [lo, hi], by adaptive bisection.
struct PinchBound {
    // Lower bound valid on the whole window.
    double lower = 0.0;
    // Smallest sampled value and where it occurs.
    double sampled_min = 0.0;
    double argmin = 0.0;
    // True when the bound is nonnegative.
    bool certified = false;
    int cells = 0;
};

struct PinchOptions {
    int max_cells = 4000;
    // Cells narrower than this are not split further.
    double min_cell = 1e-13;
};

// side = +1 checks f >= phi, side = -1 checks f <= phi.
PinchBound pinch_bound(const CircleHomeo& phi, const LiftedMobius& f, int side, double lo, double hi,
                       const std::vector<double>& seeds = {}, const PinchOptions& options = {});

struct EpsilonWitness {
    double x = 0.0;
    LiftedMobius f_minus;
    LiftedMobius f_plus;
    // Realized epsilon: the largest of the six defects.
    double epsilon = 0.0;
    std::array<double, 3> defects_minus{};
    std::array<double, 3> defects_plus{};
};

struct Feasibility {
    bool feasible = false;
    // Smallest of eps - defect and the normalized pinching bounds; negative when infeasible.
    double margin = 0.0;
    // Point of the worst pinching bound.
    double worst_at = 0.0;
    // Pinching certified by bisection.
    bool certified = false;
};

// Checks the jet inequalities at x exactly and the pinching over one period of the lift.
// Throws LiftMismatch when a lift is not within pi/2 of phi at x.
Feasibility witness_feasible(const CircleHomeo& phi, const Interval& interval, const EpsilonWitness& w, double eps,
                             const PinchOptions& options = {});

// (2^eta - 1) / 32.
double gronwall_threshold(double eta);
// 256 C1 / (1 - 2^{eta - 1}) with C1 = 76 / 2^eta.
double majorant_constant(double eta);

struct DeltaScan {
    bool found = false;
    // Smallest depth from which every tripled interval satisfies the threshold.
    int depth = 0;
    double delta = 0.0;
    double worst_beta_above = 0.0;
};

// delta = pi 2^{1 - m*} / 24, so that l(J) < 24 delta exactly for depths >= m*.
DeltaScan scan_delta(const CircleHomeo& phi, double x0, int max_depth, double eta, int jobs = 1);

struct MajorantOptions {
    double eta = 0.5;
    // Defaults to scan_delta up to the interval's depth.
    std::optional<double> delta;
    // Enforce l(I) < delta^4; off, only the beta threshold on the chain is enforced.
    bool strict_scale = true;
};

struct MajorantData {
    double P = 0.0, Q = 0.0, R = 0.0;
    double eta = 0.5, delta = 0.0, C = 0.0;
    double x = 0.0;
    double phi_x = 0.0;
    // Statistics of 3I.
    double gamma = 0.0, beta = 0.0, image_length = 0.0, length = 0.0;
    // Number of J in the 1/Q sum.
    int chain_length = 0;

    // phi(x) + gamma (y - x) + 2 beta l(phi 3I) + gamma (y - x)^2 / (16 Q).
    double p(double y) const;
    Interval window() const { return {x - 5.0 * Q, x + 3.0 * Q}; }
};

// Throws ScaleTooCoarse when the smallness hypotheses fail.
MajorantData quadratic_majorant(const CircleHomeo& phi, const DyadicInterval& interval, double x,
                                const MajorantOptions& options = {});

struct MajorantCheck {
    // Certified lower bound of the gap; margin >= 0 proves the majorant property.
    double margin = 0.0;
    double sampled_min = 0.0;
    double argmin = 0.0;
    bool certified = false;
};

// p - phi on [x - 5Q, x + 3Q].
MajorantCheck verify_quadratic(const CircleHomeo& phi, const MajorantData& data, const PinchOptions& options = {});

// Moebius map with jet (phi(x) + side (P/Q - R), P/Q^2, side 2P/Q^3) at x.
LiftedMobius fractional_jet_map(const MajorantData& data, int side);
// side * (f - phi) over one period centered at x.
MajorantCheck verify_fractional(const CircleHomeo& phi, const MajorantData& data, const LiftedMobius& f, int side,
                                const PinchOptions& options = {});
// fractional_jet_map, throwing PinchFailure when a sampled point violates the pinching.
LiftedMobius fractional_majorant(const CircleHomeo& phi, const MajorantData& data, int side = 1);

// P / (Q - t) - P / Q and P t / Q^2 + P t^2 / (8 Q^3).
double fractional_tilde(double P, double Q, double t);
double quadratic_tilde(double P, double Q, double t);
// P t^2 (t + 7Q) / (8 Q^3 (Q - t)).
double fractional_gap(double P, double Q, double t);

struct EpsilonOptions {
    // Basepoints at (i + 1) / (x_grid + 1) of I.
    int x_grid = 3;
    bool compute_lo = true;
    // Pattern-search stopping step relative to the current epsilon.
    double rel_step = 1e-3;
    int max_evaluations = 400;
    // Adds the constructive witness as a seed (dyadic overload only).
    std::optional<MajorantOptions> majorant;
    PinchOptions pinch;
};

struct EpsilonResult {
    double lo = 0.0;
    double hi = 1.0;
    EpsilonWitness witness;
    // Moebius input whose best witness is phi itself.
    bool exact = false;
    // Pinching of the witness certified by bisection.
    bool certified = false;
    // Upward correction applied to the value defect by certification.
    double correction = 0.0;
};

// [lo, hi] with hi the realized epsilon of a certified witness, capped at 1.
EpsilonResult epsilon_number(const CircleHomeo& phi, const Interval& interval, const EpsilonOptions& options = {});
EpsilonResult epsilon_number(const CircleHomeo& phi, const DyadicInterval& interval, const EpsilonOptions& options = {});
double epsilon_upper(const CircleHomeo& phi, const Interval& interval, const EpsilonOptions& options = {});

struct EpsilonSumResult {
    SumReport report;
    // results[m][k] for I_{m,k}.
    std::vector<std::vector<EpsilonResult>> results;
};

EpsilonSumResult epsilon_sum(const CircleHomeo& phi, double x0, int max_depth, const SumOptions& sum_options = {},
                             const EpsilonOptions& options = {});

struct BetaEpsilonReport {
    // Smallest K with beta(I) <= K (hi(I) + l(I)^2 + l(phi I)^2) over the used intervals.
    double K = 0.0;
    int depth = -1;
    long long index = -1;
    long long used = 0;
    // Intervals with beta at roundoff level (<= 1e-12), where the ratio is vacuous.
    long long skipped = 0;
};

BetaEpsilonReport beta_epsilon_inequality(const CircleHomeo& phi, double x0, int min_depth, int max_depth,
                                          const EpsilonSumResult& eps);

struct GronwallAudit {
    // |gamma(3I_k) - gamma(3I_0)| <= 32 gamma(3I_0) 2^{eta(k-1)} sum beta.
    InequalityAudit gradient;
    // |phi(y) - phi(x) - gamma(3I_0)(y - x)| <= 76 gamma(3I_0) l(I_k) 2^{eta(k-1)} sum beta.
    InequalityAudit increment;
    long long chains = 0;
};

// Every interval of depth <= max_depth starts a chain, truncated where the beta threshold fails.
GronwallAudit audit_gronwall(const CircleHomeo& phi, double x0, int max_depth, double eta, int jobs = 1);

}  // namespace wpdiag
