#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "wpdiag/beta.hpp"
#include "wpdiag/epsilon.hpp"
#include "wpdiag/homeo.hpp"

namespace wpdiag {

struct RunConfig {
    std::string homeo = "trig:0.3";
    std::vector<double> bases{0.0, kPi / 3.0, -kPi / 3.0};
    // Beta sums use beta(mult I); epsilon is always normalized with 3I.
    double mult = 3.0;
    int depth = 12;
    double eta = 0.5;
    SumOptions sums;
    HHalfOptions hhalf;
    // Epsilon lower estimates roughly double the epsilon cost and do not enter any verdict.
    bool epsilon_lo = false;
    // Depth cap of the inequality audits.
    int audit_depth = 10;
    // Empty: compute only.
    std::string out;
    // "csv" or "json".
    std::string format = "csv";
    int jobs = 1;

    // Throws InvalidConfig.
    void validate() const;
};

enum class Classification { wp_consistent, non_wp_consistent, inconclusive };
const char* to_string(Classification c);

struct RunResult {
    std::string tag;
    std::vector<BetaSumResult> beta;
    SumVerdict beta_verdict = SumVerdict::converging;
    EpsilonSumResult epsilon;
    SumVerdict epsilon_verdict = SumVerdict::converging;
    HHalfResult hhalf;
    DeltaScan delta;
    BetaEpsilonReport beta_epsilon;
    BetaAudit audit;
    GronwallAudit gronwall;
    Classification classification = Classification::inconclusive;
    // Diagnostic disagreeing with the other two, or the missing ones.
    std::string dissent;
    // One-line summary.
    std::string line;
    // Failed stages; their outputs are absent and the run is partial.
    std::vector<std::string> errors;
    std::vector<std::string> files;
};

// Runs the beta, epsilon and H^{1/2} diagnostics and the audits; writes the report files when config.out is set.
RunResult run_diagnostics(const RunConfig& config);

// Figure data for the configured homeomorphism: Penrose-chart graphs, boundary rectangles,
// one normalized interval and the limiting domain.
nlohmann::ordered_json figure_data(const RunConfig& config);
// Writes figures.json into config.out and returns its path.
std::string emit_figures(const RunConfig& config);

// Default classification zoo.
std::vector<std::string> zoo_specs();

}  // namespace wpdiag
