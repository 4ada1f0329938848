#include "wpdiag/run.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>

#include "wpdiag/adsgeom.hpp"
#include "wpdiag/charts.hpp"
#include "wpdiag/errors.hpp"
#include "wpdiag/report.hpp"
#include "wpdiag/spec_parser.hpp"

namespace wpdiag {

using ojson = nlohmann::ordered_json;

void RunConfig::validate() const {
    if (bases.empty()) throw Error(ErrorCode::InvalidConfig, "at least one base is required");
    if (!(mult >= 1.0)) throw Error(ErrorCode::InvalidConfig, "multiplier must be >= 1");
    if (depth < 0 || depth > sums.max_depth_guard) throw Error(ErrorCode::InvalidConfig, "depth outside the guard");
    if (!(eta > 0.0 && eta < 1.0)) throw Error(ErrorCode::InvalidConfig, "eta must lie in (0, 1)");
    if (format != "csv" && format != "json") throw Error(ErrorCode::InvalidConfig, "format must be csv or json");
    if (jobs < 1) throw Error(ErrorCode::InvalidConfig, "jobs must be positive");
    if (audit_depth < 0) throw Error(ErrorCode::InvalidConfig, "audit depth must be nonnegative");
}

const char* to_string(Classification c) {
    switch (c) {
    case Classification::wp_consistent: return "WP-consistent";
    case Classification::non_wp_consistent: return "non-WP-consistent";
    case Classification::inconclusive: return "inconclusive";
    }
    return "unknown";
}

std::vector<std::string> zoo_specs() {
    return {"rot:0.5", "mobius:2,0.5,0.3,0.575", "trig:0.1", "trig:0.3", "pwl:;1.5,0.5"};
}

namespace {

void stage(RunResult& r, const char* name, bool& ok, const std::function<void()>& fn) {
    try {
        fn();
        ok = true;
    } catch (const std::exception& e) {
        r.errors.push_back(std::string(name) + ": " + e.what());
        ok = false;
    }
}

void classify(RunResult& r, bool beta_ok, bool eps_ok, bool hhalf_ok) {
    const char* names[3] = {"beta-sum", "epsilon-sum", "H^{1/2}"};
    const bool present[3] = {beta_ok, eps_ok, hhalf_ok};
    const bool conv[3] = {r.beta_verdict == SumVerdict::converging, r.epsilon_verdict == SumVerdict::converging,
                          r.hhalf.verdict == SeminormVerdict::converged};
    std::string missing;
    int converging = 0;
    for (int i = 0; i < 3; ++i) {
        if (!present[i]) missing += std::string(missing.empty() ? "" : ", ") + names[i];
        converging += present[i] && conv[i];
    }
    if (!missing.empty()) {
        r.classification = Classification::inconclusive;
        r.dissent = "missing: " + missing;
    } else if (converging == 3) {
        r.classification = Classification::wp_consistent;
    } else if (converging == 0) {
        r.classification = Classification::non_wp_consistent;
    } else {
        r.classification = Classification::inconclusive;
        // The minority verdict dissents.
        const bool minority = converging == 1;
        for (int i = 0; i < 3; ++i) {
            if (conv[i] == minority) r.dissent = names[i];
        }
    }
    r.line = r.tag + ": " + to_string(r.classification) + " (beta-sum " +
             (beta_ok ? to_string(r.beta_verdict) : "n/a") + ", epsilon-sum " +
             (eps_ok ? to_string(r.epsilon_verdict) : "n/a") + ", H^{1/2} " +
             (hhalf_ok ? to_string(r.hhalf.verdict) : "n/a") + ")";
    if (!r.dissent.empty()) r.line += "; dissent: " + r.dissent;
}

Table beta_table(const RunConfig& c, const RunResult& r) {
    Table t{{"base", "depth", "index", "lo", "hi", "length", "image_length", "beta", "gamma", "qs"}, {}};
    for (std::size_t b = 0; b < r.beta.size(); ++b) {
        for (std::size_t m = 0; m < r.beta[b].stats.size(); ++m) {
            for (std::size_t k = 0; k < r.beta[b].stats[m].size(); ++k) {
                const IntervalStats& s = r.beta[b].stats[m][k];
                t.add({c.bases[b], static_cast<long long>(m), static_cast<long long>(k), s.interval.lo, s.interval.hi,
                       s.length, s.image_length, s.beta, s.gamma, s.qs});
            }
        }
    }
    return t;
}

Table epsilon_table(const RunConfig& c, const RunResult& r) {
    Table t{{"depth", "index", "lo", "hi", "x", "eps_lo", "eps_hi", "certified", "exact", "correction"}, {}};
    for (std::size_t m = 0; m < r.epsilon.results.size(); ++m) {
        for (std::size_t k = 0; k < r.epsilon.results[m].size(); ++k) {
            const EpsilonResult& e = r.epsilon.results[m][k];
            const DyadicInterval I(c.bases[0], static_cast<int>(m), static_cast<long long>(k));
            t.add({static_cast<long long>(m), static_cast<long long>(k), I.lo(), I.hi(), e.witness.x, e.lo, e.hi,
                   e.certified, e.exact, e.correction});
        }
    }
    return t;
}

void add_sums(Table& t, const std::string& name, double base, const SumReport& s) {
    for (std::size_t m = 0; m < s.per_depth.size(); ++m) {
        t.add({name, base, static_cast<long long>(m), s.per_depth[m], s.cumulative[m],
               m == 0 ? ojson() : ojson(s.ratios[m - 1])});
    }
}

Table sums_table(const RunConfig& c, const RunResult& r) {
    Table t{{"diagnostic", "base", "depth", "sum", "cumulative", "ratio"}, {}};
    for (std::size_t b = 0; b < r.beta.size(); ++b) add_sums(t, "beta", c.bases[b], r.beta[b].report);
    if (!r.epsilon.report.per_depth.empty()) add_sums(t, "epsilon", c.bases[0], r.epsilon.report);
    return t;
}

Table hhalf_table(const RunResult& r) {
    Table t{{"K", "S"}, {}};
    for (std::size_t i = 0; i < r.hhalf.K.size(); ++i) t.add({static_cast<long long>(r.hhalf.K[i]), r.hhalf.S[i]});
    return t;
}

Table constants_table(const RunResult& r) {
    Table t{{"name", "value"}, {}};
    t.add({"beta_epsilon_K", r.beta_epsilon.K});
    t.add({"beta_epsilon_K_depth", static_cast<long long>(r.beta_epsilon.depth)});
    t.add({"beta_epsilon_K_index", r.beta_epsilon.index});
    t.add({"beta_epsilon_used", r.beta_epsilon.used});
    t.add({"beta_epsilon_skipped", r.beta_epsilon.skipped});
    t.add({"delta_found", r.delta.found});
    t.add({"delta_depth", static_cast<long long>(r.delta.depth)});
    t.add({"delta", r.delta.delta});
    t.add({"hhalf_value", r.hhalf.value});
    t.add({"hhalf_growth_per_doubling", r.hhalf.growth_per_doubling});
    const std::pair<const char*, const InequalityAudit*> audits[] = {
        {"beta_below_half", &r.audit.beta_below_half}, {"gamma_bounds", &r.audit.gamma_bounds},
        {"gamma_ratio", &r.audit.gamma_ratio},         {"image_ratio", &r.audit.image_ratio},
        {"restriction", &r.audit.restriction},         {"qs", &r.audit.qs},
        {"gronwall_gradient", &r.gronwall.gradient},   {"gronwall_increment", &r.gronwall.increment}};
    for (const auto& [name, a] : audits) {
        t.add({std::string(name) + "_checks", a->checks});
        t.add({std::string(name) + "_violations", a->violations});
    }
    return t;
}

std::string summary_text(const RunResult& r) {
    std::string s = r.line + "\n";
    if (!r.errors.empty()) {
        s += "partial: yes\n";
        for (const std::string& e : r.errors) s += "error: " + e + "\n";
    } else {
        s += "partial: no\n";
    }
    return s;
}

void write_outputs(const RunConfig& c, RunResult& r) {
    std::filesystem::create_directories(c.out);
    const std::filesystem::path dir(c.out);
    const std::vector<std::pair<std::string, Table>> tables{{"beta_intervals", beta_table(c, r)},
                                                            {"epsilon_intervals", epsilon_table(c, r)},
                                                            {"sums", sums_table(c, r)},
                                                            {"hhalf", hhalf_table(r)},
                                                            {"constants", constants_table(r)}};
    if (c.format == "csv") {
        for (const auto& [name, table] : tables) {
            const std::string path = (dir / (name + ".csv")).string();
            write_text_file(path, to_csv(table));
            r.files.push_back(path);
        }
        const std::string path = (dir / "summary.txt").string();
        write_text_file(path, summary_text(r));
        r.files.push_back(path);
        return;
    }
    ojson doc;
    doc["homeo"] = r.tag;
    doc["classification"] = to_string(r.classification);
    doc["dissent"] = r.dissent;
    doc["summary"] = r.line;
    doc["partial"] = !r.errors.empty();
    doc["errors"] = r.errors;
    for (const auto& [name, table] : tables) doc[name] = to_json(table);
    const std::string path = (dir / "run.json").string();
    write_text_file(path, doc.dump(1) + "\n");
    r.files.push_back(path);
}

ojson point(double a, double b) { return ojson::array({a, b}); }

ojson penrose_graph(const std::function<double(double)>& f, int n) {
    ojson pts = ojson::array();
    for (int i = 1; i < n; ++i) {
        const double x = -0.5 * kPi + kPi * i / n;
        const double y = f(x);
        if (std::abs(std::cos(y)) < 1e-12) continue;
        const auto [u, v] = penrose_rot(x, y);
        if (std::abs(u) <= 10.0 && std::abs(v) <= 10.0) pts.push_back(point(u, v));
    }
    return pts;
}

}  // namespace

RunResult run_diagnostics(const RunConfig& config) {
    config.validate();
    const CircleHomeo phi = parse_homeo(config.homeo);
    RunResult r;
    r.tag = config.homeo;
    SumOptions sums = config.sums;
    sums.jobs = config.jobs;
    const double x0 = config.bases[0];
    const int audit_depth = std::min(config.depth, config.audit_depth);

    bool beta_ok = false, eps_ok = false, hhalf_ok = false, ok = false;
    stage(r, "beta", beta_ok, [&] {
        r.beta_verdict = SumVerdict::converging;
        for (double base : config.bases) {
            r.beta.push_back(beta_sum(phi, base, config.mult, config.depth, sums));
            if (r.beta.back().report.verdict == SumVerdict::diverging) r.beta_verdict = SumVerdict::diverging;
        }
    });
    stage(r, "epsilon", eps_ok, [&] {
        EpsilonOptions options;
        options.compute_lo = config.epsilon_lo;
        r.epsilon = epsilon_sum(phi, x0, config.depth, sums, options);
        r.epsilon_verdict = r.epsilon.report.verdict;
    });
    stage(r, "hhalf", hhalf_ok, [&] { r.hhalf = h_half_seminorm(phi, config.hhalf); });
    stage(r, "delta", ok, [&] { r.delta = scan_delta(phi, x0, config.depth, config.eta, config.jobs); });
    if (eps_ok) {
        stage(r, "beta_epsilon", ok, [&] { r.beta_epsilon = beta_epsilon_inequality(phi, x0, 2, config.depth, r.epsilon); });
    }
    stage(r, "audit", ok, [&] { r.audit = audit_beta_inequalities(phi, x0, audit_depth, config.jobs); });
    stage(r, "gronwall", ok, [&] { r.gronwall = audit_gronwall(phi, x0, audit_depth, config.eta, config.jobs); });
    classify(r, beta_ok, eps_ok, hhalf_ok);
    if (!config.out.empty()) write_outputs(config, r);
    return r;
}

nlohmann::ordered_json figure_data(const RunConfig& config) {
    config.validate();
    const CircleHomeo phi = parse_homeo(config.homeo);
    ojson doc;
    doc["homeo"] = config.homeo;
    const int n = 400;
    doc["penrose_graph"] = penrose_graph([&](double x) { return phi(x); }, n);
    doc["penrose_diagonal"] = penrose_graph([](double x) { return x; }, n);
    if (const auto m = phi.mobius()) {
        const AcausalCircle c = acausal_circle_of(m->map());
        if (const auto* line = std::get_if<CurveLine>(&c)) {
            doc["acausal_circle"] = {{"type", "line"}, {"slope", line->slope}, {"intercept", line->intercept}};
        } else {
            const auto& h = std::get<CurveHyperbola>(c);
            const auto center = h.center();
            doc["acausal_circle"] = {{"type", "hyperbola"}, {"P", h.P},         {"Q", h.Q},
                                     {"R", h.R},            {"center", point(center.first, center.second)}};
        }
    }

    ojson rects = ojson::array();
    for (int m = 2; m <= std::min(4, config.depth); ++m) {
        for (long long k = 0; k < DyadicInterval::count_at(m); ++k) {
            const EinDiamond d = boundary_diamond(phi, DyadicInterval(config.bases[0], m, k));
            rects.push_back({{"depth", m},
                             {"index", k},
                             {"x", point(d.horizontal.lo, d.horizontal.hi)},
                             {"y", point(d.vertical.lo, d.vertical.hi)}});
        }
    }
    doc["rectangles"] = rects;

    if (config.depth >= 3) {
        const int m = std::min(6, config.depth);
        const Interval I = DyadicInterval(config.bases[0], m, 1).interval();
        const EpsilonResult e = epsilon_number(phi, I);
        const NormalizedData nd = normalized_data(phi, I, e.witness);
        ojson norm;
        norm["depth"] = m;
        norm["interval"] = point(I.lo, I.hi);
        norm["epsilon"] = e.hi;
        norm["x"] = nd.T.x;
        norm["y"] = nd.T.y;
        norm["dist_minus"] = nd.dist_minus;
        norm["dist_plus"] = nd.dist_plus;
        ojson psi = ojson::array();
        for (int i = 0; i <= 200; ++i) {
            const double x = -0.5 * kPi + kPi * i / 200;
            psi.push_back(point(x, nd.psi(x)));
        }
        norm["psi_graph"] = psi;
        ojson corners = ojson::array();
        for (const Interval& J : half_children_of_triple(I)) {
            const CornerReport c = corner_positions(phi, I, J, nd.T);
            corners.push_back({{"k", c.k},
                               {"domain", point(c.domain.first, c.domain.second)},
                               {"image", point(c.image.first, c.image.second)},
                               {"predicted", point(c.predicted.first, c.predicted.second)}});
        }
        norm["corners"] = corners;
        const SlabReport s = homeo_graph_in_slab(nd);
        norm["slab"] = {{"psi", s.psi}, {"g_minus", s.g_minus}, {"g_plus", s.g_plus}};
        doc["normalized"] = norm;
    }

    const LimitingDomain ld = limiting_domain();
    ojson boundary = ojson::array();
    // Every tenth of the 10^4 sampled directions.
    for (std::size_t i = 0; i < ld.boundary.size(); i += 10) boundary.push_back(point(ld.boundary[i].y1, ld.boundary[i].y2));
    doc["limiting_domain"] = {{"r", ld.r}, {"corners", ld.corners}, {"boundary", boundary}};
    return doc;
}

std::string emit_figures(const RunConfig& config) {
    const ojson doc = figure_data(config);
    if (config.out.empty()) throw Error(ErrorCode::InvalidConfig, "figures need an output directory");
    std::filesystem::create_directories(config.out);
    const std::string path = (std::filesystem::path(config.out) / "figures.json").string();
    write_text_file(path, doc.dump(1) + "\n");
    return path;
}

}  // namespace wpdiag
