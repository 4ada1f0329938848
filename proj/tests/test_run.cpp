#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "wpdiag/errors.hpp"
#include "wpdiag/run.hpp"

using namespace wpdiag;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("wpdiag_test_run_" + name);
    fs::remove_all(p);
    return p;
}

RunConfig small(const std::string& homeo, int depth) {
    RunConfig c;
    c.homeo = homeo;
    c.depth = depth;
    return c;
}

}  // namespace

TEST_CASE("config validation") {
    RunConfig c;
    c.mult = 0.5;
    CHECK_THROWS_AS(c.validate(), Error);
    c = RunConfig{};
    c.depth = c.sums.max_depth_guard + 1;
    CHECK_THROWS_AS(c.validate(), Error);
    c = RunConfig{};
    c.format = "xml";
    CHECK_THROWS_AS(c.validate(), Error);
    c = RunConfig{};
    c.jobs = 0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = RunConfig{};
    c.bases.clear();
    CHECK_THROWS_AS(c.validate(), Error);
    c = RunConfig{};
    c.homeo = "spin:1";
    CHECK_THROWS_AS(run_diagnostics(c), Error);
}

TEST_CASE("rotation is WP-consistent with vanishing sums") {
    const RunResult r = run_diagnostics(small("rot:0.5", 8));
    CHECK(r.errors.empty());
    CHECK(r.classification == Classification::wp_consistent);
    CHECK(r.dissent.empty());
    for (const BetaSumResult& b : r.beta) {
        for (double s : b.report.per_depth) CHECK(s < 1e-20);
    }
    for (double s : r.epsilon.report.per_depth) CHECK(s < 1e-20);
    CHECK(r.hhalf.value < 1e-20);
    CHECK(r.line == "rot:0.5: WP-consistent (beta-sum converging, epsilon-sum converging, H^{1/2} converged)");
}

TEST_CASE("csv output is deterministic and independent of the job count") {
    RunConfig c = small("trig:0.3", 7);
    c.out = scratch("serial").string();
    const RunResult a = run_diagnostics(c);
    c.out = scratch("again").string();
    run_diagnostics(c);
    c.out = scratch("parallel").string();
    c.jobs = 3;
    run_diagnostics(c);
    REQUIRE(a.files.size() == 6);
    for (const std::string& f : a.files) {
        const fs::path name = fs::path(f).filename();
        const std::string ref = slurp(f);
        CHECK(!ref.empty());
        CHECK(slurp(fs::path(fs::temp_directory_path() / "wpdiag_test_run_again" / name)) == ref);
        CHECK(slurp(fs::path(fs::temp_directory_path() / "wpdiag_test_run_parallel" / name)) == ref);
    }
    const std::string beta = slurp(fs::path(c.out) / "beta_intervals.csv");
    CHECK(beta.rfind("base,depth,index,lo,hi,length,image_length,beta,gamma,qs\n", 0) == 0);
    // Three bases, depths 0..7.
    CHECK(std::count(beta.begin(), beta.end(), '\n') == 1 + 3 * 255);
}

TEST_CASE("json output") {
    RunConfig c = small("rot:0.5", 5);
    c.format = "json";
    c.out = scratch("json").string();
    const RunResult r = run_diagnostics(c);
    REQUIRE(r.files.size() == 1);
    const auto doc = nlohmann::json::parse(slurp(r.files[0]));
    CHECK(doc["classification"] == "WP-consistent");
    CHECK(doc["partial"] == false);
    CHECK(doc["beta_intervals"].size() == 3 * 63);
    CHECK(doc["hhalf"].size() == r.hhalf.K.size());
}

TEST_CASE("figure data") {
    RunConfig c = small("mobius:P=1,Q=1,R=1", 6);
    const auto doc = figure_data(c);
    CHECK(doc["acausal_circle"]["type"] == "hyperbola");
    CHECK(doc["acausal_circle"]["center"][0] == 1.0);
    CHECK(doc["acausal_circle"]["center"][1] == -1.0);

    const auto& diag = doc["penrose_diagonal"];
    bool origin = false, unit = false;
    for (const auto& p : diag) {
        const double u = p[0], v = p[1];
        CHECK(u == v);
        origin = origin || (u == 0.0 && v == 0.0);
        unit = unit || (std::abs(u - 1.0) < 1e-15 && std::abs(v - 1.0) < 1e-15);
    }
    CHECK(origin);
    CHECK(unit);

    CHECK(doc["rectangles"].size() == 4 + 8 + 16);
    CHECK(doc["normalized"]["corners"].size() == 6);
    const double r = doc["limiting_domain"]["r"];
    CHECK(r == doctest::Approx(13.0 / 15.0).epsilon(1e-12));
    CHECK(doc["limiting_domain"]["boundary"].size() == 1000);

    c.homeo = "trig:0.3";
    const auto trig = figure_data(c);
    CHECK_FALSE(trig.contains("acausal_circle"));
    CHECK(trig.dump() == figure_data(c).dump());

    c.out = scratch("figures").string();
    const std::string path = emit_figures(c);
    CHECK(nlohmann::json::parse(slurp(path))["homeo"] == "trig:0.3");
}
