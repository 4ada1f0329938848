#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "wpdiag/errors.hpp"
#include "wpdiag/gauss.hpp"
#include "wpdiag/report.hpp"
#include "wpdiag/run.hpp"
#include "wpdiag/spec_parser.hpp"

using namespace wpdiag;

namespace {

// Exit codes: 0 success, 1 invalid input, 2 partial run.
constexpr int kPartial = 2;

void add_common(CLI::App* app, RunConfig& c, std::string& bases) {
    app->add_option("--homeo", c.homeo, "homeomorphism spec")->capture_default_str();
    app->add_option("--bases", bases, "comma-separated dyadic base points")->capture_default_str();
    app->add_option("--mult", c.mult, "beta interval multiplier")->capture_default_str();
    app->add_option("--depth", c.depth, "maximal dyadic depth")->capture_default_str();
    app->add_option("--eta", c.eta, "Gronwall exponent and delta threshold")->capture_default_str();
    app->add_option("--out", c.out, "output directory");
    app->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app->add_option("--jobs", c.jobs, "worker threads")->capture_default_str();
    app->add_option("--audit-depth", c.audit_depth, "depth cap of the inequality audits")->capture_default_str();
    app->add_flag("--epsilon-lo", c.epsilon_lo, "also compute epsilon lower estimates");
}

// Directory name for a zoo member.
std::string slug(const std::string& spec) {
    std::string s;
    for (char ch : spec) s += std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-' ? ch : '_';
    return s;
}

int report(const RunResult& r) {
    std::cout << r.line << "\n";
    for (const std::string& e : r.errors) std::cerr << "error: " << e << "\n";
    return r.errors.empty() ? 0 : kPartial;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiscale diagnostics for circle homeomorphisms"};
    app.require_subcommand(1);
    RunConfig config;
    std::string bases = "0,pi/3,-pi/3";
    int rows = 11;

    CLI::App* run = app.add_subcommand("run", "run all diagnostics for one homeomorphism");
    add_common(run, config, bases);
    CLI::App* zoo = app.add_subcommand("zoo", "run the default zoo, one subdirectory per map");
    add_common(zoo, config, bases);
    CLI::App* figures = app.add_subcommand("figures", "write figures.json");
    add_common(figures, config, bases);
    CLI::App* dict = app.add_subcommand("dictionary", "tabulate the lambda-mu dictionary");
    dict->add_option("--rows", rows, "number of lambda samples in [0, 1]")->capture_default_str();
    dict->add_option("--out", config.out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        config.bases = parse_real_list(bases);
        if (*run) return report(run_diagnostics(config));
        if (*figures) {
            std::cout << emit_figures(config) << "\n";
            return 0;
        }
        if (*zoo) {
            int status = 0;
            const std::string root = config.out;
            for (const std::string& spec : zoo_specs()) {
                RunConfig c = config;
                c.homeo = spec;
                if (!root.empty()) c.out = (std::filesystem::path(root) / slug(spec)).string();
                const auto start = std::chrono::steady_clock::now();
                const int s = report(run_diagnostics(c));
                const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                std::cerr << spec << ": " << format_real(secs) << " s\n";
                status = std::max(status, s);
            }
            return status;
        }
        Table t{{"lambda", "mu_sq", "mu_tilde_sq", "shape_sq", "K_int"}, {}};
        for (const DictionaryRow& r : dictionary_table(rows)) t.add({r.lambda, r.mu_sq, r.mu_tilde_sq, r.shape_sq, r.K_int});
        if (config.out.empty()) {
            std::cout << to_csv(t);
        } else {
            std::filesystem::create_directories(config.out);
            const std::string path = (std::filesystem::path(config.out) / "dictionary.csv").string();
            write_text_file(path, to_csv(t));
            std::cout << path << "\n";
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
