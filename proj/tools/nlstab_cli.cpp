#include "nlstab/harness/catalog.hpp"
#include "nlstab/harness/experiment.hpp"
#include "nlstab/harness/report.hpp"
#include "nlstab/parallel.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace nlstab;

struct RunArgs {
    std::string config;
    std::string out = "out";
    int workers = 0;
    long long seed = -1;
    std::vector<std::string> set;
};

harness::ExperimentConfig assemble(const std::string& pipeline, const RunArgs& a)
{
    harness::KeyValues kv;
    if (!a.config.empty()) {
        std::ifstream in(a.config);
        if (!in) throw ParseError("cannot read config " + a.config);
        kv = harness::parse_key_values(in);
    }
    for (const auto& s : a.set) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ParseError("--set expects key=value, got '" + s + "'");
        kv[s.substr(0, eq)] = s.substr(eq + 1);
    }
    kv["pipeline"] = pipeline;
    if (a.seed >= 0) kv["seed"] = std::to_string(a.seed);
    return harness::config_from(kv);
}

int run(const std::string& pipeline, const RunArgs& a)
{
    const auto cfg = assemble(pipeline, a);
    const int workers = a.workers > 0 ? a.workers : default_workers();
    const auto m = harness::run_experiment(cfg, a.out, workers);
    std::cout << pipeline << " " << (m.complete ? "complete" : "incomplete") << ", config " << m.config_hash << "\n";
    for (const auto& f : m.files) std::cout << "  " << (std::filesystem::path(a.out) / f).string() << "\n";
    for (const auto& f : m.failures) std::cerr << "failure: " << f << "\n";
    return m.complete ? 0 : 2;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Stability experiments for quasilinear and semilinear inverse boundary problems"};
    app.require_subcommand(0, 1);
    bool list_catalog = false;
    app.add_flag("--catalog", list_catalog, "Print the builtin law catalog and exit");

    const std::vector<std::pair<std::string, std::string>> pipelines = {
        {"solve", "Solve the forward problem for the configured boundary data"},
        {"dnmap", "Apply the partial DN map and sample its linearization"},
        {"frechet-check", "Compare difference quotients of the DN map with its linearization"},
        {"singular-check", "Decompose singular solutions into leading part and remainder over tau"},
        {"reconstruct-gamma", "Recover gamma(lambda) from linearized DN data"},
        {"reconstruct-semilinear", "Recover G'(lambda) and G(lambda) (n = 3)"},
        {"stability-sweep", "Tabulate law difference against the measurement over a family"},
    };
    std::vector<RunArgs> args(pipelines.size());
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < pipelines.size(); ++i) {
        auto* sub = app.add_subcommand(pipelines[i].first, pipelines[i].second);
        auto& a = args[i];
        sub->add_option("--config", a.config, "key=value configuration file")->check(CLI::ExistingFile);
        sub->add_option("--out", a.out, "Output directory")->capture_default_str();
        sub->add_option("--workers", a.workers, "Worker threads (0 = available parallelism)")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--seed", a.seed, "Seed recorded in the manifest and config hash")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--set", a.set, "Override a config entry (key=value), repeatable");
        subs.push_back(sub);
    }
    std::string report_dir = "out", plot_dir;
    auto* rep = app.add_subcommand("report", "Summarize the artifacts of a run directory");
    rep->add_option("--out", report_dir, "Run directory to summarize")->capture_default_str();
    rep->add_option("--plots", plot_dir, "Directory for plot-data CSVs");

    CLI11_PARSE(app, argc, argv);
    if (list_catalog) {
        for (const auto& e : harness::catalog_entries()) std::cout << e << "\n";
        return 0;
    }
    try {
        for (std::size_t i = 0; i < subs.size(); ++i)
            if (subs[i]->parsed()) return run(pipelines[i].first, args[i]);
        if (rep->parsed()) {
            const auto r = harness::emit_report(report_dir, plot_dir);
            std::cout << r.text;
            for (const auto& p : r.plot_files) std::cout << "plot data: " << p.string() << "\n";
            return r.errors.empty() ? 0 : 1;
        }
        std::cout << app.help();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
