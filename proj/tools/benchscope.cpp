// benchscope: command-line front end for the counter analysis pipeline.

#include "benchscope/pipeline.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

void report_error(const std::string& stage, std::string_view error, const std::string& message)
{
    const nlohmann::json line{{"stage", stage}, {"error", error}, {"message", message}};
    std::cerr << line.dump() << '\n';
}

} // namespace

int main(int argc, char** argv)
{
    using benchscope::pipeline::Config;

    CLI::App app{"Hardware-counter workload characterization: metrics, PCA, clustering, subsets, RRR proxies"};
    app.set_config("--config", "", "TOML config file; keys use the long option names");
    app.allow_config_extras(CLI::config_extras_mode::error);

    Config cfg;
    std::string command;
    std::string linkage = "ward";
    std::vector<std::string> formats;
    std::optional<std::size_t> pcs;
    std::optional<double> variance;
    std::optional<double> threshold;
    std::optional<std::size_t> subset_k;
    std::optional<std::size_t> copies;

    app.add_option("command", command, "Pipeline stage to run")
        ->required()
        ->check(CLI::IsMember(benchscope::pipeline::commands()));
    app.add_option("--store", cfg.store, "Canonical counter store CSV");
    app.add_option("--scores", cfg.scores, "Scores CSV (score, wallclock_seconds per run)");
    app.add_option("--counter-map", cfg.counter_map, "JSON counter-name map per machine");
    app.add_option("--dumps", cfg.dumps, "Directory of raw dumps laid out as <machine>/<suite>/<workload>.csv");
    app.add_option("--metrics", cfg.metrics, "Metric CSV written by derive");
    app.add_option("--features", cfg.features, "Feature CSV written by featurize");
    app.add_option("--pca-scores", cfg.pca_scores, "Score CSV written by pca");
    app.add_option("--machine", cfg.machines, "Machine(s); repeat or comma-separate")->delimiter(',');
    app.add_option("--suite", cfg.suite, "Suite to analyze");
    app.add_option("--suite-a", cfg.suite_a, "First suite for compare");
    app.add_option("--suite-b", cfg.suite_b, "Second suite for compare");
    app.add_option("--linkage", linkage, "Cluster linkage")
        ->check(CLI::IsMember({"ward", "average", "complete", "single"}));
    auto* pcs_opt = app.add_option("--pcs", pcs, "Retain a fixed number of components");
    auto* var_opt = app.add_option("--variance", variance, "Retain components up to this explained-variance fraction");
    pcs_opt->excludes(var_opt);
    auto* thr_opt = app.add_option("--threshold", threshold, "Cut the dendrogram below this height");
    auto* grp_opt = app.add_option("--groups", cfg.groups, "Cut the dendrogram into this many groups")
        ->capture_default_str();
    thr_opt->excludes(grp_opt);
    app.add_option("--subset-k", subset_k, "Oracle subset size (defaults to --groups)");
    app.add_option("--mix-k", cfg.mix_k, "Largest mix size searched by proxy")->capture_default_str();
    app.add_option("--mix", cfg.mix, "Mix file: one workload[,duration] per line");
    app.add_option("--target", cfg.target, "Target workload for proxy distance");
    app.add_option("--pool-suite", cfg.pool_suite, "Suite whose workloads form the proxy candidate pool");
    app.add_option("--copies", copies, "RRR copies (defaults to the mix length)");
    app.add_option("--top-n", cfg.top_n, "Metrics listed per component in loading reports")->capture_default_str();
    app.add_option("--weight", cfg.weights, "Proxy distance weight as metric=value; repeatable");
    app.add_option("--out", cfg.out, "Output directory")->envname("BENCHSCOPE_OUT")->capture_default_str();
    app.add_option("--format", formats, "Restrict written artifacts to these formats")
        ->check(CLI::IsMember({"csv", "md", "svg"}))
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << app.help();
        report_error(command.empty() ? "cli" : command, "Usage", e.what());
        return 1;
    }

    cfg.linkage = benchscope::parse_linkage(linkage);
    cfg.formats.insert(formats.begin(), formats.end());
    cfg.pcs = pcs;
    cfg.variance = variance;
    cfg.threshold = threshold;
    cfg.subset_k = subset_k;
    cfg.copies = copies;

    try {
        std::cout << benchscope::pipeline::dispatch(command, cfg) << '\n';
    } catch (const benchscope::Error& e) {
        report_error(command, benchscope::to_string(e.code()), e.what());
        return benchscope::pipeline::exit_code(e.code());
    } catch (const std::exception& e) {
        report_error(command, "IoError", e.what());
        return 2;
    }
    return 0;
}
