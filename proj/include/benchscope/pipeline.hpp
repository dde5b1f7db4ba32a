#ifndef BENCHSCOPE_PIPELINE_HPP
#define BENCHSCOPE_PIPELINE_HPP

#include "benchscope/cluster.hpp"
#include "benchscope/compare.hpp"
#include "benchscope/dataset.hpp"
#include "benchscope/error.hpp"
#include "benchscope/features.hpp"
#include "benchscope/metrics.hpp"
#include "benchscope/proxy.hpp"
#include "benchscope/reduce.hpp"
#include "benchscope/subset.hpp"
#include "benchscope/svg.hpp"
#include "benchscope/text.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

// Pipeline stages behind the command-line tool. Each stage reads its inputs
// from the paths in Config, writes artifacts under Config::out and returns a
// one-line summary.
namespace benchscope::pipeline {

namespace fs = std::filesystem;

struct Config {
    std::string store;
    std::string scores;
    std::string counter_map;
    std::string dumps;
    std::string metrics;
    std::string features;
    std::string pca_scores;
    std::string mix;
    std::string target;
    std::string pool_suite;
    std::vector<std::string> machines;
    std::string suite;
    std::string suite_a;
    std::string suite_b;
    Linkage linkage = Linkage::Ward;
    std::optional<std::size_t> pcs;
    std::optional<double> variance;
    std::optional<double> threshold;
    std::size_t groups = 4;
    std::optional<std::size_t> subset_k; ///< oracle size, defaults to the group count
    std::size_t mix_k = 2;
    std::optional<std::size_t> copies;
    std::size_t top_n = 4;
    std::vector<std::string> weights; ///< "metric_key=weight"
    std::string out = ".";
    std::set<std::string> formats; ///< empty = every format
};

inline const std::vector<std::string>& commands()
{
    static const std::vector<std::string> all{"ingest", "derive", "featurize", "pca", "cluster",
                                              "subset", "compare", "proxy", "report"};
    return all;
}

namespace detail {

inline void require(const std::string& value, const char* flag)
{
    if (value.empty()) {
        throw Error(Errc::ConfigError, std::string("missing required option --") + flag);
    }
}

inline bool wants(const Config& cfg, const fs::path& file)
{
    if (cfg.formats.empty()) {
        return true;
    }
    const auto ext = file.extension().string();
    return ext.size() > 1 && cfg.formats.contains(ext.substr(1));
}

class Writer {
public:
    Writer(const Config& cfg, fs::path dir) : cfg_(cfg), dir_(std::move(dir)) {}

    void operator()(const std::string& name, const std::string& contents)
    {
        const auto path = dir_ / name;
        if (!wants(cfg_, path)) {
            return;
        }
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) {
            throw Error(Errc::IoError, "cannot create " + dir_.string() + ": " + ec.message());
        }
        text::write_file(path.string(), contents);
        written_.push_back(path.string());
    }

    [[nodiscard]] const std::vector<std::string>& written() const noexcept { return written_; }

private:
    const Config& cfg_;
    fs::path dir_;
    std::vector<std::string> written_;
};

inline std::vector<RunRecord> load_records(const Config& cfg)
{
    require(cfg.store, "store");
    return load_canonical(cfg.store, cfg.scores);
}

inline std::vector<MetricRow> load_metric_rows(const Config& cfg)
{
    if (!cfg.metrics.empty()) {
        return read_metric_csv(cfg.metrics);
    }
    return derive_all(load_records(cfg));
}

inline std::vector<MetricRow> suite_rows(const std::vector<MetricRow>& rows, const std::string& suite)
{
    std::vector<MetricRow> out;
    std::copy_if(rows.begin(), rows.end(), std::back_inserter(out), [&](const MetricRow& r) { return r.suite == suite; });
    if (out.empty()) {
        throw Error(Errc::EmptySuite, "no metric rows for suite " + suite);
    }
    return out;
}

inline std::vector<std::string> suites_of(const std::vector<MetricRow>& rows)
{
    std::set<std::string> s;
    for (const auto& r : rows) {
        s.insert(r.suite);
    }
    return {s.begin(), s.end()};
}

inline FeatureMatrix build_features(const Config& cfg, const std::vector<MetricRow>& rows)
{
    std::set<std::string> workloads;
    std::set<std::string> present;
    for (const auto& r : rows) {
        workloads.insert(r.workload);
        present.insert(r.machine);
    }
    std::vector<std::string> machines = cfg.machines;
    if (machines.empty()) {
        machines.assign(present.begin(), present.end());
    }
    const std::vector<std::string> wl(workloads.begin(), workloads.end());
    return build_matrix(metric_table(rows), wl, machines);
}

inline FeatureMatrix features_for(const Config& cfg, const std::string& suite)
{
    if (!cfg.features.empty()) {
        return read_features_csv(cfg.features);
    }
    require(suite, "suite");
    return build_features(cfg, suite_rows(load_metric_rows(cfg), suite));
}

inline Retention retention(const Config& cfg)
{
    if (cfg.pcs && cfg.variance) {
        throw Error(Errc::ConfigError, "--pcs and --variance are mutually exclusive");
    }
    if (cfg.pcs) {
        return FixedComponents{*cfg.pcs};
    }
    if (cfg.variance) {
        return VarianceTarget{*cfg.variance};
    }
    return std::monostate{};
}

struct PcaResult {
    PcaModel model;
    Scores scores;
};

inline PcaResult run_pca(const Config& cfg, const FeatureMatrix& raw)
{
    const auto normalized = normalize(raw);
    PcaResult r{fit_pca(normalized, retention(cfg)), {}};
    r.scores = project(r.model, normalized);
    return r;
}

inline Scores scores_for(const Config& cfg, const std::string& suite)
{
    if (!cfg.pca_scores.empty()) {
        return read_scores_csv(cfg.pca_scores);
    }
    return run_pca(cfg, features_for(cfg, suite)).scores;
}

inline std::size_t group_count(const Config& cfg, std::size_t leaves)
{
    if (cfg.groups == 0) {
        throw Error(Errc::ConfigError, "--groups must be positive");
    }
    return std::min(cfg.groups, leaves);
}

inline std::string one_machine(const Config& cfg)
{
    if (cfg.machines.size() != 1) {
        throw Error(Errc::ConfigError, "this command needs exactly one --machine");
    }
    return cfg.machines.front();
}

inline MetricWeights parse_weights(const std::vector<std::string>& specs)
{
    if (specs.empty()) {
        return uniform_weights();
    }
    MetricWeights w;
    for (const auto& spec : specs) {
        const auto eq = spec.find('=');
        const auto m = metric_from_key(text::trim(std::string_view(spec).substr(0, eq)));
        const auto v = eq == std::string::npos ? std::nullopt : text::parse_double(spec.substr(eq + 1));
        if (!m || !v || *v < 0.0) {
            throw Error(Errc::ConfigError, "bad weight '" + spec + "', expected metric=non-negative number");
        }
        w[*m] = *v;
    }
    return w;
}

} // namespace detail

inline std::string ingest(const Config& cfg)
{
    detail::Writer write(cfg, cfg.out);
    std::vector<RunRecord> records;
    std::ostringstream issues;
    issues << "file,line,error,detail\n";
    std::size_t issue_count = 0;
    if (!cfg.dumps.empty()) {
        std::map<std::string, CounterMap> maps;
        if (!cfg.counter_map.empty()) {
            maps = load_counter_maps(cfg.counter_map);
        }
        std::vector<fs::path> files;
        for (const auto& entry : fs::recursive_directory_iterator(cfg.dumps)) {
            if (entry.is_regular_file() && entry.path().extension() == ".csv") {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        std::vector<CounterSample> samples;
        for (const auto& f : files) {
            const auto rel = fs::relative(f, cfg.dumps);
            std::vector<std::string> parts;
            for (const auto& p : rel) {
                parts.push_back(p.string());
            }
            if (parts.size() != 3) {
                throw Error(Errc::SchemaMismatch, "dump " + rel.generic_string() + " is not <machine>/<suite>/<workload>.csv");
            }
            const RunKey key{parts[1], f.stem().string(), parts[0]};
            const auto mit = maps.find(key.machine);
            auto parsed = parse_counter_file(f.string(), key, mit == maps.end() ? nullptr : &mit->second);
            for (const auto& e : parsed.errors) {
                issues << rel.generic_string() << ',' << e.line_no << ',' << to_string(e.kind) << ','
                       << '"' << e.detail << "\"\n";
                ++issue_count;
            }
            samples.insert(samples.end(), std::make_move_iterator(parsed.samples.begin()),
                std::make_move_iterator(parsed.samples.end()));
        }
        records = group_samples(std::move(samples));
        if (!cfg.scores.empty()) {
            std::istringstream store(write_canonical(records));
            auto scores = text::open_input(cfg.scores);
            records = load_canonical(store, &scores);
        }
    } else {
        records = detail::load_records(cfg);
    }
    write("store.csv", write_canonical(records));
    if (std::any_of(records.begin(), records.end(), [](const RunRecord& r) { return r.score || r.wallclock_seconds; })) {
        write("scores.csv", write_scores(records));
    }
    write("ingest_errors.csv", issues.str());
    write("validation.md", validation_markdown(validate_store(records)));
    return "ingest: " + std::to_string(records.size()) + " runs, " + std::to_string(issue_count) + " line error(s)";
}

inline std::string derive(const Config& cfg)
{
    detail::Writer write(cfg, cfg.out);
    const auto rows = derive_all(detail::load_records(cfg));
    write("metrics.csv", write_metric_csv(rows));
    return "derive: " + std::to_string(rows.size()) + " metric rows";
}

namespace detail {

inline std::string featurize_into(Writer& write, const FeatureMatrix& fm)
{
    write("features.csv", write_features_csv(fm));
    write("dropped_columns.csv", write_dropped_csv(fm));
    return std::to_string(fm.rows.size()) + " workloads x " + std::to_string(fm.cols.size()) + " features, "
        + std::to_string(fm.dropped.size()) + " dropped";
}

inline std::string pca_into(const Config& cfg, Writer& write, const PcaResult& pca)
{
    write("pca_variance.csv", variance_csv(pca.model));
    write("pca_scores.csv", write_scores_csv(pca.scores));
    const auto report = loading_table(pca.model, cfg.top_n);
    write("loadings.md", loading_markdown(report, cfg.top_n));
    write("loadings.csv", loading_csv(report));
    return std::to_string(pca.model.k()) + " components explain "
        + text::format_fixed(pca.model.explained_ratio.sum() * 100.0, 2) + "% of variance";
}

inline ClusterCut cut_for(const Config& cfg, const Dendrogram& dg)
{
    if (cfg.threshold) {
        return cut(dg, *cfg.threshold);
    }
    return cut_to_groups(dg, group_count(cfg, dg.leaf_count()));
}

inline std::string cluster_into(const Config& cfg, Writer& write, const Dendrogram& dg, const Scores& scores,
                                const std::string& title)
{
    const auto groups = with_medoids(cut_for(cfg, dg), scores);
    write("dendrogram.csv", merges_csv(dg));
    write("dendrogram.svg", svg::render_dendrogram(dg, title));
    write("clusters.csv", clusters_csv(groups));
    write("clusters.md", clusters_markdown(groups));
    return std::to_string(groups.groups.size()) + " groups from " + std::to_string(dg.leaf_count()) + " workloads";
}

inline SubsetReport subset_report(const Config& cfg, const Dendrogram& dg, const Scores& scores,
                                  const std::vector<RunRecord>& records, const std::string& suite)
{
    const std::string machine = cfg.machines.size() == 1 ? cfg.machines.front() : std::string();
    const auto table = score_table(records, suite, machine);
    const auto wall = wallclock_table(records, suite, machine);
    const auto g = group_count(cfg, dg.leaf_count());
    auto report = select_representatives(dg, scores, table, g, suite, &wall);
    const auto k = cfg.subset_k.value_or(g);
    report.oracle_best = oracle_best_subset(table, k);
    return report;
}

inline std::string subset_into(Writer& write, const SubsetReport& r)
{
    const std::vector<SubsetReport> one{r};
    write("subset.md", subset_markdown(one));
    write("subset.csv", subset_csv(one));
    return std::to_string(r.subset.size()) + " representatives, accuracy " + accuracy_cell(r);
}

} // namespace detail

inline std::string featurize(const Config& cfg)
{
    detail::require(cfg.suite, "suite");
    detail::Writer write(cfg, cfg.out);
    const auto fm = detail::build_features(cfg, detail::suite_rows(detail::load_metric_rows(cfg), cfg.suite));
    return "featurize: " + detail::featurize_into(write, fm);
}

inline std::string pca(const Config& cfg)
{
    detail::Writer write(cfg, cfg.out);
    const auto result = detail::run_pca(cfg, detail::features_for(cfg, cfg.suite));
    return "pca: " + detail::pca_into(cfg, write, result);
}

inline std::string cluster(const Config& cfg)
{
    detail::Writer write(cfg, cfg.out);
    const auto scores = detail::scores_for(cfg, cfg.suite);
    const auto dg = build_dendrogram(scores.values, scores.labels, cfg.linkage);
    return "cluster: " + detail::cluster_into(cfg, write, dg, scores, cfg.suite);
}

inline std::string subset(const Config& cfg)
{
    detail::require(cfg.suite, "suite");
    detail::Writer write(cfg, cfg.out);
    const auto scores = detail::scores_for(cfg, cfg.suite);
    const auto dg = build_dendrogram(scores.values, scores.labels, cfg.linkage);
    const auto report = detail::subset_report(cfg, dg, scores, detail::load_records(cfg), cfg.suite);
    return "subset: " + detail::subset_into(write, report);
}

inline std::string compare(const Config& cfg)
{
    detail::require(cfg.suite_a, "suite-a");
    detail::require(cfg.suite_b, "suite-b");
    const auto machine = detail::one_machine(cfg);
    detail::Writer write(cfg, cfg.out);
    const auto rows = detail::load_metric_rows(cfg);
    const auto c = compare_suites(detail::suite_rows(rows, cfg.suite_a), detail::suite_rows(rows, cfg.suite_b), machine);
    write("comparison.csv", comparison_csv(c));
    write("comparison.md", comparison_markdown(c));
    write("comparison.svg", comparison_svg(c));
    return "compare: " + std::to_string(c.metrics.size()) + " metrics, " + c.suite_a + " vs " + c.suite_b + " on "
        + machine;
}

inline std::string proxy(const Config& cfg)
{
    const auto machine = detail::one_machine(cfg);
    detail::Writer write(cfg, cfg.out);
    const auto records = detail::load_records(cfg);

    std::map<std::string, const RunRecord*> by_workload;
    for (const auto& r : records) {
        if (r.machine == machine && !r.samples.empty()) {
            if (!by_workload.emplace(r.workload, &r).second) {
                throw Error(Errc::DuplicateKey, "workload " + r.workload + " appears in several suites on " + machine);
            }
        }
    }
    const auto record_of = [&](const std::string& w) -> const RunRecord& {
        const auto it = by_workload.find(w);
        if (it == by_workload.end()) {
            throw Error(Errc::UnknownWorkload, w + " on " + machine);
        }
        return *it->second;
    };

    std::optional<MetricVector> target;
    if (!cfg.target.empty()) {
        target = derive_metrics(record_of(cfg.target));
    }
    const auto weights = detail::parse_weights(cfg.weights);

    // Spread of each metric across the pool suite, or across the mix.
    const auto scales_over = [&](const std::vector<std::string>& workloads) -> std::optional<MetricScales> {
        std::vector<MetricRow> rows;
        for (const auto& w : workloads) {
            const auto& r = record_of(w);
            rows.push_back({r.suite, r.workload, r.machine, derive_metrics(r)});
        }
        if (rows.size() < 2) {
            return std::nullopt;
        }
        Config one = cfg;
        one.machines = {machine};
        return metric_scales(normalize(detail::build_features(one, rows)), machine);
    };

    if (!cfg.mix.empty()) {
        std::vector<WorkloadProfile> profiles;
        std::vector<std::string> order;
        std::map<std::string, MetricVector> constituents;
        for (const auto& e : parse_mix_file(cfg.mix)) {
            const auto& rec = record_of(e.workload);
            auto p = WorkloadProfile::from_record(rec);
            if (e.duration) {
                p.duration = *e.duration;
            }
            if (constituents.emplace(e.workload, derive_metrics(rec)).second) {
                profiles.push_back(std::move(p));
            }
            order.push_back(e.workload);
        }
        const auto schedule = staggered_schedule(profiles, order, cfg.copies.value_or(order.size()));
        auto blend = simulate_rrr(profiles, schedule);
        std::string tail;
        if (target) {
            const auto scales = scales_over(order);
            const auto d = blend_distance(blend.aggregate, *target, weights, scales ? &*scales : nullptr);
            blend.distance_to_target = d.distance;
            blend.target = cfg.target;
            if (const auto g = d.relative_gaps.find(Metric::Ipc); g != d.relative_gaps.end()) {
                tail = ", IPC gap " + text::format_fixed(g->second * 100.0, 1) + "%";
            }
        }
        write("blend.csv", blend_csv(blend, target, constituents));
        write("blend.md", blend_markdown(blend, target, constituents));
        return "proxy: blended " + std::to_string(constituents.size()) + " workloads over "
            + std::to_string(schedule.copies) + " copies" + tail;
    }

    detail::require(cfg.target, "target");
    detail::require(cfg.pool_suite, "pool-suite");
    std::vector<WorkloadProfile> pool;
    std::vector<std::string> names;
    for (const auto& [w, rec] : by_workload) {
        if (rec->suite == cfg.pool_suite) {
            pool.push_back(WorkloadProfile::from_record(*rec));
            names.push_back(w);
        }
    }
    if (pool.empty()) {
        throw Error(Errc::EmptySuite, "pool suite " + cfg.pool_suite + " has no runs on " + machine);
    }
    const auto scales = scales_over(names);
    const auto ranked = search_mix(pool, *target, cfg.mix_k, weights, scales ? &*scales : nullptr);
    std::ostringstream csv;
    std::ostringstream md;
    csv << "rank,mix,distance,ipc\n";
    md << "| Rank | Mix | Distance | IPC |\n|---|---|---|---|\n";
    const auto ipc = [](const RankedMix& m) {
        const auto v = m.blend.aggregate[Metric::Ipc];
        return v ? text::format_exact(*v) : std::string();
    };
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        csv << i + 1 << ',' << text::join(ranked[i].mix, " ") << ',' << text::format_exact(ranked[i].distance) << ','
            << ipc(ranked[i]) << '\n';
        if (i < 20) {
            const auto v = ranked[i].blend.aggregate[Metric::Ipc];
            md << "| " << i + 1 << " | " << text::join(ranked[i].mix, ", ") << " | "
               << text::format_fixed(ranked[i].distance, 4) << " | " << (v ? text::format_fixed(*v, 3) : "n/a") << " |\n";
        }
    }
    write("mixes.csv", csv.str());
    write("mixes.md", md.str());
    return "proxy: ranked " + std::to_string(ranked.size()) + " mixes, best " + text::join(ranked.front().mix, "+");
}

/// Full pipeline: metrics, then per-suite features, PCA, clusters and subsets,
/// then cross-suite summaries. Each per-suite directory holds exactly what the
/// individual stages write for that suite.
inline std::string report(const Config& cfg)
{
    const auto records = detail::load_records(cfg);
    const auto rows = derive_all(records);
    detail::Writer top(cfg, cfg.out);
    top("metrics.csv", write_metric_csv(rows));

    std::vector<SubsetReport> subsets;
    for (const auto& suite : detail::suites_of(rows)) {
        const auto srows = detail::suite_rows(rows, suite);
        const auto fm = detail::build_features(cfg, srows);
        if (fm.rows.size() < 2) {
            continue;
        }
        detail::Writer write(cfg, fs::path(cfg.out) / suite);
        detail::featurize_into(write, fm);
        const auto pca = detail::run_pca(cfg, fm);
        detail::pca_into(cfg, write, pca);
        const auto dg = build_dendrogram(pca.scores.values, pca.scores.labels, cfg.linkage);
        detail::cluster_into(cfg, write, dg, pca.scores, suite);
        if (!score_table(records, suite).empty()) {
            subsets.push_back(detail::subset_report(cfg, dg, pca.scores, records, suite));
            detail::subset_into(write, subsets.back());
        }
    }
    top("subsets.md", subset_markdown(subsets));
    top("subsets.csv", subset_csv(subsets));

    std::set<std::string> machines;
    for (const auto& r : rows) {
        machines.insert(r.machine);
    }
    std::ostringstream csv;
    std::ostringstream md;
    csv << "machine,suite,metric,count,geomean,excluded_zeros,min,q1,median,q3,max\n";
    md << "| Machine | Suite | Metric | Geomean | Median | Min | Max |\n|---|---|---|---|---|---|---|\n";
    for (const auto& machine : machines) {
        std::vector<MetricRow> on;
        std::copy_if(rows.begin(), rows.end(), std::back_inserter(on), [&](const MetricRow& r) { return r.machine == machine; });
        const auto by_suite = suite_summary(on);
        std::vector<svg::BoxPanel> panels;
        for (const auto m : all_metrics()) {
            svg::BoxPanel panel{std::string(info(m).label), {}};
            for (const auto& [suite, summaries] : by_suite) {
                const auto& s = summaries[index(m)];
                if (!s) {
                    continue;
                }
                panel.series.push_back({suite, *s});
                csv << machine << ',' << suite << ',' << info(m).key << ',' << s->count << ','
                    << (s->geomean.value ? text::format_exact(*s->geomean.value) : "") << ','
                    << s->geomean.excluded_zeros << ',' << text::format_exact(s->min) << ','
                    << text::format_exact(s->q1) << ',' << text::format_exact(s->median) << ','
                    << text::format_exact(s->q3) << ',' << text::format_exact(s->max) << '\n';
                md << "| " << machine << " | " << suite << " | " << info(m).label << " | "
                   << (s->geomean.value ? text::format_fixed(*s->geomean.value, 3) : "n/a") << " | "
                   << text::format_fixed(s->median, 3) << " | " << text::format_fixed(s->min, 3) << " | "
                   << text::format_fixed(s->max, 3) << " |\n";
            }
            if (!panel.series.empty()) {
                panels.push_back(std::move(panel));
            }
        }
        top("boxplots_" + machine + ".svg", svg::render_boxplots(panels, "Metric distributions on " + machine));
    }
    top("summary.csv", csv.str());
    top("summary.md", md.str());
    return "report: " + std::to_string(rows.size()) + " metric rows, " + std::to_string(subsets.size())
        + " suite subset(s)";
}

inline std::string dispatch(const std::string& command, const Config& cfg)
{
    if (command == "ingest") return ingest(cfg);
    if (command == "derive") return derive(cfg);
    if (command == "featurize") return featurize(cfg);
    if (command == "pca") return pca(cfg);
    if (command == "cluster") return cluster(cfg);
    if (command == "subset") return subset(cfg);
    if (command == "compare") return compare(cfg);
    if (command == "proxy") return proxy(cfg);
    if (command == "report") return report(cfg);
    throw Error(Errc::InvalidArgument, "unknown command '" + command + "'");
}

/// 1 usage or configuration, 2 data, 3 search budget.
inline int exit_code(Errc code) noexcept
{
    switch (code) {
    case Errc::BudgetExceeded: return 3;
    case Errc::InvalidArgument:
    case Errc::ConfigError: return 1;
    default: return 2;
    }
}

} // namespace benchscope::pipeline

#endif
