#ifndef BENCHSCOPE_METRICS_HPP
#define BENCHSCOPE_METRICS_HPP

#include "benchscope/catalog.hpp"
#include "benchscope/dataset.hpp"
#include "benchscope/error.hpp"
#include "benchscope/stats.hpp"
#include "benchscope/text.hpp"

#include <array>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace benchscope {

/// The 19 derived metrics of one (workload, machine). Absent entries are
/// unavailable, which is distinct from zero.
struct MetricVector {
    std::array<std::optional<double>, kMetricCount> values{};

    [[nodiscard]] std::optional<double> operator[](Metric m) const noexcept { return values[index(m)]; }
    [[nodiscard]] bool available(Metric m) const noexcept { return values[index(m)].has_value(); }
    void set(Metric m, std::optional<double> v) noexcept { values[index(m)] = v; }

    bool operator==(const MetricVector&) const = default;
};

/// Event name -> total count, supported events only.
using EventTotals = std::map<std::string, double, std::less<>>;

inline EventTotals supported_totals(const RunRecord& record)
{
    EventTotals totals;
    for (const auto& s : record.samples) {
        if (s.supported) {
            totals.emplace(s.event, s.value);
        }
    }
    return totals;
}

/// Derives every metric whose inputs are present. Requires positive instruction
/// and cycle totals (MissingDenominator otherwise).
inline MetricVector derive_metrics(const EventTotals& totals, std::string_view what = "record")
{
    const auto get = [&](std::string_view ev) -> std::optional<double> {
        const auto it = totals.find(ev);
        if (it == totals.end()) {
            return std::nullopt;
        }
        return it->second;
    };
    for (const auto ev : {event::instructions, event::cycles}) {
        const auto v = get(ev);
        if (!v || !(*v > 0.0)) {
            throw Error(Errc::MissingDenominator, std::string(what) + " has no positive '" + std::string(ev) + "'");
        }
    }
    MetricVector mv;
    for (const auto& mi : kMetrics) {
        const auto num = get(mi.numerator);
        if (!num) {
            continue;
        }
        double den = 0.0;
        bool have = true;
        for (const auto ev : mi.denominator) {
            if (ev.empty()) {
                continue;
            }
            const auto d = get(ev);
            if (!d) {
                have = false;
                break;
            }
            den += *d;
        }
        if (!have || !(den > 0.0)) {
            continue;
        }
        mv.set(mi.id, *num / den * mi.scale);
    }
    return mv;
}

inline MetricVector derive_metrics(const RunRecord& record)
{
    return derive_metrics(supported_totals(record), record.suite + "/" + record.workload + "@" + record.machine);
}

struct MetricRow {
    std::string suite;
    std::string workload;
    std::string machine;
    MetricVector metrics;

    bool operator==(const MetricRow&) const = default;
};

/// Derives a row for every record that carries counter samples.
inline std::vector<MetricRow> derive_all(const std::vector<RunRecord>& records)
{
    std::vector<MetricRow> rows;
    for (const auto& r : records) {
        if (r.samples.empty()) {
            continue;
        }
        rows.push_back({r.suite, r.workload, r.machine, derive_metrics(r)});
    }
    return rows;
}

inline std::string write_metric_csv(const std::vector<MetricRow>& rows)
{
    std::ostringstream out;
    out << "suite,workload,machine";
    for (const auto& mi : kMetrics) {
        out << ',' << mi.key;
    }
    out << '\n';
    for (const auto& row : rows) {
        out << row.suite << ',' << row.workload << ',' << row.machine;
        for (const auto& v : row.metrics.values) {
            out << ',';
            if (v) {
                out << text::format_exact(*v);
            }
        }
        out << '\n';
    }
    return out.str();
}

inline std::vector<MetricRow> read_metric_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(Errc::SchemaMismatch, "metric table is empty");
    }
    const auto header = text::split(line);
    if (header.size() < 3 || header[0] != "suite" || header[1] != "workload" || header[2] != "machine") {
        throw Error(Errc::SchemaMismatch, "metric table must start with suite,workload,machine");
    }
    std::vector<std::optional<Metric>> cols;
    for (std::size_t i = 3; i < header.size(); ++i) {
        cols.push_back(metric_from_key(header[i]));
        if (!cols.back()) {
            throw Error(Errc::SchemaMismatch, "unknown metric column '" + header[i] + "'");
        }
    }
    std::vector<MetricRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) {
            continue;
        }
        const auto f = text::split(line);
        if (f.size() != header.size()) {
            throw Error(Errc::MalformedLine, "metric table line " + std::to_string(line_no));
        }
        MetricRow row{f[0], f[1], f[2], {}};
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (f[i + 3].empty()) {
                continue;
            }
            const auto v = text::parse_double(f[i + 3]);
            if (!v) {
                throw Error(Errc::NonNumericValue, "metric table line " + std::to_string(line_no));
            }
            row.metrics.set(*cols[i], *v);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::vector<MetricRow> read_metric_csv(const std::string& path)
{
    auto in = text::open_input(path);
    return read_metric_csv(in);
}

/// Per-metric statistics of one group; entries are absent for metrics no member has.
using GroupSummary = std::array<std::optional<stats::Summary>, kMetricCount>;

inline GroupSummary summarize_group(std::span<const MetricVector> group)
{
    if (group.empty()) {
        throw Error(Errc::EmptyGroup, "cannot summarize an empty group");
    }
    GroupSummary out;
    for (const auto& mi : kMetrics) {
        std::vector<double> values;
        for (const auto& mv : group) {
            if (const auto v = mv[mi.id]) {
                values.push_back(*v);
            }
        }
        if (!values.empty()) {
            out[index(mi.id)] = stats::summarize(values);
        }
    }
    return out;
}

/// Summary per suite over the given rows (callers pick the machine).
inline std::map<std::string, GroupSummary> suite_summary(std::span<const MetricRow> rows)
{
    std::map<std::string, std::vector<MetricVector>> groups;
    for (const auto& r : rows) {
        groups[r.suite].push_back(r.metrics);
    }
    if (groups.empty()) {
        throw Error(Errc::EmptyGroup, "no rows to summarize");
    }
    std::map<std::string, GroupSummary> out;
    for (const auto& [suite, members] : groups) {
        out.emplace(suite, summarize_group(members));
    }
    return out;
}

} // namespace benchscope

#endif
