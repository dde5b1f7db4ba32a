#ifndef BENCHSCOPE_DATASET_HPP
#define BENCHSCOPE_DATASET_HPP

#include "benchscope/catalog.hpp"
#include "benchscope/error.hpp"
#include "benchscope/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace benchscope {

struct RunKey {
    std::string suite;
    std::string workload;
    std::string machine;

    auto operator<=>(const RunKey&) const = default;
};

/// One raw hardware event count. Unsupported events carry value 0 and are never
/// read by metric derivation.
struct CounterSample {
    std::string suite;
    std::string workload;
    std::string machine;
    std::string event;
    double value = 0.0;
    bool supported = true;

    bool operator==(const CounterSample&) const = default;
};

/// All samples of one (suite, workload, machine) run plus its optional score and
/// wallclock. Samples are kept sorted by event name.
struct RunRecord {
    std::string suite;
    std::string workload;
    std::string machine;
    std::vector<CounterSample> samples;
    std::optional<double> wallclock_seconds;
    std::optional<double> score;

    bool operator==(const RunRecord&) const = default;

    [[nodiscard]] RunKey key() const { return {suite, workload, machine}; }

    [[nodiscard]] const CounterSample* find(std::string_view event) const noexcept
    {
        const auto it = std::lower_bound(samples.begin(), samples.end(), event,
            [](const CounterSample& s, std::string_view e) { return s.event < e; });
        if (it == samples.end() || it->event != event) {
            return nullptr;
        }
        return &*it;
    }

    /// Value of a supported event; nullopt when absent or unsupported.
    [[nodiscard]] std::optional<double> value(std::string_view event) const noexcept
    {
        const auto* s = find(event);
        if (s == nullptr || !s->supported) {
            return std::nullopt;
        }
        return s->value;
    }
};

/// Canonical-name to platform-name translation for one machine.
struct CounterMap {
    std::string machine;
    std::map<std::string, std::string> mapping; ///< canonical -> raw
    /// Canonical events whose raw counter counts cache lines rather than bytes.
    std::set<std::string> line_granular;
    unsigned cacheline_bytes = 64;

    /// Throws InvalidArgument when two canonical names share a raw name.
    void validate() const
    {
        if (cacheline_bytes == 0) {
            throw Error(Errc::InvalidArgument, "cacheline_bytes must be positive for " + machine);
        }
        std::set<std::string> seen;
        for (const auto& [canonical, raw] : mapping) {
            if (!seen.insert(raw).second) {
                throw Error(Errc::InvalidArgument,
                    "counter map for " + machine + " maps raw event '" + raw + "' twice");
            }
        }
    }

    /// Canonical name for a raw event, or the raw name verbatim if untranslated.
    [[nodiscard]] std::string canonical_name(std::string_view raw) const
    {
        for (const auto& [canonical, mapped] : mapping) {
            if (mapped == raw) {
                return canonical;
            }
        }
        return std::string(raw);
    }

    [[nodiscard]] double scale(std::string_view canonical) const
    {
        return line_granular.contains(std::string(canonical)) ? static_cast<double>(cacheline_bytes) : 1.0;
    }
};

/// Reads a JSON manifest:
///   {"machines": {"CPU-C": {"cacheline_bytes": 64,
///                           "events": {"instructions": "inst_retired.any",
///                                      "dram_bytes": {"event": "cas_count", "unit": "lines"}}}}}
inline std::map<std::string, CounterMap> parse_counter_maps(std::istream& in)
{
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::SchemaMismatch, std::string("counter map is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("machines") || !doc["machines"].is_object()) {
        throw Error(Errc::SchemaMismatch, "counter map needs a top-level \"machines\" object");
    }
    std::map<std::string, CounterMap> maps;
    for (const auto& [machine, node] : doc["machines"].items()) {
        CounterMap cm;
        cm.machine = machine;
        if (node.contains("cacheline_bytes")) {
            const auto& cl = node["cacheline_bytes"];
            if (!cl.is_number_unsigned() || cl.get<unsigned>() == 0) {
                throw Error(Errc::SchemaMismatch, "cacheline_bytes must be a positive integer for " + machine);
            }
            cm.cacheline_bytes = cl.get<unsigned>();
        }
        if (node.contains("events")) {
            for (const auto& [canonical, entry] : node["events"].items()) {
                if (entry.is_string()) {
                    cm.mapping[canonical] = entry.get<std::string>();
                } else if (entry.is_object() && entry.contains("event") && entry["event"].is_string()) {
                    cm.mapping[canonical] = entry["event"].get<std::string>();
                    if (entry.value("unit", std::string("count")) == "lines") {
                        cm.line_granular.insert(canonical);
                    }
                } else {
                    throw Error(Errc::SchemaMismatch, "bad entry for '" + canonical + "' on " + machine);
                }
            }
        }
        cm.validate();
        maps.emplace(machine, std::move(cm));
    }
    return maps;
}

inline std::map<std::string, CounterMap> load_counter_maps(const std::string& path)
{
    auto in = text::open_input(path);
    return parse_counter_maps(in);
}

struct ParseIssue {
    Errc kind;
    std::size_t line_no; ///< 1-based
    std::string detail;
};

struct ParseResult {
    std::vector<CounterSample> samples;
    std::vector<ParseIssue> errors;
};

inline bool is_unsupported_token(std::string_view v) noexcept
{
    return v == "<not supported>" || v == "<not counted>";
}

/// Parses a field-separated counter dump (value,unit,event[,runtime,pct,...]).
/// Bad lines are reported and skipped; every valid line still yields a sample.
/// A repeated event keeps its first occurrence and reports DuplicateKey.
inline ParseResult parse_counter_dump(std::istream& in, const RunKey& run, const CounterMap* map = nullptr)
{
    ParseResult result;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = text::trim(line);
        if (body.empty() || body.front() == '#') {
            continue;
        }
        const auto fields = text::split(body, ',');
        if (fields.size() < 3 || fields[2].empty()) {
            result.errors.push_back({Errc::MalformedLine, line_no, "expected value,unit,event[,...]"});
            continue;
        }
        CounterSample s{run.suite, run.workload, run.machine, {}, 0.0, true};
        s.event = map != nullptr ? map->canonical_name(fields[2]) : fields[2];
        if (is_unsupported_token(fields[0])) {
            s.supported = false;
        } else {
            const auto v = text::parse_double(fields[0]);
            if (!v || *v < 0.0) {
                result.errors.push_back({Errc::NonNumericValue, line_no, "value '" + fields[0] + "'"});
                continue;
            }
            s.value = *v * (map != nullptr ? map->scale(s.event) : 1.0);
        }
        if (!seen.insert(s.event).second) {
            result.errors.push_back({Errc::DuplicateKey, line_no, "event '" + s.event + "' repeated"});
            continue;
        }
        result.samples.push_back(std::move(s));
    }
    return result;
}

inline ParseResult parse_counter_file(const std::string& path, const RunKey& run, const CounterMap* map = nullptr)
{
    auto in = text::open_input(path);
    return parse_counter_dump(in, run, map);
}

/// Groups samples into records, sorted by key, enforcing key uniqueness.
inline std::vector<RunRecord> group_samples(std::vector<CounterSample> samples)
{
    std::sort(samples.begin(), samples.end(), [](const CounterSample& a, const CounterSample& b) {
        return std::tie(a.suite, a.workload, a.machine, a.event) < std::tie(b.suite, b.workload, b.machine, b.event);
    });
    std::vector<RunRecord> records;
    for (auto& s : samples) {
        if (records.empty() || records.back().key() != RunKey{s.suite, s.workload, s.machine}) {
            records.push_back(RunRecord{s.suite, s.workload, s.machine, {}, std::nullopt, std::nullopt});
        }
        auto& rec = records.back();
        if (!rec.samples.empty() && rec.samples.back().event == s.event) {
            throw Error(Errc::DuplicateKey,
                s.suite + "," + s.workload + "," + s.machine + "," + s.event);
        }
        rec.samples.push_back(std::move(s));
    }
    return records;
}

namespace detail {

inline std::map<std::string, std::size_t> header_columns(const std::string& header,
                                                         std::initializer_list<std::string_view> required,
                                                         std::string_view what)
{
    std::map<std::string, std::size_t> cols;
    const auto names = text::split(header);
    for (std::size_t i = 0; i < names.size(); ++i) {
        cols.emplace(names[i], i);
    }
    for (const auto r : required) {
        if (!cols.contains(std::string(r))) {
            throw Error(Errc::SchemaMismatch, std::string(what) + " is missing column '" + std::string(r) + "'");
        }
    }
    return cols;
}

inline std::optional<bool> parse_bool(std::string_view s) noexcept
{
    if (s == "true" || s == "1") {
        return true;
    }
    if (s == "false" || s == "0") {
        return false;
    }
    return std::nullopt;
}

} // namespace detail

/// Loads the canonical store CSV ("suite,workload,machine,event,value,supported")
/// and, optionally, the scores CSV ("suite,workload,machine,score,wallclock_seconds").
/// Score rows without counter samples create sample-less records.
inline std::vector<RunRecord> load_canonical(std::istream& store, std::istream* scores = nullptr)
{
    std::vector<CounterSample> samples;
    std::string line;
    if (std::getline(store, line)) {
        const auto cols = detail::header_columns(
            line, {"suite", "workload", "machine", "event", "value", "supported"}, "store");
        const auto at = [&](const std::vector<std::string>& f, const char* name) -> const std::string& {
            return f[cols.at(name)];
        };
        std::size_t line_no = 1;
        while (std::getline(store, line)) {
            ++line_no;
            if (text::trim(line).empty()) {
                continue;
            }
            const auto f = text::split(line);
            if (f.size() != cols.size()) {
                throw Error(Errc::MalformedLine, "store line " + std::to_string(line_no));
            }
            CounterSample s{at(f, "suite"), at(f, "workload"), at(f, "machine"), at(f, "event"), 0.0, true};
            const auto supported = detail::parse_bool(at(f, "supported"));
            const auto value = text::parse_double(at(f, "value"));
            if (!supported) {
                throw Error(Errc::NonNumericValue, "store line " + std::to_string(line_no) + ": supported flag");
            }
            if (!value || *value < 0.0) {
                throw Error(Errc::NonNumericValue, "store line " + std::to_string(line_no) + ": value");
            }
            s.supported = *supported;
            s.value = s.supported ? *value : 0.0;
            samples.push_back(std::move(s));
        }
    }
    auto records = group_samples(std::move(samples));

    if (scores == nullptr) {
        return records;
    }
    if (!std::getline(*scores, line)) {
        return records;
    }
    const auto cols = detail::header_columns(
        line, {"suite", "workload", "machine", "score", "wallclock_seconds"}, "scores");
    std::map<RunKey, std::size_t> index;
    for (std::size_t i = 0; i < records.size(); ++i) {
        index.emplace(records[i].key(), i);
    }
    std::set<RunKey> scored;
    std::size_t line_no = 1;
    while (std::getline(*scores, line)) {
        ++line_no;
        if (text::trim(line).empty()) {
            continue;
        }
        const auto f = text::split(line);
        if (f.size() != cols.size()) {
            throw Error(Errc::MalformedLine, "scores line " + std::to_string(line_no));
        }
        RunKey key{f[cols.at("suite")], f[cols.at("workload")], f[cols.at("machine")]};
        if (!scored.insert(key).second) {
            throw Error(Errc::DuplicateKey, "scores line " + std::to_string(line_no));
        }
        std::optional<double> score;
        if (const auto& raw = f[cols.at("score")]; !raw.empty()) {
            score = text::parse_double(raw);
            if (!score) {
                throw Error(Errc::NonNumericValue, "scores line " + std::to_string(line_no) + ": score");
            }
            if (!(*score > 0.0)) {
                throw Error(Errc::NonPositiveScore, "scores line " + std::to_string(line_no));
            }
        }
        std::optional<double> wall;
        if (const auto& raw = f[cols.at("wallclock_seconds")]; !raw.empty()) {
            wall = text::parse_double(raw);
            if (!wall || !(*wall > 0.0)) {
                throw Error(Errc::NonNumericValue,
                    "scores line " + std::to_string(line_no) + ": wallclock_seconds must be positive");
            }
        }
        auto it = index.find(key);
        if (it == index.end()) {
            records.push_back(RunRecord{key.suite, key.workload, key.machine, {}, std::nullopt, std::nullopt});
            it = index.emplace(key, records.size() - 1).first;
        }
        records[it->second].score = score;
        records[it->second].wallclock_seconds = wall;
    }
    std::sort(records.begin(), records.end(),
        [](const RunRecord& a, const RunRecord& b) { return a.key() < b.key(); });
    return records;
}

inline std::vector<RunRecord> load_canonical(const std::string& store_path, const std::string& scores_path = {})
{
    auto store = text::open_input(store_path);
    if (scores_path.empty()) {
        return load_canonical(store);
    }
    auto scores = text::open_input(scores_path);
    return load_canonical(store, &scores);
}

inline std::string write_canonical(const std::vector<RunRecord>& records)
{
    std::vector<const CounterSample*> rows;
    for (const auto& r : records) {
        for (const auto& s : r.samples) {
            rows.push_back(&s);
        }
    }
    std::sort(rows.begin(), rows.end(), [](const CounterSample* a, const CounterSample* b) {
        return std::tie(a->suite, a->workload, a->machine, a->event) < std::tie(b->suite, b->workload, b->machine, b->event);
    });
    std::ostringstream out;
    out << "suite,workload,machine,event,value,supported\n";
    for (const auto* s : rows) {
        out << s->suite << ',' << s->workload << ',' << s->machine << ',' << s->event << ','
            << text::format_exact(s->value) << ',' << (s->supported ? "true" : "false") << '\n';
    }
    return out.str();
}

/// Scores CSV for every record that has a score or a wallclock.
inline std::string write_scores(const std::vector<RunRecord>& records)
{
    std::vector<const RunRecord*> rows;
    for (const auto& r : records) {
        if (r.score || r.wallclock_seconds) {
            rows.push_back(&r);
        }
    }
    std::sort(rows.begin(), rows.end(), [](const RunRecord* a, const RunRecord* b) { return a->key() < b->key(); });
    std::ostringstream out;
    out << "suite,workload,machine,score,wallclock_seconds\n";
    for (const auto* r : rows) {
        out << r->suite << ',' << r->workload << ',' << r->machine << ','
            << (r->score ? text::format_exact(*r->score) : "") << ','
            << (r->wallclock_seconds ? text::format_exact(*r->wallclock_seconds) : "") << '\n';
    }
    return out.str();
}

struct BlockedMetric {
    Metric metric;
    std::vector<std::string> missing_events;
};

struct MachineValidation {
    std::string machine;
    std::size_t records = 0;
    std::vector<Metric> computable;
    std::vector<BlockedMetric> blocked;
};

struct ValidationReport {
    std::vector<MachineValidation> machines; ///< sorted by machine
};

/// Per machine, which metrics every counter-bearing record can supply. A metric
/// is blocked when any record of that machine lacks (or has unsupported) one of
/// its inputs.
inline ValidationReport validate_store(const std::vector<RunRecord>& records)
{
    std::map<std::string, std::vector<const RunRecord*>> by_machine;
    for (const auto& r : records) {
        if (!r.samples.empty()) {
            by_machine[r.machine].push_back(&r);
        }
    }
    ValidationReport report;
    for (const auto& [machine, recs] : by_machine) {
        MachineValidation mv;
        mv.machine = machine;
        mv.records = recs.size();
        for (const auto& mi : kMetrics) {
            std::set<std::string> missing;
            for (const auto ev : required_events(mi.id)) {
                if (ev.empty()) {
                    continue;
                }
                for (const auto* r : recs) {
                    if (!r->value(ev)) {
                        missing.emplace(ev);
                        break;
                    }
                }
            }
            if (missing.empty()) {
                mv.computable.push_back(mi.id);
            } else {
                mv.blocked.push_back({mi.id, {missing.begin(), missing.end()}});
            }
        }
        report.machines.push_back(std::move(mv));
    }
    return report;
}

inline std::string validation_markdown(const ValidationReport& report)
{
    std::ostringstream out;
    out << "| Machine | Records | Computable | Blocked (missing events) |\n";
    out << "|---|---|---|---|\n";
    for (const auto& m : report.machines) {
        std::vector<std::string> ok;
        for (const auto metric : m.computable) {
            ok.emplace_back(info(metric).key);
        }
        std::vector<std::string> blocked;
        for (const auto& b : m.blocked) {
            blocked.push_back(std::string(info(b.metric).key) + " (" + text::join(b.missing_events, " ") + ")");
        }
        out << "| " << m.machine << " | " << m.records << " | " << text::join(ok, ", ") << " | "
            << text::join(blocked, ", ") << " |\n";
    }
    return out.str();
}

} // namespace benchscope

#endif
