#ifndef BENCHSCOPE_SUBSET_HPP
#define BENCHSCOPE_SUBSET_HPP

#include "benchscope/cluster.hpp"
#include "benchscope/dataset.hpp"
#include "benchscope/error.hpp"
#include "benchscope/stats.hpp"
#include "benchscope/text.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace benchscope {

using MachineScores = std::map<std::string, double>;    ///< workload -> running score
using ScoreTable = std::map<std::string, MachineScores>; ///< machine -> scores

struct OracleResult {
    std::vector<std::string> subset;
    std::map<std::string, double> per_machine_accuracy;
    std::optional<double> aggregate_accuracy;
    std::size_t evaluated = 0;
};

struct SubsetReport {
    std::string suite;
    std::vector<std::string> subset; ///< sorted
    std::map<std::string, double> per_machine_accuracy;
    /// Geometric mean of the per-machine accuracies, only when all are positive.
    std::optional<double> aggregate_accuracy;
    std::optional<OracleResult> oracle_best;
    std::optional<double> runtime_fraction;
    std::vector<std::vector<std::string>> groups; ///< set by select_representatives
};

/// Scores of one suite per machine, built from records carrying a score.
inline ScoreTable score_table(const std::vector<RunRecord>& records, std::string_view suite,
                              std::string_view machine = {})
{
    ScoreTable table;
    for (const auto& r : records) {
        if (r.suite != suite || !r.score || (!machine.empty() && r.machine != machine)) {
            continue;
        }
        table[r.machine][r.workload] = *r.score;
    }
    return table;
}

/// Sum of wallclock over machines, per workload.
inline std::map<std::string, double> wallclock_table(const std::vector<RunRecord>& records, std::string_view suite,
                                                     std::string_view machine = {})
{
    std::map<std::string, double> out;
    for (const auto& r : records) {
        if (r.suite == suite && r.wallclock_seconds && (machine.empty() || r.machine == machine)) {
            out[r.workload] += *r.wallclock_seconds;
        }
    }
    return out;
}

namespace detail {

inline void check_score_table(const ScoreTable& scores)
{
    if (scores.empty()) {
        throw Error(Errc::EmptySuite, "no scores");
    }
    const MachineScores& first = scores.begin()->second;
    if (first.empty()) {
        throw Error(Errc::EmptySuite, "machine " + scores.begin()->first + " has no scores");
    }
    for (const auto& [machine, ms] : scores) {
        if (ms.size() != first.size()
            || !std::equal(ms.begin(), ms.end(), first.begin(), [](const auto& a, const auto& b) { return a.first == b.first; })) {
            throw Error(Errc::UnknownWorkload, "machine " + machine + " scores a different workload set");
        }
        for (const auto& [w, s] : ms) {
            if (!(s > 0.0) || !std::isfinite(s)) {
                throw Error(Errc::NonPositiveScore, w + "@" + machine);
            }
        }
    }
}

// Positions of `subset` in the (sorted) workload order of `ms`.
inline std::vector<std::size_t> subset_positions(const MachineScores& ms, std::span<const std::string> subset)
{
    if (subset.empty()) {
        throw Error(Errc::EmptySubset, "subset is empty");
    }
    std::set<std::string> wanted;
    for (const auto& w : subset) {
        if (!ms.contains(w)) {
            throw Error(Errc::UnknownWorkload, w);
        }
        if (!wanted.insert(w).second) {
            throw Error(Errc::InvalidArgument, "workload listed twice: " + w);
        }
    }
    std::vector<std::size_t> pos;
    std::size_t i = 0;
    for (const auto& [w, s] : ms) {
        if (wanted.contains(w)) {
            pos.push_back(i);
        }
        ++i;
    }
    return pos;
}

struct Objective {
    bool defined = false;
    double value = 0.0;

    // Defined aggregates beat undefined ones; undefined ones compare by worst machine.
    bool operator>(const Objective& o) const
    {
        if (defined != o.defined) {
            return defined;
        }
        return value > o.value;
    }
};

inline Objective objective(const std::map<std::string, double>& per_machine, const std::optional<double>& aggregate)
{
    if (aggregate) {
        return {true, *aggregate};
    }
    double worst = per_machine.begin()->second;
    for (const auto& [m, a] : per_machine) {
        worst = std::min(worst, a);
    }
    return {false, worst};
}

inline std::optional<double> aggregate_of(const std::map<std::string, double>& per_machine)
{
    std::vector<double> acc;
    for (const auto& [m, a] : per_machine) {
        if (!(a > 0.0)) {
            return std::nullopt;
        }
        acc.push_back(a);
    }
    return stats::geomean_positive(acc);
}

// Per machine: sorted score vector and suite geomean.
struct PreparedScores {
    std::vector<std::string> workloads;
    std::map<std::string, std::vector<double>> values;
    std::map<std::string, double> suite_gm;
};

inline PreparedScores prepare(const ScoreTable& scores)
{
    check_score_table(scores);
    PreparedScores p;
    for (const auto& [w, s] : scores.begin()->second) {
        p.workloads.push_back(w);
    }
    for (const auto& [machine, ms] : scores) {
        auto& v = p.values[machine];
        for (const auto& [w, s] : ms) {
            v.push_back(s);
        }
        p.suite_gm[machine] = stats::geomean_positive(v);
    }
    return p;
}

inline std::map<std::string, double> accuracies(const PreparedScores& p, std::span<const std::size_t> pos)
{
    std::map<std::string, double> out;
    std::vector<double> chosen(pos.size());
    for (const auto& [machine, v] : p.values) {
        for (std::size_t i = 0; i < pos.size(); ++i) {
            chosen[i] = v[pos[i]];
        }
        const double gm = stats::geomean_positive(chosen);
        const double suite = p.suite_gm.at(machine);
        out[machine] = 1.0 - std::abs(gm - suite) / suite;
    }
    return out;
}

} // namespace detail

/// accuracy = 1 - |GM(subset) - GM(suite)| / GM(suite), per machine, where GM is
/// the geometric mean of per-workload running scores. Both means iterate in the
/// same workload order, so the full suite scores exactly 1.
inline SubsetReport evaluate_subset(const ScoreTable& scores, std::span<const std::string> subset,
                                    std::string suite = {},
                                    const std::map<std::string, double>* wallclock = nullptr)
{
    const auto prepared = detail::prepare(scores);
    const auto pos = detail::subset_positions(scores.begin()->second, subset);

    SubsetReport report;
    report.suite = std::move(suite);
    for (const auto i : pos) {
        report.subset.push_back(prepared.workloads[i]);
    }
    report.per_machine_accuracy = detail::accuracies(prepared, pos);
    report.aggregate_accuracy = detail::aggregate_of(report.per_machine_accuracy);

    if (wallclock != nullptr && !wallclock->empty()) {
        double total = 0.0;
        double part = 0.0;
        bool complete = true;
        for (std::size_t i = 0; i < prepared.workloads.size(); ++i) {
            const auto it = wallclock->find(prepared.workloads[i]);
            if (it == wallclock->end()) {
                complete = false;
                break;
            }
            total += it->second;
            if (std::binary_search(pos.begin(), pos.end(), i)) {
                part += it->second;
            }
        }
        if (complete && total > 0.0) {
            report.runtime_fraction = part / total;
        }
    }
    return report;
}

inline constexpr double kDefaultOracleBudget = 2e6;

inline double binomial(std::size_t n, std::size_t k)
{
    if (k > n) {
        return 0.0;
    }
    double c = 1.0;
    for (std::size_t i = 1; i <= k; ++i) {
        c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    }
    return std::round(c);
}

/// Exhaustive best k-subset by aggregate accuracy. Subsets are visited in
/// lexicographic order of sorted workload ids and only a strictly better one
/// replaces the incumbent, so ties resolve to the lexicographically first.
inline OracleResult oracle_best_subset(const ScoreTable& scores, std::size_t k, double budget = kDefaultOracleBudget)
{
    const auto prepared = detail::prepare(scores);
    const std::size_t n = prepared.workloads.size();
    if (k == 0 || k > n) {
        throw Error(Errc::InvalidArgument, "subset size must be in [1, " + std::to_string(n) + "]");
    }
    if (binomial(n, k) > budget) {
        throw Error(Errc::BudgetExceeded, "C(" + std::to_string(n) + ", " + std::to_string(k) + ") exceeds budget");
    }
    std::vector<std::size_t> pos(k);
    std::iota(pos.begin(), pos.end(), 0);
    OracleResult best;
    std::optional<detail::Objective> best_obj;
    while (true) {
        auto acc = detail::accuracies(prepared, pos);
        auto agg = detail::aggregate_of(acc);
        const auto obj = detail::objective(acc, agg);
        ++best.evaluated;
        if (!best_obj || obj > *best_obj) {
            best_obj = obj;
            best.subset.clear();
            for (const auto i : pos) {
                best.subset.push_back(prepared.workloads[i]);
            }
            best.per_machine_accuracy = std::move(acc);
            best.aggregate_accuracy = agg;
        }
        // Next combination in lexicographic order.
        std::size_t i = k;
        while (i > 0 && pos[i - 1] == n - k + i - 1) {
            --i;
        }
        if (i == 0) {
            break;
        }
        ++pos[i - 1];
        for (std::size_t j = i; j < k; ++j) {
            pos[j] = pos[j - 1] + 1;
        }
    }
    return best;
}

/// Cut to exactly `target_groups`, take each group's medoid in PCA space, and
/// evaluate the medoids as a subset.
inline SubsetReport select_representatives(const Dendrogram& dg, const Scores& pca_scores, const ScoreTable& scores,
                                           std::size_t target_groups, std::string suite = {},
                                           const std::map<std::string, double>* wallclock = nullptr)
{
    const auto groups = with_medoids(cut_to_groups(dg, target_groups), pca_scores);
    auto report = evaluate_subset(scores, groups.medoids, std::move(suite), wallclock);
    report.groups = groups.groups;
    return report;
}

inline std::string percent(double fraction)
{
    return text::format_fixed(fraction * 100.0, 2) + "%";
}

inline std::string accuracy_cell(const SubsetReport& r)
{
    if (r.aggregate_accuracy) {
        return percent(*r.aggregate_accuracy);
    }
    std::vector<std::string> parts;
    for (const auto& [m, a] : r.per_machine_accuracy) {
        parts.push_back(m + " " + percent(a));
    }
    return text::join(parts, "; ");
}

/// One row per report: group, subset workloads, accuracy.
inline std::string subset_markdown(std::span<const SubsetReport> reports)
{
    std::ostringstream out;
    out << "| Group | Subset workloads | Accuracy |\n|---|---|---|\n";
    for (const auto& r : reports) {
        out << "| " << r.suite << " | " << text::join(r.subset, ", ") << " | " << accuracy_cell(r) << " |\n";
    }
    return out.str();
}

/// Long format: one row per (suite, machine) plus an "aggregate" row.
inline std::string subset_csv(std::span<const SubsetReport> reports)
{
    std::ostringstream out;
    out << "suite,machine,subset,accuracy,runtime_fraction,oracle_subset,oracle_accuracy\n";
    for (const auto& r : reports) {
        const std::string runtime = r.runtime_fraction ? text::format_exact(*r.runtime_fraction) : "";
        const std::string oracle_subset = r.oracle_best ? text::join(r.oracle_best->subset, " ") : "";
        const auto row = [&](const std::string& machine, std::optional<double> acc, std::optional<double> oracle_acc) {
            out << r.suite << ',' << machine << ',' << text::join(r.subset, " ") << ','
                << (acc ? text::format_exact(*acc) : "") << ',' << runtime << ',' << oracle_subset << ','
                << (oracle_acc ? text::format_exact(*oracle_acc) : "") << '\n';
        };
        for (const auto& [m, a] : r.per_machine_accuracy) {
            std::optional<double> oa;
            if (r.oracle_best) {
                oa = r.oracle_best->per_machine_accuracy.at(m);
            }
            row(m, a, oa);
        }
        row("aggregate", r.aggregate_accuracy, r.oracle_best ? r.oracle_best->aggregate_accuracy : std::nullopt);
    }
    return out.str();
}

} // namespace benchscope

#endif
