#ifndef BENCHSCOPE_PROXY_HPP
#define BENCHSCOPE_PROXY_HPP

#include "benchscope/catalog.hpp"
#include "benchscope/dataset.hpp"
#include "benchscope/error.hpp"
#include "benchscope/features.hpp"
#include "benchscope/metrics.hpp"
#include "benchscope/subset.hpp"
#include "benchscope/text.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace benchscope {

/// Average event rates of one workload while it runs, plus its pass duration.
struct WorkloadProfile {
    std::string workload;
    EventTotals rates; ///< events per second
    double duration = 0.0;

    static WorkloadProfile from_record(const RunRecord& record)
    {
        if (!record.wallclock_seconds || !(*record.wallclock_seconds > 0.0)) {
            throw Error(Errc::InvalidArgument, record.workload + "@" + record.machine + " has no wallclock_seconds");
        }
        WorkloadProfile p;
        p.workload = record.workload;
        p.duration = *record.wallclock_seconds;
        for (const auto& [ev, v] : supported_totals(record)) {
            p.rates.emplace(ev, v / p.duration);
        }
        return p;
    }
};

/// Every copy cycles through `order` forever; copy c is phase-shifted so that at
/// simulated time t it runs whatever sits at position (t + offsets[c]) mod period.
struct RrrSchedule {
    std::vector<std::string> order;
    std::size_t copies = 1;
    std::vector<double> offsets;
    double horizon = 0.0;
};

namespace detail {

inline const WorkloadProfile& profile_for(std::span<const WorkloadProfile> profiles, const std::string& name)
{
    for (const auto& p : profiles) {
        if (p.workload == name) {
            return p;
        }
    }
    throw Error(Errc::UnknownWorkload, name);
}

inline double period_of(std::span<const WorkloadProfile> profiles, std::span<const std::string> order)
{
    double period = 0.0;
    for (const auto& w : order) {
        period += profile_for(profiles, w).duration;
    }
    return period;
}

} // namespace detail

/// Uniform stagger: copy i starts i * period / copies into the sequence.
inline RrrSchedule staggered_schedule(std::span<const WorkloadProfile> profiles, std::vector<std::string> order,
                                      std::size_t copies, double periods = 1.0)
{
    if (copies == 0) {
        throw Error(Errc::InvalidSchedule, "at least one copy is required");
    }
    RrrSchedule s;
    s.order = std::move(order);
    s.copies = copies;
    const double period = detail::period_of(profiles, s.order);
    for (std::size_t i = 0; i < copies; ++i) {
        s.offsets.push_back(period * static_cast<double>(i) / static_cast<double>(copies));
    }
    s.horizon = period * periods;
    return s;
}

struct CopyBlend {
    double offset = 0.0;
    std::map<std::string, double> seconds;     ///< per workload
    std::map<std::string, double> time_shares; ///< seconds / horizon, sums to 1
    EventTotals totals;
    MetricVector metrics;
};

struct BlendProfile {
    MetricVector aggregate;                         ///< from system-wide totals
    EventTotals totals;                             ///< system-wide event counts
    std::map<std::string, double> occupied_seconds; ///< summed over copies
    std::map<std::string, double> time_shares;      ///< occupied / (copies * horizon)
    std::vector<CopyBlend> copies;
    double period = 0.0;
    double horizon = 0.0;
    std::optional<double> distance_to_target;
    std::optional<std::string> target;
};

/// Constant-rate RRR simulation: each workload emits events at its average rate
/// while scheduled, so totals are sums of rate x overlap over exact intervals.
/// Only events every constituent reports are accumulated.
inline BlendProfile simulate_rrr(std::span<const WorkloadProfile> profiles, const RrrSchedule& schedule)
{
    if (schedule.order.empty()) {
        throw Error(Errc::InvalidSchedule, "empty benchmark order");
    }
    if (!(schedule.horizon > 0.0)) {
        throw Error(Errc::ZeroHorizon, "horizon must be positive");
    }
    std::vector<const WorkloadProfile*> jobs;
    for (const auto& w : schedule.order) {
        const auto& p = detail::profile_for(profiles, w);
        if (!(p.duration > 0.0)) {
            throw Error(Errc::InvalidSchedule, w + " has a non-positive duration");
        }
        jobs.push_back(&p);
    }
    const double period = detail::period_of(profiles, schedule.order);
    if (schedule.copies == 0 || schedule.offsets.size() != schedule.copies) {
        throw Error(Errc::InvalidSchedule, "need one offset per copy");
    }
    for (std::size_t c = 0; c < schedule.offsets.size(); ++c) {
        const double o = schedule.offsets[c];
        if (!(o >= 0.0) || !(o < period) || (c > 0 && !(o > schedule.offsets[c - 1]))) {
            throw Error(Errc::InvalidSchedule, "offsets must be strictly increasing within [0, period)");
        }
    }
    if (schedule.horizon < period) {
        throw Error(Errc::InvalidSchedule, "horizon must cover at least one full period");
    }

    std::set<std::string, std::less<>> events;
    for (const auto& [ev, r] : jobs.front()->rates) {
        events.insert(ev);
    }
    for (const auto* j : jobs) {
        std::erase_if(events, [&](const std::string& ev) { return !j->rates.contains(ev); });
    }

    std::vector<double> starts(jobs.size(), 0.0);
    for (std::size_t j = 1; j < jobs.size(); ++j) {
        starts[j] = starts[j - 1] + jobs[j - 1]->duration;
    }

    BlendProfile blend;
    blend.period = period;
    blend.horizon = schedule.horizon;
    for (const auto& ev : events) {
        blend.totals[ev] = 0.0;
    }
    for (std::size_t c = 0; c < schedule.copies; ++c) {
        CopyBlend cb;
        cb.offset = schedule.offsets[c];
        const double lo = cb.offset;
        const double hi = cb.offset + schedule.horizon;
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            const double d = jobs[j]->duration;
            const auto first = static_cast<long long>(std::floor((lo - starts[j] - d) / period));
            const auto last = static_cast<long long>(std::ceil((hi - starts[j]) / period));
            double seconds = 0.0;
            for (long long k = first; k <= last; ++k) {
                const double s = static_cast<double>(k) * period + starts[j];
                seconds += std::max(0.0, std::min(s + d, hi) - std::max(s, lo));
            }
            cb.seconds[jobs[j]->workload] += seconds;
        }
        for (const auto& ev : events) {
            double total = 0.0;
            for (const auto& [w, secs] : cb.seconds) {
                total += detail::profile_for(profiles, w).rates.find(ev)->second * secs;
            }
            cb.totals[ev] = total;
            blend.totals[ev] += total;
        }
        for (const auto& [w, secs] : cb.seconds) {
            blend.occupied_seconds[w] += secs;
            cb.time_shares[w] = secs / schedule.horizon;
        }
        cb.metrics = derive_metrics(cb.totals, "copy " + std::to_string(c));
        blend.copies.push_back(std::move(cb));
    }
    const double capacity = static_cast<double>(schedule.copies) * schedule.horizon;
    for (const auto& [w, secs] : blend.occupied_seconds) {
        blend.time_shares[w] = secs / capacity;
    }
    blend.aggregate = derive_metrics(blend.totals, "blend");
    return blend;
}

using MetricWeights = std::map<Metric, double>;
using MetricScales = std::map<Metric, double>; ///< spread used to z-score differences

/// Standard deviations of the given machine's columns in a normalized matrix.
/// Constant columns carry no spread and are left out.
inline MetricScales metric_scales(const FeatureMatrix& normalized, std::string_view machine)
{
    MetricScales out;
    for (std::size_t c = 0; c < normalized.cols.size(); ++c) {
        if (normalized.cols[c].machine == machine && !normalized.constant[c]) {
            out[normalized.cols[c].metric] = normalized.col_stdevs(static_cast<Eigen::Index>(c));
        }
    }
    return out;
}

inline MetricWeights uniform_weights()
{
    MetricWeights w;
    for (const auto m : all_metrics()) {
        w[m] = 1.0;
    }
    return w;
}

struct BlendDistance {
    double distance = 0.0;
    std::map<Metric, double> relative_gaps; ///< |blend - target| / target, every shared metric
    std::vector<Metric> used;               ///< metrics entering the distance
};

/// sqrt(sum_m w_m * ((blend_m - target_m) / scale_m)^2) over metrics with positive
/// weight available on both sides. Metrics without a scale use 1.
inline BlendDistance blend_distance(const MetricVector& blend, const MetricVector& target, const MetricWeights& weights,
                                    const MetricScales* scales = nullptr)
{
    BlendDistance out;
    double sum = 0.0;
    for (const auto m : all_metrics()) {
        const auto b = blend[m];
        const auto t = target[m];
        if (!b || !t) {
            continue;
        }
        if (*t != 0.0) {
            out.relative_gaps[m] = std::abs(*b - *t) / std::abs(*t);
        }
        const auto w = weights.find(m);
        if (w == weights.end() || !(w->second > 0.0)) {
            continue;
        }
        double scale = 1.0;
        if (scales != nullptr) {
            if (const auto s = scales->find(m); s != scales->end() && s->second > 0.0) {
                scale = s->second;
            }
        }
        const double z = (*b - *t) / scale;
        sum += w->second * z * z;
        out.used.push_back(m);
    }
    if (out.used.empty()) {
        throw Error(Errc::NoCommonMetrics, "no weighted metric is available on both blend and target");
    }
    out.distance = std::sqrt(sum);
    return out;
}

struct RankedMix {
    std::vector<std::string> mix;
    BlendProfile blend;
    double distance = 0.0;
};

/// Exhaustive search over every mix of 1..max_constituents pool members. Each mix
/// runs under an equal-duration stagger with one copy per constituent over one
/// period. Ranked by distance, then mix size, then names.
inline std::vector<RankedMix> search_mix(std::span<const WorkloadProfile> pool, const MetricVector& target,
                                         std::size_t max_constituents, const MetricWeights& weights,
                                         const MetricScales* scales = nullptr,
                                         double budget = kDefaultOracleBudget)
{
    const std::size_t n = pool.size();
    if (max_constituents == 0) {
        throw Error(Errc::InvalidArgument, "mix size must be positive");
    }
    if (max_constituents > n) {
        throw Error(Errc::BudgetExceeded, "mix size " + std::to_string(max_constituents) + " exceeds pool of "
                + std::to_string(n));
    }
    double count = 0.0;
    for (std::size_t k = 1; k <= max_constituents; ++k) {
        count += binomial(n, k);
    }
    if (count > budget) {
        throw Error(Errc::BudgetExceeded, "mix search would evaluate " + text::format_fixed(count, 0) + " mixes");
    }

    std::vector<WorkloadProfile> unit(pool.begin(), pool.end());
    std::sort(unit.begin(), unit.end(), [](const auto& a, const auto& b) { return a.workload < b.workload; });
    for (auto& p : unit) {
        p.duration = 1.0;
    }

    std::vector<RankedMix> ranked;
    for (std::size_t k = 1; k <= max_constituents; ++k) {
        std::vector<std::size_t> pos(k);
        std::iota(pos.begin(), pos.end(), 0);
        while (true) {
            std::vector<std::string> names;
            for (const auto i : pos) {
                names.push_back(unit[i].workload);
            }
            const auto schedule = staggered_schedule(unit, names, k);
            auto blend = simulate_rrr(unit, schedule);
            const auto dist = blend_distance(blend.aggregate, target, weights, scales);
            blend.distance_to_target = dist.distance;
            ranked.push_back({std::move(names), std::move(blend), dist.distance});

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
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const RankedMix& a, const RankedMix& b) {
        if (a.distance != b.distance) {
            return a.distance < b.distance;
        }
        if (a.mix.size() != b.mix.size()) {
            return a.mix.size() < b.mix.size();
        }
        return a.mix < b.mix;
    });
    return ranked;
}

struct MixEntry {
    std::string workload;
    std::optional<double> duration;
};

/// Mix specification: one "workload[,duration_seconds]" per line, '#' comments.
inline std::vector<MixEntry> parse_mix(std::istream& in)
{
    std::vector<MixEntry> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = text::trim(line);
        if (body.empty() || body.front() == '#') {
            continue;
        }
        const auto f = text::split(body);
        if (f.size() > 2 || f[0].empty()) {
            throw Error(Errc::MalformedLine, "mix line " + std::to_string(line_no));
        }
        MixEntry e{f[0], std::nullopt};
        if (f.size() == 2 && !f[1].empty()) {
            const auto d = text::parse_double(f[1]);
            if (!d || !(*d > 0.0)) {
                throw Error(Errc::NonNumericValue, "mix line " + std::to_string(line_no) + ": duration");
            }
            e.duration = d;
        }
        out.push_back(std::move(e));
    }
    if (out.empty()) {
        throw Error(Errc::EmptyInput, "mix specification lists no workloads");
    }
    return out;
}

inline std::vector<MixEntry> parse_mix_file(const std::string& path)
{
    auto in = text::open_input(path);
    return parse_mix(in);
}

/// Per-metric rows: blend, target, then each constituent's own value.
inline std::string blend_csv(const BlendProfile& blend, const std::optional<MetricVector>& target,
                             const std::map<std::string, MetricVector>& constituents)
{
    std::ostringstream out;
    out << "metric,blend,target";
    for (const auto& [w, mv] : constituents) {
        out << ',' << w;
    }
    out << '\n';
    const auto cell = [](std::optional<double> v) { return v ? text::format_exact(*v) : std::string(); };
    for (const auto m : all_metrics()) {
        out << info(m).key << ',' << cell(blend.aggregate[m]) << ',' << (target ? cell((*target)[m]) : "");
        for (const auto& [w, mv] : constituents) {
            out << ',' << cell(mv[m]);
        }
        out << '\n';
    }
    return out.str();
}

inline std::string blend_markdown(const BlendProfile& blend, const std::optional<MetricVector>& target,
                                  const std::map<std::string, MetricVector>& constituents)
{
    std::ostringstream out;
    out << "| Metric | Blend |" << (target ? " Target | Gap |" : "");
    for (const auto& [w, mv] : constituents) {
        out << ' ' << w << " |";
    }
    out << "\n|---|---|" << (target ? "---|---|" : "");
    for (std::size_t i = 0; i < constituents.size(); ++i) {
        out << "---|";
    }
    out << '\n';
    const auto cell = [](std::optional<double> v) { return v ? text::format_fixed(*v, 3) : std::string("n/a"); };
    for (const auto m : all_metrics()) {
        if (!blend.aggregate[m]) {
            continue;
        }
        out << "| " << info(m).label << " | " << cell(blend.aggregate[m]) << " |";
        if (target) {
            const auto t = (*target)[m];
            out << ' ' << cell(t) << " | ";
            if (t && *t != 0.0) {
                out << text::format_fixed(std::abs(*blend.aggregate[m] - *t) / std::abs(*t) * 100.0, 1) << "%";
            } else {
                out << "n/a";
            }
            out << " |";
        }
        for (const auto& [w, mv] : constituents) {
            out << ' ' << cell(mv[m]) << " |";
        }
        out << '\n';
    }
    if (blend.distance_to_target) {
        out << "\nDistance to " << blend.target.value_or("target") << ": "
            << text::format_fixed(*blend.distance_to_target, 4) << "\n";
    }
    return out.str();
}

} // namespace benchscope

#endif
