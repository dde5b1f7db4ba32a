#ifndef BENCHSCOPE_COMPARE_HPP
#define BENCHSCOPE_COMPARE_HPP

#include "benchscope/catalog.hpp"
#include "benchscope/error.hpp"
#include "benchscope/metrics.hpp"
#include "benchscope/stats.hpp"
#include "benchscope/svg.hpp"
#include "benchscope/text.hpp"

#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace benchscope {

struct MetricComparison {
    Metric metric;
    double geomean_a = 0.0;
    double geomean_b = 0.0;
    double ratio = 0.0; ///< geomean_a / geomean_b
    std::size_t excluded_zeros_a = 0;
    std::size_t excluded_zeros_b = 0;
    stats::Summary box_a;
    stats::Summary box_b;
};

struct SuiteComparison {
    std::string suite_a;
    std::string suite_b;
    std::string machine;
    std::vector<MetricComparison> metrics;
};

namespace detail {

inline std::vector<double> metric_values(std::span<const MetricRow> rows, std::string_view machine, Metric m)
{
    std::vector<double> out;
    for (const auto& r : rows) {
        if (r.machine == machine) {
            if (const auto v = r.metrics[m]) {
                out.push_back(*v);
            }
        }
    }
    return out;
}

inline std::string suite_name(std::span<const MetricRow> rows, std::string_view machine)
{
    for (const auto& r : rows) {
        if (r.machine == machine) {
            return r.suite;
        }
    }
    return {};
}

} // namespace detail

/// Geomean ratios and box statistics per metric on one machine. With an empty
/// `selection`, every metric available on both sides is compared; a compared
/// metric whose values on one side are all zero raises NoPositiveValues.
inline SuiteComparison compare_suites(std::span<const MetricRow> a, std::span<const MetricRow> b,
                                      std::string_view machine, std::span<const Metric> selection = {})
{
    SuiteComparison out;
    out.machine = std::string(machine);
    out.suite_a = detail::suite_name(a, machine);
    out.suite_b = detail::suite_name(b, machine);
    if (out.suite_a.empty() || out.suite_b.empty()) {
        throw Error(Errc::EmptySuite, "a compared suite has no rows on machine " + out.machine);
    }
    std::vector<Metric> wanted(selection.begin(), selection.end());
    if (wanted.empty()) {
        const auto all = all_metrics();
        wanted.assign(all.begin(), all.end());
    }
    for (const auto m : wanted) {
        const auto va = detail::metric_values(a, machine, m);
        const auto vb = detail::metric_values(b, machine, m);
        if (va.empty() || vb.empty()) {
            if (!selection.empty()) {
                throw Error(Errc::NoPositiveValues, std::string(info(m).key) + " is unavailable on one side");
            }
            continue;
        }
        MetricComparison mc;
        mc.metric = m;
        mc.box_a = stats::summarize(va);
        mc.box_b = stats::summarize(vb);
        if (!mc.box_a.geomean.value || !mc.box_b.geomean.value) {
            throw Error(Errc::NoPositiveValues, std::string(info(m).key));
        }
        mc.geomean_a = *mc.box_a.geomean.value;
        mc.geomean_b = *mc.box_b.geomean.value;
        mc.ratio = mc.geomean_a / mc.geomean_b;
        mc.excluded_zeros_a = mc.box_a.geomean.excluded_zeros;
        mc.excluded_zeros_b = mc.box_b.geomean.excluded_zeros;
        out.metrics.push_back(mc);
    }
    return out;
}

/// Ratio of arithmetic-mean instruction counts, speed over rate.
inline double instruction_volume_ratio(std::span<const double> speed, std::span<const double> rate)
{
    if (speed.empty() || rate.empty()) {
        throw Error(Errc::EmptySuite, "instruction volume ratio needs both suites");
    }
    return stats::mean(speed) / stats::mean(rate);
}

inline std::string comparison_csv(const SuiteComparison& c)
{
    std::ostringstream out;
    out << "metric,suite_a,suite_b,machine,geomean_a,geomean_b,ratio,excluded_zeros_a,excluded_zeros_b,"
           "min_a,q1_a,median_a,q3_a,max_a,min_b,q1_b,median_b,q3_b,max_b\n";
    const auto box = [&](const stats::Summary& s) {
        out << ',' << text::format_exact(s.min) << ',' << text::format_exact(s.q1) << ','
            << text::format_exact(s.median) << ',' << text::format_exact(s.q3) << ',' << text::format_exact(s.max);
    };
    for (const auto& m : c.metrics) {
        out << info(m.metric).key << ',' << c.suite_a << ',' << c.suite_b << ',' << c.machine << ','
            << text::format_exact(m.geomean_a) << ',' << text::format_exact(m.geomean_b) << ','
            << text::format_exact(m.ratio) << ',' << m.excluded_zeros_a << ',' << m.excluded_zeros_b;
        box(m.box_a);
        box(m.box_b);
        out << '\n';
    }
    return out.str();
}

inline std::string comparison_markdown(const SuiteComparison& c)
{
    std::ostringstream out;
    out << "| Metric | " << c.suite_a << " geomean | " << c.suite_b << " geomean | Ratio | Zeros excluded |\n";
    out << "|---|---|---|---|---|\n";
    for (const auto& m : c.metrics) {
        out << "| " << info(m.metric).label << " | " << text::format_fixed(m.geomean_a, 3) << " | "
            << text::format_fixed(m.geomean_b, 3) << " | " << text::format_fixed(m.ratio, 2) << "x | "
            << m.excluded_zeros_a << " / " << m.excluded_zeros_b << " |\n";
    }
    return out.str();
}

inline std::string comparison_svg(const SuiteComparison& c)
{
    std::vector<svg::BoxPanel> panels;
    for (const auto& m : c.metrics) {
        panels.push_back({std::string(info(m.metric).label), {{c.suite_a, m.box_a}, {c.suite_b, m.box_b}}});
    }
    return svg::render_boxplots(panels, c.suite_a + " vs " + c.suite_b + " on " + c.machine);
}

} // namespace benchscope

#endif
