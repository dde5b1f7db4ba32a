#include "benchscope/compare.hpp"

#include "helpers.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace benchscope;

namespace {

std::vector<MetricRow> rows_with(const std::string& suite, const std::string& machine, Metric m,
                                 const std::vector<double>& values)
{
    std::vector<MetricRow> out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        MetricRow r{suite, "w" + std::to_string(i), machine, {}};
        r.metrics.set(m, values[i]);
        out.push_back(r);
    }
    return out;
}

MetricComparison only(const SuiteComparison& c)
{
    EXPECT_EQ(c.metrics.size(), 1U);
    return c.metrics.front();
}

double round2(double v)
{
    return std::round(v * 100.0) / 100.0;
}

Errc code_of(const auto& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no benchscope::Error thrown";
    return Errc::InvalidArgument;
}

} // namespace

TEST(CompareSuites, SelfComparisonIsUnity)
{
    std::mt19937_64 rng(61);
    std::lognormal_distribution<double> d(2.0, 1.0);
    std::vector<double> v(15);
    for (auto& x : v) {
        x = d(rng);
    }
    const auto a = rows_with("s", "m", Metric::L1DtlbMpmi, v);
    const auto c = compare_suites(a, a, "m");
    EXPECT_EQ(only(c).ratio, 1.0);
}

TEST(CompareSuites, PublishedDtlbGeomeansGiveStatedRatios)
{
    // Single-value suites make the geomean the value itself.
    const auto older_int = rows_with("old_int", "CPU-C", Metric::L1DtlbMpmi, {49.32});
    const auto newer_int = rows_with("new_int", "CPU-C", Metric::L1DtlbMpmi, {61.23});
    EXPECT_EQ(round2(only(compare_suites(newer_int, older_int, "CPU-C")).ratio), 1.24);
    EXPECT_EQ(round2(only(compare_suites(older_int, newer_int, "CPU-C")).ratio), 0.81);
    const auto older_fp = rows_with("old_fp", "CPU-C", Metric::L1DtlbMpmi, {10.25});
    const auto newer_fp = rows_with("new_fp", "CPU-C", Metric::L1DtlbMpmi, {16.98});
    EXPECT_EQ(round2(only(compare_suites(newer_fp, older_fp, "CPU-C")).ratio), 1.66);
}

TEST(CompareSuites, GeomeanNotArithmeticMean)
{
    const auto a = rows_with("a", "m", Metric::Ipc, {1.0, 4.0});
    const auto b = rows_with("b", "m", Metric::Ipc, {2.0, 2.0});
    const auto mc = only(compare_suites(a, b, "m"));
    EXPECT_EQ(mc.geomean_a, 2.0);
    EXPECT_EQ(mc.ratio, 1.0);
    EXPECT_EQ(mc.box_a.median, 2.5);
}

TEST(CompareSuites, RatiosCompose)
{
    std::mt19937_64 rng(62);
    std::lognormal_distribution<double> d(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        std::vector<std::vector<MetricRow>> s;
        for (int k = 0; k < 3; ++k) {
            std::vector<double> v(1 + rng() % 10);
            for (auto& x : v) {
                x = d(rng);
            }
            s.push_back(rows_with("s" + std::to_string(k), "m", Metric::BranchMpki, v));
        }
        const double ab = only(compare_suites(s[0], s[1], "m")).ratio;
        const double bc = only(compare_suites(s[1], s[2], "m")).ratio;
        const double ac = only(compare_suites(s[0], s[2], "m")).ratio;
        EXPECT_NEAR(ab * bc, ac, 1e-12 * ac);
        const double ba = only(compare_suites(s[1], s[0], "m")).ratio;
        EXPECT_NEAR(ab * ba, 1.0, 1e-12);
    }
}

TEST(CompareSuites, RowOrderDoesNotMatter)
{
    std::mt19937_64 rng(63);
    std::lognormal_distribution<double> d(0.0, 1.0);
    std::vector<double> v(12);
    for (auto& x : v) {
        x = d(rng);
    }
    const auto b = rows_with("b", "m", Metric::Ipc, {1.5});
    const double base = only(compare_suites(rows_with("a", "m", Metric::Ipc, v), b, "m")).ratio;
    for (int t = 0; t < 20; ++t) {
        std::shuffle(v.begin(), v.end(), rng);
        EXPECT_NEAR(only(compare_suites(rows_with("a", "m", Metric::Ipc, v), b, "m")).ratio, base, 1e-13 * base);
    }
}

TEST(CompareSuites, ZerosAreExcludedAndCounted)
{
    const auto a = rows_with("a", "m", Metric::L3Mpki, {0.0, 2.0, 8.0});
    const auto b = rows_with("b", "m", Metric::L3Mpki, {4.0});
    const auto mc = only(compare_suites(a, b, "m"));
    EXPECT_EQ(mc.ratio, 1.0);
    EXPECT_EQ(mc.excluded_zeros_a, 1U);
    EXPECT_EQ(mc.box_a.min, 0.0);
}

TEST(CompareSuites, OnlyRowsOfTheChosenMachineCount)
{
    auto a = rows_with("a", "m", Metric::Ipc, {2.0});
    const auto other = rows_with("a", "x", Metric::Ipc, {100.0});
    a.insert(a.end(), other.begin(), other.end());
    const auto b = rows_with("b", "m", Metric::Ipc, {1.0});
    EXPECT_EQ(only(compare_suites(a, b, "m")).ratio, 2.0);
}

TEST(CompareSuites, Errors)
{
    const auto a = rows_with("a", "m", Metric::L3Mpki, {0.0, 0.0});
    const auto b = rows_with("b", "m", Metric::L3Mpki, {4.0});
    EXPECT_EQ(code_of([&] { compare_suites(a, b, "m"); }), Errc::NoPositiveValues);
    EXPECT_EQ(code_of([&] { compare_suites(a, b, "nowhere"); }), Errc::EmptySuite);
    EXPECT_EQ(code_of([&] { compare_suites(std::vector<MetricRow>{}, b, "m"); }), Errc::EmptySuite);
    const std::vector<Metric> want{Metric::Ipc};
    EXPECT_EQ(code_of([&] { compare_suites(b, b, "m", want); }), Errc::NoPositiveValues);
}

TEST(CompareSuites, SelectionLimitsMetrics)
{
    std::vector<MetricRow> a{{"a", "w", "m", derive_metrics(testing_support::make_record("a", "w", "m",
                                                                   testing_support::full_events()))}};
    const auto all = compare_suites(a, a, "m");
    EXPECT_EQ(all.metrics.size(), 19U);
    const std::vector<Metric> two{Metric::Ipc, Metric::L1dMpki};
    const auto sel = compare_suites(a, a, "m", two);
    ASSERT_EQ(sel.metrics.size(), 2U);
    EXPECT_EQ(sel.metrics[1].metric, Metric::L1dMpki);
    const auto csv = comparison_csv(sel);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
    EXPECT_NE(comparison_svg(sel).find("<svg"), std::string::npos);
}

TEST(InstructionVolume, RatioOfArithmeticMeans)
{
    const std::vector<double> speed{30.0, 10.0};
    const std::vector<double> rate{4.0, 6.0};
    EXPECT_EQ(instruction_volume_ratio(speed, rate), 4.0);
    EXPECT_THROW(instruction_volume_ratio(std::vector<double>{}, rate), Error);
}
