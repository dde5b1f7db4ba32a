#include "benchscope/subset.hpp"

#include "helpers.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace benchscope;

namespace {

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

ScoreTable random_table(std::mt19937_64& rng, std::size_t machines, std::size_t workloads, double sigma = 0.4)
{
    std::lognormal_distribution<double> d(1.0, sigma);
    ScoreTable t;
    const auto names = testing_support::labels(workloads);
    for (std::size_t m = 0; m < machines; ++m) {
        for (const auto& w : names) {
            t["M" + std::to_string(m)][w] = d(rng);
        }
    }
    return t;
}

std::vector<std::vector<double>> as_rows(const ScoreTable& t)
{
    std::vector<std::vector<double>> out;
    for (const auto& [m, ms] : t) {
        auto& row = out.emplace_back();
        for (const auto& [w, s] : ms) {
            row.push_back(s);
        }
    }
    return out;
}

} // namespace

TEST(EvaluateSubset, TwoWorkloadHandCase)
{
    const ScoreTable t{{"m", {{"a", 2.0}, {"b", 8.0}}}};
    const std::vector<std::string> a{"a"};
    const std::vector<std::string> b{"b"};
    const auto ra = evaluate_subset(t, a);
    EXPECT_EQ(ra.per_machine_accuracy.at("m"), 0.5);
    EXPECT_EQ(*ra.aggregate_accuracy, 0.5);
    const auto rb = evaluate_subset(t, b);
    EXPECT_EQ(rb.per_machine_accuracy.at("m"), 0.0);
    EXPECT_FALSE(rb.aggregate_accuracy);
}

TEST(EvaluateSubset, FullSuiteScoresExactlyOne)
{
    std::mt19937_64 rng(51);
    for (int t = 0; t < 50; ++t) {
        const auto table = random_table(rng, 1 + rng() % 4, 2 + rng() % 20, 2.0);
        const auto all = testing_support::labels(table.begin()->second.size());
        const auto r = evaluate_subset(table, all);
        for (const auto& [m, a] : r.per_machine_accuracy) {
            EXPECT_EQ(a, 1.0);
        }
        EXPECT_EQ(*r.aggregate_accuracy, 1.0);
    }
}

TEST(EvaluateSubset, MatchesLogOracleAndIgnoresScoreUnits)
{
    std::mt19937_64 rng(52);
    for (int t = 0; t < 100; ++t) {
        auto table = random_table(rng, 3, 10);
        const std::vector<std::size_t> pick{1, 4, 7};
        const std::vector<std::string> names{"w01", "w04", "w07"};
        const auto r = evaluate_subset(table, names);
        const auto rows = as_rows(table);
        std::size_t m = 0;
        for (const auto& [machine, a] : r.per_machine_accuracy) {
            EXPECT_NEAR(a, oracle::accuracy(rows[m++], pick), 1e-12);
        }
        for (auto& [machine, ms] : table) {
            for (auto& [w, s] : ms) {
                s *= 37.5;
            }
        }
        const auto scaled = evaluate_subset(table, names);
        for (const auto& [machine, a] : r.per_machine_accuracy) {
            EXPECT_NEAR(scaled.per_machine_accuracy.at(machine), a, 1e-12);
        }
    }
}

TEST(EvaluateSubset, RuntimeFractionUsesWallclock)
{
    const ScoreTable t{{"m", {{"a", 2.0}, {"b", 8.0}, {"c", 4.0}}}};
    const std::map<std::string, double> wall{{"a", 1.0}, {"b", 3.0}, {"c", 6.0}};
    const std::vector<std::string> s{"b", "c"};
    EXPECT_DOUBLE_EQ(*evaluate_subset(t, s, "x", &wall).runtime_fraction, 0.9);
}

TEST(EvaluateSubset, RejectsBadSubsetsAndTables)
{
    const ScoreTable t{{"m", {{"a", 2.0}, {"b", 8.0}}}};
    EXPECT_EQ(code_of([&] { evaluate_subset(t, std::vector<std::string>{}); }), Errc::EmptySubset);
    EXPECT_EQ(code_of([&] { evaluate_subset(t, std::vector<std::string>{"z"}); }), Errc::UnknownWorkload);
    EXPECT_EQ(code_of([&] { evaluate_subset(t, std::vector<std::string>{"a", "a"}); }), Errc::InvalidArgument);
    const ScoreTable ragged{{"m", {{"a", 2.0}, {"b", 8.0}}}, {"n", {{"a", 2.0}}}};
    EXPECT_THROW(evaluate_subset(ragged, std::vector<std::string>{"a"}), Error);
}

TEST(Oracle, AgreesWithRecursiveEnumeration)
{
    std::mt19937_64 rng(53);
    for (int t = 0; t < 60; ++t) {
        const std::size_t n = 4 + rng() % 9;
        const std::size_t k = 1 + rng() % (n - 1);
        const auto table = random_table(rng, 1 + rng() % 3, n);
        const auto best = oracle_best_subset(table, k);
        const auto expect = oracle::best_subset(as_rows(table), k);
        ASSERT_TRUE(best.aggregate_accuracy);
        EXPECT_NEAR(*best.aggregate_accuracy, expect.aggregate, 1e-12);
        std::vector<std::string> names;
        for (const auto i : expect.pick) {
            names.push_back(testing_support::labels(n)[i]);
        }
        EXPECT_EQ(best.subset, names);
        EXPECT_EQ(best.evaluated, static_cast<std::size_t>(binomial(n, k)));
    }
}

TEST(Oracle, FullSizeSubsetIsTheSuite)
{
    std::mt19937_64 rng(54);
    const auto table = random_table(rng, 2, 6);
    EXPECT_EQ(*oracle_best_subset(table, 6).aggregate_accuracy, 1.0);
}

TEST(Oracle, BudgetAndRangeGuards)
{
    std::mt19937_64 rng(55);
    const auto table = random_table(rng, 1, 40);
    EXPECT_EQ(code_of([&] { oracle_best_subset(table, 20); }), Errc::BudgetExceeded);
    EXPECT_EQ(code_of([&] { oracle_best_subset(table, 0); }), Errc::InvalidArgument);
    EXPECT_EQ(code_of([&] { oracle_best_subset(table, 41); }), Errc::InvalidArgument);
    EXPECT_EQ(binomial(40, 20), 137846528820.0);
    EXPECT_NO_THROW(oracle_best_subset(table, 3));
}

TEST(Oracle, AllUndefinedAggregatesFallBackToWorstMachine)
{
    // Every single-workload subset has a zero-accuracy machine except none; the
    // objective still returns a deterministic pick.
    const ScoreTable t{{"m", {{"a", 1.0}, {"b", 4.0}}}, {"n", {{"a", 4.0}, {"b", 1.0}}}};
    const auto best = oracle_best_subset(t, 1);
    EXPECT_FALSE(best.aggregate_accuracy);
    EXPECT_EQ(best.subset, std::vector<std::string>{"a"});
    EXPECT_EQ(best.per_machine_accuracy.at("m"), 0.5);
}

TEST(SelectRepresentatives, OneMedoidPerGroup)
{
    Eigen::MatrixXd x(6, 1);
    x << 0.0, 0.1, 0.2, 10.0, 10.1, 10.3;
    const auto labels = testing_support::labels(6);
    const auto dg = build_dendrogram(x, labels);
    const Scores s{labels, x};
    ScoreTable t;
    for (std::size_t i = 0; i < 6; ++i) {
        t["m"][labels[i]] = 1.0 + static_cast<double>(i);
    }
    const auto r = select_representatives(dg, s, t, 2, "suite");
    EXPECT_EQ(r.subset, (std::vector<std::string>{"w01", "w04"}));
    ASSERT_EQ(r.groups.size(), 2U);
    EXPECT_EQ(r.groups[0].size(), 3U);
    const std::vector<std::size_t> pick{1, 4};
    EXPECT_NEAR(*r.aggregate_accuracy, oracle::accuracy(as_rows(t)[0], pick), 1e-12);
    const std::vector<SubsetReport> reports{r};
    EXPECT_NE(subset_markdown(reports).find("| suite | w01, w04 |"), std::string::npos);
}
