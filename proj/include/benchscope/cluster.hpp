#ifndef BENCHSCOPE_CLUSTER_HPP
#define BENCHSCOPE_CLUSTER_HPP

#include "benchscope/error.hpp"
#include "benchscope/reduce.hpp"
#include "benchscope/text.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace benchscope {

enum class Linkage { Ward, Average, Complete, Single };

constexpr std::string_view to_string(Linkage l) noexcept
{
    switch (l) {
    case Linkage::Ward: return "ward";
    case Linkage::Average: return "average";
    case Linkage::Complete: return "complete";
    case Linkage::Single: return "single";
    }
    return "ward";
}

inline Linkage parse_linkage(std::string_view s)
{
    for (const auto l : {Linkage::Ward, Linkage::Average, Linkage::Complete, Linkage::Single}) {
        if (to_string(l) == s) {
            return l;
        }
    }
    throw Error(Errc::InvalidArgument, "unknown linkage '" + std::string(s) + "'");
}

/// Node ids: 0..n-1 are leaves, n+i is the node created by merges[i].
struct Merge {
    std::size_t left;  ///< smaller node id
    std::size_t right;
    double height;
    std::size_t size;

    bool operator==(const Merge&) const = default;
};

struct Dendrogram {
    std::vector<std::string> leaves;
    std::vector<Merge> merges;
    Linkage linkage = Linkage::Ward;

    [[nodiscard]] std::size_t leaf_count() const noexcept { return leaves.size(); }

    [[nodiscard]] double root_height() const noexcept { return merges.empty() ? 0.0 : merges.back().height; }

    /// Leaves in left-to-right drawing order (depth-first, left child first).
    [[nodiscard]] std::vector<std::size_t> leaf_order() const
    {
        const std::size_t n = leaves.size();
        if (merges.empty()) {
            std::vector<std::size_t> all(n);
            std::iota(all.begin(), all.end(), 0);
            return all;
        }
        std::vector<std::size_t> order;
        std::vector<std::size_t> stack{n + merges.size() - 1};
        while (!stack.empty()) {
            const auto node = stack.back();
            stack.pop_back();
            if (node < n) {
                order.push_back(node);
            } else {
                const auto& m = merges[node - n];
                stack.push_back(m.right);
                stack.push_back(m.left);
            }
        }
        return order;
    }
};

/// Agglomerative clustering over Euclidean distances between score rows.
///
/// Cluster distances are maintained with the Lance-Williams recurrence. Ward
/// heights follow the usual convention sqrt(2|A||B|/(|A|+|B|)) * |cA - cB|, so two
/// singletons merge at their Euclidean distance under every linkage. Equal
/// heights merge the pair whose smaller leaf index is lowest (then the other
/// member's smallest leaf).
inline Dendrogram build_dendrogram(const Eigen::MatrixXd& scores, std::vector<std::string> labels,
                                   Linkage linkage = Linkage::Ward)
{
    const auto n = static_cast<std::size_t>(scores.rows());
    if (n < 2) {
        throw Error(Errc::TooFewRows, "clustering needs at least two workloads");
    }
    if (labels.size() != n) {
        throw Error(Errc::DimensionMismatch, "label count differs from score rows");
    }

    std::vector<double> dist(n * n, 0.0);
    const auto at = [&](std::size_t i, std::size_t j) -> double& { return dist[i * n + j]; };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = (scores.row(static_cast<Eigen::Index>(i)) - scores.row(static_cast<Eigen::Index>(j))).norm();
            at(i, j) = d;
            at(j, i) = d;
        }
    }

    // Slot i holds one active cluster.
    std::vector<bool> active(n, true);
    std::vector<std::size_t> node(n);
    std::vector<std::size_t> size(n, 1);
    std::vector<std::size_t> min_leaf(n);
    std::iota(node.begin(), node.end(), 0);
    std::iota(min_leaf.begin(), min_leaf.end(), 0);

    Dendrogram dg;
    dg.leaves = std::move(labels);
    dg.linkage = linkage;
    dg.merges.reserve(n - 1);

    for (std::size_t step = 0; step + 1 < n; ++step) {
        std::size_t bi = 0;
        std::size_t bj = 0;
        double best = std::numeric_limits<double>::infinity();
        std::pair<std::size_t, std::size_t> best_key{n, n};
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i]) {
                continue;
            }
            for (std::size_t j = i + 1; j < n; ++j) {
                if (!active[j]) {
                    continue;
                }
                const double d = at(i, j);
                const std::pair<std::size_t, std::size_t> key = std::minmax(min_leaf[i], min_leaf[j]);
                if (d < best || (d == best && key < best_key)) {
                    best = d;
                    best_key = key;
                    bi = i;
                    bj = j;
                }
            }
        }

        const double ni = static_cast<double>(size[bi]);
        const double nj = static_cast<double>(size[bj]);
        for (std::size_t k = 0; k < n; ++k) {
            if (!active[k] || k == bi || k == bj) {
                continue;
            }
            const double dki = at(k, bi);
            const double dkj = at(k, bj);
            double updated = 0.0;
            switch (linkage) {
            case Linkage::Single: updated = std::min(dki, dkj); break;
            case Linkage::Complete: updated = std::max(dki, dkj); break;
            case Linkage::Average: updated = (ni * dki + nj * dkj) / (ni + nj); break;
            case Linkage::Ward: {
                const double nk = static_cast<double>(size[k]);
                const double sq = ((ni + nk) * dki * dki + (nj + nk) * dkj * dkj - nk * best * best) / (ni + nj + nk);
                updated = std::sqrt(std::max(0.0, sq));
                break;
            }
            }
            at(k, bi) = updated;
            at(bi, k) = updated;
        }

        dg.merges.push_back({std::min(node[bi], node[bj]), std::max(node[bi], node[bj]), best, size[bi] + size[bj]});
        node[bi] = n + step;
        size[bi] += size[bj];
        min_leaf[bi] = std::min(min_leaf[bi], min_leaf[bj]);
        active[bj] = false;
    }
    return dg;
}

struct ClusterCut {
    std::optional<double> threshold;            ///< set for height cuts
    std::vector<std::vector<std::string>> groups; ///< ordered by first leaf index
    std::vector<std::string> medoids;           ///< empty until with_medoids
};

namespace detail {

struct DisjointSets {
    std::vector<std::size_t> parent;

    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

    std::size_t find(std::size_t x)
    {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent[std::max(a, b)] = std::min(a, b);
        }
    }
};

template <typename Pred>
ClusterCut cut_where(const Dendrogram& dg, Pred take)
{
    const std::size_t n = dg.leaf_count();
    DisjointSets sets(n);
    // Any leaf of a node stands in for the whole node.
    std::vector<std::size_t> rep(n + dg.merges.size());
    std::iota(rep.begin(), rep.begin() + static_cast<std::ptrdiff_t>(n), 0);
    for (std::size_t i = 0; i < dg.merges.size(); ++i) {
        const auto& m = dg.merges[i];
        rep[n + i] = rep[m.left];
        if (take(i, m)) {
            sets.unite(rep[m.left], rep[m.right]);
        }
    }
    std::map<std::size_t, std::vector<std::string>> by_root;
    for (std::size_t leaf = 0; leaf < n; ++leaf) {
        by_root[sets.find(leaf)].push_back(dg.leaves[leaf]);
    }
    ClusterCut cut;
    for (auto& [root, members] : by_root) {
        cut.groups.push_back(std::move(members));
    }
    return cut;
}

} // namespace detail

/// Groups joined by merges strictly below `threshold`.
inline ClusterCut cut(const Dendrogram& dg, double threshold)
{
    if (!(threshold >= 0.0)) {
        throw Error(Errc::InvalidArgument, "cut threshold must be non-negative");
    }
    auto c = detail::cut_where(dg, [&](std::size_t, const Merge& m) { return m.height < threshold; });
    c.threshold = threshold;
    return c;
}

/// Exactly `groups` groups: applies the first n - groups merges.
inline ClusterCut cut_to_groups(const Dendrogram& dg, std::size_t groups)
{
    if (groups == 0 || groups > dg.leaf_count()) {
        throw Error(Errc::InvalidArgument, "group count must be in [1, " + std::to_string(dg.leaf_count()) + "]");
    }
    const std::size_t take = dg.leaf_count() - groups;
    return detail::cut_where(dg, [&](std::size_t i, const Merge&) { return i < take; });
}

/// Member with the smallest mean distance to the other members; lexicographically
/// smallest id on ties.
inline std::string medoid(std::span<const std::string> group, const Scores& scores)
{
    if (group.empty()) {
        throw Error(Errc::EmptyGroup, "medoid of an empty group");
    }
    std::vector<Eigen::Index> rows;
    for (const auto& id : group) {
        const auto it = std::find(scores.labels.begin(), scores.labels.end(), id);
        if (it == scores.labels.end()) {
            throw Error(Errc::UnknownWorkload, id);
        }
        rows.push_back(static_cast<Eigen::Index>(it - scores.labels.begin()));
    }
    if (group.size() == 1) {
        return group.front();
    }
    std::optional<std::size_t> best;
    double best_mean = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < rows.size(); ++j) {
            if (i != j) {
                sum += (scores.values.row(rows[i]) - scores.values.row(rows[j])).norm();
            }
        }
        const double m = sum / static_cast<double>(rows.size() - 1);
        if (!best || m < best_mean || (m == best_mean && group[i] < group[*best])) {
            best = i;
            best_mean = m;
        }
    }
    return group[*best];
}

inline ClusterCut with_medoids(ClusterCut cut, const Scores& scores)
{
    cut.medoids.clear();
    for (const auto& g : cut.groups) {
        cut.medoids.push_back(medoid(g, scores));
    }
    return cut;
}

inline std::string merges_csv(const Dendrogram& dg)
{
    std::ostringstream out;
    out << "left,right,height,size\n";
    for (const auto& m : dg.merges) {
        out << m.left << ',' << m.right << ',' << text::format_exact(m.height) << ',' << m.size << '\n';
    }
    return out.str();
}

inline std::string clusters_csv(const ClusterCut& cut)
{
    std::ostringstream out;
    out << "group,workload,medoid\n";
    for (std::size_t g = 0; g < cut.groups.size(); ++g) {
        for (const auto& w : cut.groups[g]) {
            const bool is_medoid = g < cut.medoids.size() && cut.medoids[g] == w;
            out << g + 1 << ',' << w << ',' << (is_medoid ? "true" : "false") << '\n';
        }
    }
    return out.str();
}

inline std::string clusters_markdown(const ClusterCut& cut)
{
    std::ostringstream out;
    out << "| Group | Members | Medoid |\n|---|---|---|\n";
    for (std::size_t g = 0; g < cut.groups.size(); ++g) {
        out << "| " << g + 1 << " | " << text::join(cut.groups[g], ", ") << " | "
            << (g < cut.medoids.size() ? cut.medoids[g] : "") << " |\n";
    }
    return out.str();
}

} // namespace benchscope

#endif
