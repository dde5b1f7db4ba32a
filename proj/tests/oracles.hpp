#ifndef BENCHSCOPE_TESTS_ORACLES_HPP
#define BENCHSCOPE_TESTS_ORACLES_HPP

// Reference implementations used only by tests. They are deliberately naive and
// share no code with the library: plain vectors, no Eigen, recomputation from
// scratch instead of incremental updates.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>; // row-major

inline Mat sample_covariance(const Mat& x)
{
    const std::size_t n = x.size();
    const std::size_t d = x.front().size();
    Vec mean(d, 0.0);
    for (const auto& r : x) {
        for (std::size_t j = 0; j < d; ++j) {
            mean[j] += r[j] / static_cast<double>(n);
        }
    }
    Mat c(d, Vec(d, 0.0));
    for (const auto& r : x) {
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = i; j < d; ++j) {
                c[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]);
            }
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            c[i][j] /= static_cast<double>(n - 1);
            c[j][i] = c[i][j];
        }
    }
    return c;
}

struct Eigen {
    Vec values; ///< descending
    Mat vectors; ///< vectors[k] pairs with values[k]
};

/// Cyclic Jacobi rotations on a symmetric matrix.
inline Eigen jacobi_eigen(Mat a)
{
    const std::size_t d = a.size();
    Mat v(d, Vec(d, 0.0));
    for (std::size_t i = 0; i < d; ++i) {
        v[i][i] = 1.0;
    }
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        double scale = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            scale += a[i][i] * a[i][i];
            for (std::size_t j = i + 1; j < d; ++j) {
                off += a[i][j] * a[i][j];
            }
        }
        if (off <= 1e-30 * std::max(scale, 1e-300)) {
            break;
        }
        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                if (a[p][q] == 0.0) {
                    continue;
                }
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < d; ++k) {
                    const double akp = a[k][p];
                    const double akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    const double apk = a[p][k];
                    const double aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    const double vkp = v[k][p];
                    const double vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<std::size_t> order(d);
    for (std::size_t i = 0; i < d; ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a[x][x] > a[y][y]; });
    Eigen out;
    for (const auto i : order) {
        out.values.push_back(a[i][i]);
        Vec col(d);
        for (std::size_t k = 0; k < d; ++k) {
            col[k] = v[k][i];
        }
        out.vectors.push_back(col);
    }
    return out;
}

enum class Link { Ward, Average, Complete, Single };

struct NaiveMerge {
    std::set<std::size_t> a; ///< side holding the smaller leaf
    std::set<std::size_t> b;
    double height;
};

inline double euclid(const Vec& x, const Vec& y)
{
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += (x[i] - y[i]) * (x[i] - y[i]);
    }
    return std::sqrt(s);
}

/// Cluster distance recomputed from the member points.
inline double cluster_distance(const Mat& pts, const std::set<std::size_t>& a, const std::set<std::size_t>& b, Link link)
{
    if (link == Link::Ward) {
        const std::size_t d = pts.front().size();
        Vec ca(d, 0.0);
        Vec cb(d, 0.0);
        for (const auto i : a) {
            for (std::size_t k = 0; k < d; ++k) {
                ca[k] += pts[i][k] / static_cast<double>(a.size());
            }
        }
        for (const auto i : b) {
            for (std::size_t k = 0; k < d; ++k) {
                cb[k] += pts[i][k] / static_cast<double>(b.size());
            }
        }
        const double na = static_cast<double>(a.size());
        const double nb = static_cast<double>(b.size());
        return std::sqrt(2.0 * na * nb / (na + nb)) * euclid(ca, cb);
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    double sum = 0.0;
    for (const auto i : a) {
        for (const auto j : b) {
            const double e = euclid(pts[i], pts[j]);
            lo = std::min(lo, e);
            hi = std::max(hi, e);
            sum += e;
        }
    }
    switch (link) {
    case Link::Single: return lo;
    case Link::Complete: return hi;
    default: return sum / static_cast<double>(a.size() * b.size());
    }
}

/// O(n^3) agglomeration: every step rescans all cluster pairs.
inline std::vector<NaiveMerge> agglomerate(const Mat& pts, Link link)
{
    std::vector<std::set<std::size_t>> clusters;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        clusters.push_back({i});
    }
    std::vector<NaiveMerge> merges;
    while (clusters.size() > 1) {
        std::size_t bi = 0;
        std::size_t bj = 1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < clusters.size(); ++i) {
            for (std::size_t j = i + 1; j < clusters.size(); ++j) {
                const double dist = cluster_distance(pts, clusters[i], clusters[j], link);
                if (dist < best) {
                    best = dist;
                    bi = i;
                    bj = j;
                }
            }
        }
        auto a = clusters[bi];
        auto b = clusters[bj];
        if (*b.begin() < *a.begin()) {
            std::swap(a, b);
        }
        merges.push_back({a, b, best});
        clusters[bi].insert(clusters[bj].begin(), clusters[bj].end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
    }
    return merges;
}

/// Subset accuracy from first principles: geometric means through logs.
inline double accuracy(const std::vector<double>& all, const std::vector<std::size_t>& pick)
{
    double la = 0.0;
    for (const double s : all) {
        la += std::log(s);
    }
    double ls = 0.0;
    for (const auto i : pick) {
        ls += std::log(all[i]);
    }
    const double ga = std::exp(la / static_cast<double>(all.size()));
    const double gs = std::exp(ls / static_cast<double>(pick.size()));
    return 1.0 - std::abs(gs - ga) / ga;
}

struct BestSubset {
    std::vector<std::size_t> pick;
    double aggregate = -std::numeric_limits<double>::infinity();
};

/// Recursive include/exclude enumeration maximizing the geometric mean of
/// per-machine accuracies (scores[machine][workload]).
inline BestSubset best_subset(const std::vector<std::vector<double>>& scores, std::size_t k)
{
    const std::size_t n = scores.front().size();
    BestSubset best;
    std::vector<std::size_t> cur;
    const auto score = [&](const std::vector<std::size_t>& pick) {
        double log_sum = 0.0;
        for (const auto& machine : scores) {
            const double a = accuracy(machine, pick);
            if (a <= 0.0) {
                return -std::numeric_limits<double>::infinity();
            }
            log_sum += std::log(a);
        }
        return std::exp(log_sum / static_cast<double>(scores.size()));
    };
    const auto rec = [&](auto&& self, std::size_t next) -> void {
        if (cur.size() == k) {
            const double s = score(cur);
            if (s > best.aggregate) {
                best.aggregate = s;
                best.pick = cur;
            }
            return;
        }
        if (next == n || n - next < k - cur.size()) {
            return;
        }
        cur.push_back(next);
        self(self, next + 1);
        cur.pop_back();
        self(self, next + 1);
    };
    rec(rec, 0);
    return best;
}

inline Mat random_matrix(std::mt19937_64& rng, std::size_t n, std::size_t d, double spread = 1.0)
{
    std::normal_distribution<double> g(0.0, spread);
    Mat m(n, Vec(d));
    for (auto& r : m) {
        for (auto& v : r) {
            v = g(rng);
        }
    }
    return m;
}

} // namespace oracle

#endif
