#ifndef BENCHSCOPE_TESTS_HELPERS_HPP
#define BENCHSCOPE_TESTS_HELPERS_HPP

#include "benchscope/dataset.hpp"
#include "benchscope/features.hpp"
#include "benchscope/metrics.hpp"
#include "oracles.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace testing_support {

namespace fs = std::filesystem;

inline std::string source_path(const std::string& rel)
{
    return std::string(BENCHSCOPE_SOURCE_DIR) + "/" + rel;
}

inline benchscope::RunRecord make_record(const std::string& suite, const std::string& workload,
                                         const std::string& machine, const std::map<std::string, double>& events,
                                         const std::set<std::string>& unsupported = {})
{
    std::vector<benchscope::CounterSample> samples;
    for (const auto& [ev, v] : events) {
        samples.push_back({suite, workload, machine, ev, v, true});
    }
    for (const auto& ev : unsupported) {
        samples.push_back({suite, workload, machine, ev, 0.0, false});
    }
    return benchscope::group_samples(std::move(samples)).front();
}

/// Every canonical event with plausible magnitudes.
inline std::map<std::string, double> full_events(double instructions = 2e9, double cycles = 1e9)
{
    return {
        {"instructions", instructions}, {"cycles", cycles}, {"loads", 0.3 * instructions},
        {"stores", 0.1 * instructions}, {"branches", 0.15 * instructions}, {"branch_misses", 0.002 * instructions},
        {"l1i_misses", 0.01 * instructions}, {"l1d_misses", 0.03 * instructions}, {"l2_misses", 0.008 * instructions},
        {"l3_misses", 0.001 * instructions}, {"l1_itlb_misses", 1e-4 * instructions},
        {"l1_dtlb_misses", 4e-4 * instructions}, {"l2_tlb_misses", 2e-5 * instructions},
        {"frontend_stall_cycles", 0.2 * cycles}, {"backend_stall_cycles", 0.35 * cycles},
        {"fp_instructions", 0.05 * instructions}, {"vector_instructions", 0.02 * instructions},
        {"kernel_instructions", 0.01 * instructions}, {"user_instructions", 0.99 * instructions},
        {"dram_bytes", 1.5 * cycles},
    };
}

inline Eigen::MatrixXd to_eigen(const oracle::Mat& m)
{
    Eigen::MatrixXd out(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(m.front().size()));
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m.front().size(); ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m[i][j];
        }
    }
    return out;
}

inline oracle::Mat from_eigen(const Eigen::MatrixXd& m)
{
    oracle::Mat out(static_cast<std::size_t>(m.rows()), oracle::Vec(static_cast<std::size_t>(m.cols())));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
        }
    }
    return out;
}

inline std::vector<std::string> labels(std::size_t n, const std::string& prefix = "w")
{
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) {
        std::ostringstream s;
        s << prefix << (i < 10 ? "0" : "") << i;
        out.push_back(s.str());
    }
    return out;
}

/// Raw, unlabeled-by-metric feature matrix around arbitrary values.
inline benchscope::FeatureMatrix raw_matrix(const Eigen::MatrixXd& values)
{
    benchscope::FeatureMatrix fm;
    fm.rows = labels(static_cast<std::size_t>(values.rows()));
    const auto metrics = benchscope::all_metrics();
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
        const auto mi = static_cast<std::size_t>(c) % metrics.size();
        const auto machine = "M" + std::to_string(static_cast<std::size_t>(c) / metrics.size());
        fm.cols.push_back({metrics[mi], machine});
    }
    fm.values = values;
    fm.col_means = Eigen::VectorXd::Zero(values.cols());
    fm.col_stdevs = Eigen::VectorXd::Ones(values.cols());
    fm.constant.assign(static_cast<std::size_t>(values.cols()), false);
    return fm;
}

inline std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

/// Relative path -> file contents for every regular file under `root`.
inline std::map<std::string, std::string> tree(const fs::path& root)
{
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) {
            out[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
        }
    }
    return out;
}

class TempDir {
public:
    explicit TempDir(const std::string& tag)
    {
        static std::mt19937_64 rng(std::random_device{}());
        path_ = fs::temp_directory_path() / ("benchscope-" + tag + "-" + std::to_string(rng()));
        fs::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const fs::path& path() const noexcept { return path_; }

private:
    fs::path path_;
};

} // namespace testing_support

#endif
