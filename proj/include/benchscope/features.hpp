#ifndef BENCHSCOPE_FEATURES_HPP
#define BENCHSCOPE_FEATURES_HPP

#include "benchscope/catalog.hpp"
#include "benchscope/error.hpp"
#include "benchscope/metrics.hpp"
#include "benchscope/text.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace benchscope {

/// One feature: a metric observed on one machine.
struct FeatureColumn {
    Metric metric;
    std::string machine;

    [[nodiscard]] std::string label() const { return std::string(info(metric).key) + ":" + machine; }

    bool operator==(const FeatureColumn&) const = default;
};

struct DroppedColumn {
    FeatureColumn column;
    std::vector<std::string> missing_for; ///< workloads lacking the metric
};

/// Workloads x (metric, machine). Columns are metric-major, machine-minor, in
/// the caller's machine order. When `normalized` is set, `values` holds z-scores
/// and col_means/col_stdevs recover the raw data.
struct FeatureMatrix {
    std::vector<std::string> rows;
    std::vector<FeatureColumn> cols;
    Eigen::MatrixXd values;
    Eigen::VectorXd col_means;
    Eigen::VectorXd col_stdevs;
    std::vector<bool> constant;
    bool normalized = false;
    std::vector<DroppedColumn> dropped;
};

using MetricTable = std::map<std::pair<std::string, std::string>, MetricVector>; ///< (workload, machine)

inline MetricTable metric_table(std::span<const MetricRow> rows)
{
    MetricTable table;
    for (const auto& r : rows) {
        if (!table.emplace(std::make_pair(r.workload, r.machine), r.metrics).second) {
            throw Error(Errc::DuplicateKey, r.workload + "@" + r.machine);
        }
    }
    return table;
}

/// Builds the raw matrix. A (metric, machine) column is dropped, and reported,
/// when any workload lacks that metric on that machine.
inline FeatureMatrix build_matrix(const MetricTable& table, std::span<const std::string> workloads,
                                  std::span<const std::string> machines)
{
    if (workloads.empty() || machines.empty()) {
        throw Error(Errc::EmptyInput, "feature matrix needs at least one workload and one machine");
    }
    std::vector<std::vector<const MetricVector*>> cells(workloads.size());
    for (std::size_t r = 0; r < workloads.size(); ++r) {
        for (const auto& m : machines) {
            const auto it = table.find({workloads[r], m});
            if (it == table.end()) {
                throw Error(Errc::MissingCell, workloads[r] + "@" + m);
            }
            cells[r].push_back(&it->second);
        }
    }
    FeatureMatrix fm;
    fm.rows.assign(workloads.begin(), workloads.end());
    for (const auto& mi : kMetrics) {
        for (std::size_t c = 0; c < machines.size(); ++c) {
            std::vector<std::string> missing;
            for (std::size_t r = 0; r < workloads.size(); ++r) {
                if (!cells[r][c]->available(mi.id)) {
                    missing.push_back(workloads[r]);
                }
            }
            FeatureColumn col{mi.id, machines[c]};
            if (missing.empty()) {
                fm.cols.push_back(std::move(col));
            } else {
                fm.dropped.push_back({std::move(col), std::move(missing)});
            }
        }
    }
    if (fm.cols.empty()) {
        throw Error(Errc::EmptyInput, "every feature column was dropped");
    }
    const auto machine_pos = [&](const std::string& m) {
        return static_cast<std::size_t>(std::find(machines.begin(), machines.end(), m) - machines.begin());
    };
    fm.values.resize(static_cast<Eigen::Index>(workloads.size()), static_cast<Eigen::Index>(fm.cols.size()));
    for (std::size_t r = 0; r < workloads.size(); ++r) {
        for (std::size_t c = 0; c < fm.cols.size(); ++c) {
            const double v = *(*cells[r][machine_pos(fm.cols[c].machine)])[fm.cols[c].metric];
            if (!std::isfinite(v)) {
                throw Error(Errc::NonNumericValue, "non-finite cell " + workloads[r] + " " + fm.cols[c].label());
            }
            fm.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
        }
    }
    fm.col_means = Eigen::VectorXd::Zero(fm.values.cols());
    fm.col_stdevs = Eigen::VectorXd::Ones(fm.values.cols());
    fm.constant.assign(fm.cols.size(), false);
    return fm;
}

/// Per-column z-score with the population (n) standard deviation. Columns with
/// no spread become all-zero and are flagged constant.
inline FeatureMatrix normalize(FeatureMatrix m)
{
    if (m.normalized) {
        throw Error(Errc::AlreadyNormalized, "matrix is already normalized");
    }
    if (m.values.rows() < 2) {
        throw Error(Errc::TooFewRows, "normalization needs at least two workloads");
    }
    const auto n = static_cast<double>(m.values.rows());
    m.col_means.resize(m.values.cols());
    m.col_stdevs.resize(m.values.cols());
    m.constant.assign(static_cast<std::size_t>(m.values.cols()), false);
    for (Eigen::Index c = 0; c < m.values.cols(); ++c) {
        auto col = m.values.col(c);
        const double mu = col.sum() / n;
        const double sd = std::sqrt((col.array() - mu).square().sum() / n);
        m.col_means(c) = mu;
        if (sd <= 1e-12 * std::max(1.0, std::abs(mu))) {
            m.col_stdevs(c) = 1.0;
            m.constant[static_cast<std::size_t>(c)] = true;
            col.setZero();
        } else {
            m.col_stdevs(c) = sd;
            col = (col.array() - mu) / sd;
        }
    }
    m.normalized = true;
    return m;
}

/// Inverse of normalize; constant columns come back as their mean.
inline FeatureMatrix denormalize(FeatureMatrix m)
{
    if (!m.normalized) {
        return m;
    }
    for (Eigen::Index c = 0; c < m.values.cols(); ++c) {
        m.values.col(c) = m.values.col(c).array() * m.col_stdevs(c) + m.col_means(c);
    }
    m.col_means.setZero();
    m.col_stdevs.setOnes();
    m.normalized = false;
    return m;
}

/// CSV with header "workload,<metric:machine>..." holding raw values.
inline std::string write_features_csv(const FeatureMatrix& matrix)
{
    const FeatureMatrix raw = denormalize(matrix);
    std::ostringstream out;
    out << "workload";
    for (const auto& c : raw.cols) {
        out << ',' << c.label();
    }
    out << '\n';
    for (Eigen::Index r = 0; r < raw.values.rows(); ++r) {
        out << raw.rows[static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < raw.values.cols(); ++c) {
            out << ',' << text::format_exact(raw.values(r, c));
        }
        out << '\n';
    }
    return out.str();
}

inline FeatureColumn parse_feature_label(const std::string& label)
{
    const auto colon = label.find(':');
    if (colon == std::string::npos) {
        throw Error(Errc::SchemaMismatch, "feature column '" + label + "' is not metric:machine");
    }
    const auto metric = metric_from_key(label.substr(0, colon));
    if (!metric) {
        throw Error(Errc::SchemaMismatch, "unknown metric in feature column '" + label + "'");
    }
    return {*metric, label.substr(colon + 1)};
}

inline FeatureMatrix read_features_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(Errc::SchemaMismatch, "feature table is empty");
    }
    const auto header = text::split(line);
    if (header.empty() || header[0] != "workload") {
        throw Error(Errc::SchemaMismatch, "feature table must start with 'workload'");
    }
    FeatureMatrix fm;
    for (std::size_t i = 1; i < header.size(); ++i) {
        fm.cols.push_back(parse_feature_label(header[i]));
    }
    std::vector<std::vector<double>> data;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) {
            continue;
        }
        const auto f = text::split(line);
        if (f.size() != header.size()) {
            throw Error(Errc::MalformedLine, "feature table line " + std::to_string(line_no));
        }
        fm.rows.push_back(f[0]);
        auto& row = data.emplace_back();
        for (std::size_t i = 1; i < f.size(); ++i) {
            const auto v = text::parse_double(f[i]);
            if (!v) {
                throw Error(Errc::NonNumericValue, "feature table line " + std::to_string(line_no));
            }
            row.push_back(*v);
        }
    }
    if (fm.rows.empty() || fm.cols.empty()) {
        throw Error(Errc::EmptyInput, "feature table has no data");
    }
    fm.values.resize(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(fm.cols.size()));
    for (std::size_t r = 0; r < data.size(); ++r) {
        for (std::size_t c = 0; c < fm.cols.size(); ++c) {
            fm.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = data[r][c];
        }
    }
    fm.col_means = Eigen::VectorXd::Zero(fm.values.cols());
    fm.col_stdevs = Eigen::VectorXd::Ones(fm.values.cols());
    fm.constant.assign(fm.cols.size(), false);
    return fm;
}

inline FeatureMatrix read_features_csv(const std::string& path)
{
    auto in = text::open_input(path);
    return read_features_csv(in);
}

inline std::string write_dropped_csv(const FeatureMatrix& matrix)
{
    std::ostringstream out;
    out << "metric,machine,missing_for\n";
    for (const auto& d : matrix.dropped) {
        out << info(d.column.metric).key << ',' << d.column.machine << ',' << text::join(d.missing_for, " ") << '\n';
    }
    return out.str();
}

} // namespace benchscope

#endif
