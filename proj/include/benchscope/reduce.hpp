#ifndef BENCHSCOPE_REDUCE_HPP
#define BENCHSCOPE_REDUCE_HPP

#include "benchscope/catalog.hpp"
#include "benchscope/error.hpp"
#include "benchscope/features.hpp"
#include "benchscope/text.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace benchscope {

struct VarianceTarget {
    double fraction;
};

struct FixedComponents {
    std::size_t k;
};

inline constexpr std::size_t kDefaultComponents = 8;

/// monostate selects min(kDefaultComponents, d).
using Retention = std::variant<std::monostate, VarianceTarget, FixedComponents>;

struct PcaModel {
    Eigen::VectorXd mean;               ///< d
    Eigen::MatrixXd components;         ///< k x d, orthonormal rows
    Eigen::VectorXd explained_variance; ///< k, non-increasing
    Eigen::VectorXd explained_ratio;    ///< k
    Eigen::VectorXd spectrum;           ///< all d variances, non-increasing
    double total_variance = 0.0;
    std::vector<FeatureColumn> columns; ///< empty when unlabeled

    [[nodiscard]] std::size_t k() const noexcept { return static_cast<std::size_t>(components.rows()); }
    [[nodiscard]] std::size_t dimension() const noexcept { return static_cast<std::size_t>(mean.size()); }
    [[nodiscard]] double residual_ratio() const noexcept { return 1.0 - explained_ratio.sum(); }
};

/// Rows of `values` projected onto the retained components.
struct Scores {
    std::vector<std::string> labels;
    Eigen::MatrixXd values; ///< n x k
};

namespace detail {

// Largest-magnitude coordinate made positive; first index wins ties.
inline void apply_sign_convention(Eigen::Ref<Eigen::VectorXd> v)
{
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i) {
        if (std::abs(v(i)) > std::abs(v(best))) {
            best = i;
        }
    }
    if (v(best) < 0.0) {
        v = -v;
    }
}

} // namespace detail

/// PCA of a normalized matrix via the SVD of its column-centered values.
/// Variances use the n-1 sample denominator.
inline PcaModel fit_pca(const FeatureMatrix& matrix, Retention retention = {})
{
    if (!matrix.normalized) {
        throw Error(Errc::NotNormalized, "fit_pca expects a normalized feature matrix");
    }
    const Eigen::Index n = matrix.values.rows();
    const Eigen::Index d = matrix.values.cols();
    if (n < 2) {
        throw Error(Errc::TooFewRows, "PCA needs at least two rows");
    }

    PcaModel model;
    model.columns = matrix.cols;
    model.mean = matrix.values.colwise().mean().transpose();
    const Eigen::MatrixXd centered = matrix.values.rowwise() - model.mean.transpose();

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const Eigen::MatrixXd& v = svd.matrixV();

    model.spectrum = Eigen::VectorXd::Zero(d);
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        model.spectrum(i) = sv(i) * sv(i) / static_cast<double>(n - 1);
    }
    model.total_variance = model.spectrum.sum();
    if (!(model.total_variance > 0.0)) {
        throw Error(Errc::ZeroVariance, "feature matrix has no variance after centering");
    }

    std::size_t k = 0;
    if (std::holds_alternative<std::monostate>(retention)) {
        k = std::min<std::size_t>(kDefaultComponents, static_cast<std::size_t>(d));
    } else if (const auto* fixed = std::get_if<FixedComponents>(&retention)) {
        if (fixed->k == 0 || fixed->k > static_cast<std::size_t>(d)) {
            throw Error(Errc::InvalidArgument,
                "fixed_k must be in [1, " + std::to_string(d) + "], got " + std::to_string(fixed->k));
        }
        k = fixed->k;
    } else {
        const double target = std::get<VarianceTarget>(retention).fraction;
        if (!(target > 0.0) || target > 1.0) {
            throw Error(Errc::TargetUnreachable, "variance target must lie in (0, 1]");
        }
        double cumulative = 0.0;
        for (Eigen::Index i = 0; i < d; ++i) {
            cumulative += model.spectrum(i) / model.total_variance;
            ++k;
            if (cumulative >= target - 1e-12) {
                break;
            }
        }
    }

    const auto kk = static_cast<Eigen::Index>(k);
    model.components = v.leftCols(kk).transpose();
    for (Eigen::Index i = 0; i < kk; ++i) {
        Eigen::VectorXd row = model.components.row(i).transpose();
        detail::apply_sign_convention(row);
        model.components.row(i) = row.transpose();
    }
    model.explained_variance = model.spectrum.head(kk);
    model.explained_ratio = model.explained_variance / model.total_variance;
    return model;
}

inline Scores project(const PcaModel& model, const FeatureMatrix& matrix)
{
    if (static_cast<std::size_t>(matrix.values.cols()) != model.dimension()) {
        throw Error(Errc::DimensionMismatch, "matrix has " + std::to_string(matrix.values.cols())
                + " columns, model expects " + std::to_string(model.dimension()));
    }
    if (!model.columns.empty() && !matrix.cols.empty() && model.columns != matrix.cols) {
        throw Error(Errc::DimensionMismatch, "matrix column labels differ from the fitted model");
    }
    Scores out;
    out.labels = matrix.rows;
    out.values = (matrix.values.rowwise() - model.mean.transpose()) * model.components.transpose();
    return out;
}

/// Maps scores back to feature space; exact when k equals the dimension.
inline Eigen::MatrixXd reconstruct(const PcaModel& model, const Eigen::MatrixXd& scores)
{
    if (static_cast<std::size_t>(scores.cols()) != model.k()) {
        throw Error(Errc::DimensionMismatch, "score width does not match retained components");
    }
    return (scores * model.components).rowwise() + model.mean.transpose();
}

struct MetricLoading {
    Metric metric;
    double mean_loading;    ///< signed loading averaged over machines
    double max_abs_loading; ///< largest single-machine |loading|
};

struct LoadingReport {
    std::vector<std::vector<MetricLoading>> pcs; ///< per PC, ranked by |mean_loading|
};

/// Groups each component's loadings by metric, averages the signed values over
/// machines, and keeps the top_n metrics by magnitude.
inline LoadingReport loading_table(const PcaModel& model, std::size_t top_n)
{
    if (model.columns.empty()) {
        throw Error(Errc::UnlabeledColumns, "loading report needs (metric, machine) column labels");
    }
    if (top_n == 0) {
        throw Error(Errc::InvalidArgument, "top_n must be positive");
    }
    LoadingReport report;
    for (Eigen::Index pc = 0; pc < model.components.rows(); ++pc) {
        std::map<Metric, std::pair<double, std::size_t>> sums;
        std::map<Metric, double> peak;
        for (std::size_t c = 0; c < model.columns.size(); ++c) {
            const double l = model.components(pc, static_cast<Eigen::Index>(c));
            auto& [sum, count] = sums[model.columns[c].metric];
            sum += l;
            ++count;
            peak[model.columns[c].metric] = std::max(peak[model.columns[c].metric], std::abs(l));
        }
        std::vector<MetricLoading> ranked;
        for (const auto& [metric, acc] : sums) {
            ranked.push_back({metric, acc.first / static_cast<double>(acc.second), peak[metric]});
        }
        std::stable_sort(ranked.begin(), ranked.end(), [](const MetricLoading& a, const MetricLoading& b) {
            return std::abs(a.mean_loading) > std::abs(b.mean_loading);
        });
        if (ranked.size() > top_n) {
            ranked.resize(top_n);
        }
        report.pcs.push_back(std::move(ranked));
    }
    return report;
}

inline std::string loading_markdown(const LoadingReport& report, std::size_t top_n)
{
    std::ostringstream out;
    out << "| PC | Top " << top_n << " metrics (value in parens = mean of loadings over machines) |\n";
    out << "|---|---|\n";
    for (std::size_t pc = 0; pc < report.pcs.size(); ++pc) {
        std::vector<std::string> parts;
        for (const auto& ml : report.pcs[pc]) {
            parts.push_back(std::string(info(ml.metric).label) + " (" + text::format_signed(ml.mean_loading, 2) + ")");
        }
        out << "| PC" << pc + 1 << " | " << text::join(parts, ", ") << " |\n";
    }
    return out.str();
}

inline std::string loading_csv(const LoadingReport& report)
{
    std::ostringstream out;
    out << "pc,rank,metric,mean_loading,max_abs_loading\n";
    for (std::size_t pc = 0; pc < report.pcs.size(); ++pc) {
        for (std::size_t r = 0; r < report.pcs[pc].size(); ++r) {
            const auto& ml = report.pcs[pc][r];
            out << "PC" << pc + 1 << ',' << r + 1 << ',' << info(ml.metric).key << ','
                << text::format_exact(ml.mean_loading) << ',' << text::format_exact(ml.max_abs_loading) << '\n';
        }
    }
    return out.str();
}

inline std::string variance_csv(const PcaModel& model)
{
    std::ostringstream out;
    out << "pc,explained_variance,explained_ratio,cumulative_ratio\n";
    double cumulative = 0.0;
    for (Eigen::Index i = 0; i < model.explained_variance.size(); ++i) {
        cumulative += model.explained_ratio(i);
        out << "PC" << i + 1 << ',' << text::format_exact(model.explained_variance(i)) << ','
            << text::format_exact(model.explained_ratio(i)) << ',' << text::format_exact(cumulative) << '\n';
    }
    return out.str();
}

inline std::string write_scores_csv(const Scores& scores)
{
    std::ostringstream out;
    out << "workload";
    for (Eigen::Index j = 0; j < scores.values.cols(); ++j) {
        out << ",PC" << j + 1;
    }
    out << '\n';
    for (Eigen::Index r = 0; r < scores.values.rows(); ++r) {
        out << scores.labels[static_cast<std::size_t>(r)];
        for (Eigen::Index j = 0; j < scores.values.cols(); ++j) {
            out << ',' << text::format_exact(scores.values(r, j));
        }
        out << '\n';
    }
    return out.str();
}

inline Scores read_scores_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(Errc::SchemaMismatch, "score table is empty");
    }
    const auto header = text::split(line);
    if (header.size() < 2 || header[0] != "workload") {
        throw Error(Errc::SchemaMismatch, "score table must be workload,PC1,...");
    }
    Scores out;
    std::vector<std::vector<double>> data;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) {
            continue;
        }
        const auto f = text::split(line);
        if (f.size() != header.size()) {
            throw Error(Errc::MalformedLine, "score table line " + std::to_string(line_no));
        }
        out.labels.push_back(f[0]);
        auto& row = data.emplace_back();
        for (std::size_t i = 1; i < f.size(); ++i) {
            const auto v = text::parse_double(f[i]);
            if (!v) {
                throw Error(Errc::NonNumericValue, "score table line " + std::to_string(line_no));
            }
            row.push_back(*v);
        }
    }
    out.values.resize(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(header.size() - 1));
    for (std::size_t r = 0; r < data.size(); ++r) {
        for (std::size_t c = 0; c < data[r].size(); ++c) {
            out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = data[r][c];
        }
    }
    return out;
}

inline Scores read_scores_csv(const std::string& path)
{
    auto in = text::open_input(path);
    return read_scores_csv(in);
}

} // namespace benchscope

#endif
