#ifndef BENCHSCOPE_ERROR_HPP
#define BENCHSCOPE_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace benchscope {

enum class Errc {
    MalformedLine,
    NonNumericValue,
    DuplicateKey,
    SchemaMismatch,
    MissingDenominator,
    EmptyGroup,
    MissingCell,
    EmptyInput,
    AlreadyNormalized,
    NotNormalized,
    TooFewRows,
    TargetUnreachable,
    ZeroVariance,
    DimensionMismatch,
    UnlabeledColumns,
    UnknownWorkload,
    NonPositiveScore,
    EmptySubset,
    BudgetExceeded,
    EmptySuite,
    NoPositiveValues,
    ZeroHorizon,
    InvalidSchedule,
    NoCommonMetrics,
    InvalidArgument,
    IoError,
    ConfigError,
};

constexpr std::string_view to_string(Errc code) noexcept
{
    switch (code) {
    case Errc::MalformedLine: return "MalformedLine";
    case Errc::NonNumericValue: return "NonNumericValue";
    case Errc::DuplicateKey: return "DuplicateKey";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::MissingDenominator: return "MissingDenominator";
    case Errc::EmptyGroup: return "EmptyGroup";
    case Errc::MissingCell: return "MissingCell";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::AlreadyNormalized: return "AlreadyNormalized";
    case Errc::NotNormalized: return "NotNormalized";
    case Errc::TooFewRows: return "TooFewRows";
    case Errc::TargetUnreachable: return "TargetUnreachable";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::UnlabeledColumns: return "UnlabeledColumns";
    case Errc::UnknownWorkload: return "UnknownWorkload";
    case Errc::NonPositiveScore: return "NonPositiveScore";
    case Errc::EmptySubset: return "EmptySubset";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::EmptySuite: return "EmptySuite";
    case Errc::NoPositiveValues: return "NoPositiveValues";
    case Errc::ZeroHorizon: return "ZeroHorizon";
    case Errc::InvalidSchedule: return "InvalidSchedule";
    case Errc::NoCommonMetrics: return "NoCommonMetrics";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::IoError: return "IoError";
    case Errc::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the Errc kinds above.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace benchscope

#endif
