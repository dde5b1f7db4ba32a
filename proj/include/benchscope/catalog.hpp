#ifndef BENCHSCOPE_CATALOG_HPP
#define BENCHSCOPE_CATALOG_HPP

#include "benchscope/error.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace benchscope {

// Canonical event vocabulary. Vendor-specific names are translated into these
// by a CounterMap at parse time.
namespace event {
inline constexpr std::string_view instructions = "instructions";
inline constexpr std::string_view cycles = "cycles";
inline constexpr std::string_view loads = "loads";
inline constexpr std::string_view stores = "stores";
inline constexpr std::string_view branches = "branches";
inline constexpr std::string_view branch_misses = "branch_misses";
inline constexpr std::string_view l1i_misses = "l1i_misses";
inline constexpr std::string_view l1d_misses = "l1d_misses";
inline constexpr std::string_view l2_misses = "l2_misses";
inline constexpr std::string_view l3_misses = "l3_misses";
inline constexpr std::string_view l1_itlb_misses = "l1_itlb_misses";
inline constexpr std::string_view l1_dtlb_misses = "l1_dtlb_misses";
inline constexpr std::string_view l2_tlb_misses = "l2_tlb_misses";
inline constexpr std::string_view frontend_stall_cycles = "frontend_stall_cycles";
inline constexpr std::string_view backend_stall_cycles = "backend_stall_cycles";
inline constexpr std::string_view fp_instructions = "fp_instructions";
inline constexpr std::string_view vector_instructions = "vector_instructions";
inline constexpr std::string_view kernel_instructions = "kernel_instructions";
inline constexpr std::string_view user_instructions = "user_instructions";
inline constexpr std::string_view dram_bytes = "dram_bytes";
} // namespace event

inline constexpr std::array<std::string_view, 20> kCanonicalEvents = {
    event::instructions,   event::cycles,          event::loads,
    event::stores,         event::branches,        event::branch_misses,
    event::l1i_misses,     event::l1d_misses,      event::l2_misses,
    event::l3_misses,      event::l1_itlb_misses,  event::l1_dtlb_misses,
    event::l2_tlb_misses,  event::frontend_stall_cycles, event::backend_stall_cycles,
    event::fp_instructions, event::vector_instructions, event::kernel_instructions,
    event::user_instructions, event::dram_bytes,
};

inline bool is_canonical_event(std::string_view name) noexcept
{
    return std::find(kCanonicalEvents.begin(), kCanonicalEvents.end(), name) != kCanonicalEvents.end();
}

enum class Metric : std::uint8_t {
    Ipc,
    L1iMpki,
    L1dMpki,
    L2Mpki,
    L3Mpki,
    L1ItlbMpmi,
    L1DtlbMpmi,
    L2TlbMpmi,
    BranchMpki,
    FrontendStallPct,
    BackendStallPct,
    KernelPct,
    UserPct,
    LoadPct,
    StorePct,
    BranchPct,
    FpPct,
    VectorPct,
    MemBytesPerCycle,
};

inline constexpr std::size_t kMetricCount = 19;

/// value = numerator / (sum of denominator events) * scale
struct MetricInfo {
    Metric id;
    std::string_view key;   ///< column name in CSV exports
    std::string_view label; ///< human-readable name in reports
    std::string_view numerator;
    std::array<std::string_view, 2> denominator; ///< second entry empty unless summed
    double scale;
};

inline constexpr std::array<MetricInfo, kMetricCount> kMetrics = {{
    {Metric::Ipc, "ipc", "IPC", event::instructions, {event::cycles, {}}, 1.0},
    {Metric::L1iMpki, "l1i_mpki", "L1I$ MPKI", event::l1i_misses, {event::instructions, {}}, 1e3},
    {Metric::L1dMpki, "l1d_mpki", "L1D$ MPKI", event::l1d_misses, {event::instructions, {}}, 1e3},
    {Metric::L2Mpki, "l2_mpki", "L2$ MPKI", event::l2_misses, {event::instructions, {}}, 1e3},
    {Metric::L3Mpki, "l3_mpki", "L3$ MPKI", event::l3_misses, {event::instructions, {}}, 1e3},
    {Metric::L1ItlbMpmi, "l1_itlb_mpmi", "L1 iTLB MPMI", event::l1_itlb_misses, {event::instructions, {}}, 1e6},
    {Metric::L1DtlbMpmi, "l1_dtlb_mpmi", "L1 dTLB MPMI", event::l1_dtlb_misses, {event::instructions, {}}, 1e6},
    {Metric::L2TlbMpmi, "l2_tlb_mpmi", "L2 TLB MPMI", event::l2_tlb_misses, {event::instructions, {}}, 1e6},
    {Metric::BranchMpki, "branch_mpki", "Branch MPKI", event::branch_misses, {event::instructions, {}}, 1e3},
    {Metric::FrontendStallPct, "frontend_stall_pct", "Frontend stall %", event::frontend_stall_cycles, {event::cycles, {}}, 100.0},
    {Metric::BackendStallPct, "backend_stall_pct", "Backend stall %", event::backend_stall_cycles, {event::cycles, {}}, 100.0},
    // Kernel/User share the privilege-split total so that the pair always sums to 100.
    {Metric::KernelPct, "kernel_pct", "Kernel%", event::kernel_instructions, {event::kernel_instructions, event::user_instructions}, 100.0},
    {Metric::UserPct, "user_pct", "User%", event::user_instructions, {event::kernel_instructions, event::user_instructions}, 100.0},
    {Metric::LoadPct, "load_pct", "Load%", event::loads, {event::instructions, {}}, 100.0},
    {Metric::StorePct, "store_pct", "Store%", event::stores, {event::instructions, {}}, 100.0},
    {Metric::BranchPct, "branch_pct", "Branch%", event::branches, {event::instructions, {}}, 100.0},
    {Metric::FpPct, "fp_pct", "FP%", event::fp_instructions, {event::instructions, {}}, 100.0},
    {Metric::VectorPct, "vector_pct", "Vector%", event::vector_instructions, {event::instructions, {}}, 100.0},
    {Metric::MemBytesPerCycle, "mem_bytes_per_cycle", "Mem access (B/cycle)", event::dram_bytes, {event::cycles, {}}, 1.0},
}};

constexpr const MetricInfo& info(Metric m) noexcept
{
    return kMetrics[static_cast<std::size_t>(m)];
}

constexpr std::size_t index(Metric m) noexcept { return static_cast<std::size_t>(m); }

inline constexpr std::array<Metric, kMetricCount> all_metrics() noexcept
{
    std::array<Metric, kMetricCount> out{};
    for (std::size_t i = 0; i < kMetricCount; ++i) {
        out[i] = kMetrics[i].id;
    }
    return out;
}

inline std::optional<Metric> metric_from_key(std::string_view key) noexcept
{
    for (const auto& m : kMetrics) {
        if (m.key == key) {
            return m.id;
        }
    }
    return std::nullopt;
}

/// All events a metric reads, numerator first.
inline std::array<std::string_view, 3> required_events(Metric m) noexcept
{
    const auto& mi = info(m);
    return {mi.numerator, mi.denominator[0], mi.denominator[1]};
}

} // namespace benchscope

#endif
