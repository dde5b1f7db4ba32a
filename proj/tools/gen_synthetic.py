#!/usr/bin/env python3
"""Regenerates data/synthetic: a three-machine counter store with planted
workload clusters, matching scores, raw perf-style dumps and a counter map.

Usage: python3 tools/gen_synthetic.py [OUT_DIR]
"""
import json
import math
import sys
from pathlib import Path

import numpy as np

SEED = 20260417
MACHINES = ["CPU-A", "CPU-C", "CPU-G"]
FREQ_GHZ = {"CPU-A": 3.2, "CPU-C": 3.0, "CPU-G": 2.8}

INT_RATE = ["706.stockfish_r", "707.ntest_r", "708.sqlite_r", "710.omnetpp_r", "714.cpython_r", "721.gcc_r",
            "723.llvm_r", "727.cppcheck_r", "729.abc_r", "734.vpr_r", "735.gem5_r", "750.sealcrypto_r",
            "753.ns3_r", "777.zstd_r"]
FP_RATE = ["709.cactus_r", "722.palm_r", "731.astcenc_r", "736.ocio_r", "737.gmsh_r", "748.flightdm_r",
           "749.fotonik3d_r", "765.roms_r", "766.femflow_r", "767.nest_r", "772.marian_r", "782.lbm_r"]
DCPERF = ["django", "tao"]

# (low, high) of each metric's cluster centers, sampled log-uniformly.
RANGES = {
    "ipc": (0.5, 4.0), "l1i_mpki": (0.1, 60.0), "l1d_mpki": (5.0, 60.0), "l2_mpki": (1.0, 30.0),
    "l3_mpki": (0.1, 10.0), "l1_itlb_mpmi": (10.0, 2000.0), "l1_dtlb_mpmi": (10.0, 3000.0),
    "l2_tlb_mpmi": (1.0, 500.0), "branch_mpki": (0.5, 15.0), "frontend_stall_pct": (5.0, 40.0),
    "backend_stall_pct": (10.0, 55.0), "kernel_pct": (0.1, 5.0), "load_pct": (15.0, 50.0),
    "store_pct": (5.0, 18.0), "branch_pct": (1.0, 25.0), "fp_pct": (0.5, 40.0), "vector_pct": (0.5, 30.0),
    "mem_bytes_per_cycle": (0.1, 8.0),
}
INT_FP_RANGE = (0.01, 0.5)
NOISE = 0.02            # multiplicative within-cluster spread
MACHINE_SPREAD = 0.10   # per (machine, metric) factor shared by every workload

# CPU-C values pinned for the RRR example pair and the proxy target.
PINNED = {
    "709.cactus_r": {"ipc": 1.696, "l1i_mpki": 82.3, "l3_mpki": 0.5},
    "749.fotonik3d_r": {"ipc": 0.785, "l1i_mpki": 0.24, "l3_mpki": 6.0},
    "django": {"ipc": 1.16 / (1 - 0.137)},
}

RAW_NAMES = {
    "CPU-A": {"instructions": "inst_retired.any", "cycles": "cpu_clk_unhalted.thread",
              "loads": "mem_inst_retired.all_loads", "stores": "mem_inst_retired.all_stores",
              "branches": "br_inst_retired.all_branches", "branch_misses": "br_misp_retired.all_branches",
              "l1i_misses": "icache_data.stalls", "l1d_misses": "l1d.replacement", "l2_misses": "l2_rqsts.miss",
              "l3_misses": "longest_lat_cache.miss", "l1_itlb_misses": "itlb_misses.miss_causes_a_walk",
              "l1_dtlb_misses": "dtlb_load_misses.miss_causes_a_walk", "l2_tlb_misses": "stlb_misses.walk",
              "frontend_stall_cycles": "idq_uops_not_delivered.cycles_0_uops_deliv.core",
              "backend_stall_cycles": "cycle_activity.stalls_total", "fp_instructions": "fp_arith_inst_retired.all",
              "vector_instructions": "fp_arith_inst_retired.vector", "kernel_instructions": "inst_retired.any:k",
              "user_instructions": "inst_retired.any:u", "dram_bytes": "unc_m_cas_count.all"},
    "CPU-C": {"instructions": "ex_ret_instr", "cycles": "ls_not_halted_cyc", "loads": "ls_dispatch.ld_dispatch",
              "stores": "ls_dispatch.store_dispatch", "branches": "ex_ret_brn", "branch_misses": "ex_ret_brn_misp",
              "l1i_misses": "ic_tag_hit_miss.instruction_cache_miss", "l1d_misses": "l1_data_cache_fills_all",
              "l2_misses": "l2_cache_req_stat.ic_dc_miss_in_l2", "l3_misses": "l3_lookup_state.l3_miss",
              "l1_itlb_misses": "bp_l1_tlb_miss_l2_tlb_hit", "l1_dtlb_misses": "ls_l1_d_tlb_miss.all",
              "l2_tlb_misses": "ls_l2_tlb_miss.all", "frontend_stall_cycles": "de_no_dispatch_per_slot.no_ops_from_frontend",
              "backend_stall_cycles": "de_no_dispatch_per_slot.backend_stalls", "fp_instructions": "fp_ret_sse_avx_ops.all",
              "vector_instructions": "fp_ops_retired_by_width.pack_256_uops_retired",
              "kernel_instructions": "ex_ret_instr:k", "user_instructions": "ex_ret_instr:u",
              "dram_bytes": "ls_any_fills_from_sys.dram_io_all"},
    "CPU-G": {"instructions": "inst_retired", "cycles": "cpu_cycles", "loads": "ld_spec", "stores": "st_spec",
              "branches": "br_retired", "branch_misses": "br_mis_pred_retired", "l1i_misses": "l1i_cache_refill",
              "l1d_misses": "l1d_cache_refill", "l2_misses": "l2d_cache_refill", "l3_misses": "ll_cache_miss_rd",
              "l1_itlb_misses": "l1i_tlb_refill", "l1_dtlb_misses": "l1d_tlb_refill", "l2_tlb_misses": "l2d_tlb_refill",
              "frontend_stall_cycles": "stall_frontend", "backend_stall_cycles": "stall_backend",
              "fp_instructions": "fp_spec", "vector_instructions": "ase_spec", "kernel_instructions": "inst_retired:k",
              "user_instructions": "inst_retired:u", "dram_bytes": "mem_access_rd_wr"},
}
LINE_GRANULAR = {("CPU-C", "dram_bytes")}
UNSUPPORTED = {("CPU-A", "dram_bytes")}


def log_uniform(rng, lo, hi, size=None):
    return np.exp(rng.uniform(math.log(lo), math.log(hi), size))


def plant(rng, names, groups, int_suite):
    """Assigns names round-robin to groups and draws one metric vector each."""
    metrics = list(RANGES)
    centers = []
    for _ in range(groups):
        c = {}
        for m in metrics:
            lo, hi = INT_FP_RANGE if (m == "fp_pct" and int_suite) else RANGES[m]
            c[m] = float(log_uniform(rng, lo, hi))
        centers.append(c)
    truth = {}
    values = {}
    for i, w in enumerate(names):
        g = i % groups
        truth[w] = g
        values[w] = {m: centers[g][m] * math.exp(rng.normal(0.0, NOISE)) for m in metrics}
    return truth, values


def events_for(metrics, instructions):
    I = instructions
    cycles = I / metrics["ipc"]
    k = metrics["kernel_pct"] / 100.0
    return {
        "instructions": I, "cycles": cycles,
        "loads": I * metrics["load_pct"] / 100.0, "stores": I * metrics["store_pct"] / 100.0,
        "branches": I * metrics["branch_pct"] / 100.0, "branch_misses": I * metrics["branch_mpki"] / 1e3,
        "l1i_misses": I * metrics["l1i_mpki"] / 1e3, "l1d_misses": I * metrics["l1d_mpki"] / 1e3,
        "l2_misses": I * metrics["l2_mpki"] / 1e3, "l3_misses": I * metrics["l3_mpki"] / 1e3,
        "l1_itlb_misses": I * metrics["l1_itlb_mpmi"] / 1e6, "l1_dtlb_misses": I * metrics["l1_dtlb_mpmi"] / 1e6,
        "l2_tlb_misses": I * metrics["l2_tlb_mpmi"] / 1e6,
        "frontend_stall_cycles": cycles * metrics["frontend_stall_pct"] / 100.0,
        "backend_stall_cycles": cycles * metrics["backend_stall_pct"] / 100.0,
        "fp_instructions": I * metrics["fp_pct"] / 100.0, "vector_instructions": I * metrics["vector_pct"] / 100.0,
        "kernel_instructions": I * k, "user_instructions": I * (1.0 - k),
        "dram_bytes": cycles * metrics["mem_bytes_per_cycle"],
    }


def zscore_pca_ward(matrix, groups, pcs=8):
    from scipy.cluster.hierarchy import fcluster, linkage
    x = np.asarray(matrix, dtype=float)
    sd = x.std(axis=0)
    keep = sd > 1e-12
    z = (x[:, keep] - x[:, keep].mean(axis=0)) / sd[keep]
    u, s, vt = np.linalg.svd(z - z.mean(axis=0), full_matrices=False)
    scores = (z - z.mean(axis=0)) @ vt[:min(pcs, vt.shape[0])].T
    return fcluster(linkage(scores, "ward"), groups, "maxclust")


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parents[1] / "data" / "synthetic")
    rng = np.random.default_rng(SEED)
    suites = {"int_rate": (INT_RATE, 4, True), "fp_rate": (FP_RATE, 4, False), "dcperf": (DCPERF, 2, True)}

    truth = {}
    base = {}
    for suite, (names, groups, int_suite) in suites.items():
        t, v = plant(rng, names, groups, int_suite)
        for w in names:
            truth[(suite, w)] = t[w]
            base[(suite, w)] = v[w]

    machine_factor = {(m, k): math.exp(rng.normal(0.0, MACHINE_SPREAD)) for m in MACHINES for k in RANGES}
    icount = {key: float(log_uniform(rng, 1e12, 6e12)) for key in base}
    # Workloads of one planted group score alike, as the medoid idea assumes.
    group_score = {(suite, g): float(log_uniform(rng, 2.0, 12.0)) for (suite, _), g in truth.items()}
    score_base = {key: group_score[(key[0], truth[key])] * math.exp(rng.normal(0.0, 0.05)) for key in sorted(base)}
    speed = {m: float(rng.uniform(0.7, 1.4)) for m in MACHINES}

    rows = []      # suite, workload, machine, event, value, supported
    raw = {}       # (machine, suite, workload) -> list of (raw_value or None, raw_name)
    scores = []
    metric_values = {}
    for (suite, w), metrics in sorted(base.items()):
        for m in MACHINES:
            vals = {k: min(v * machine_factor[(m, k)], 99.0) if k.endswith("_pct") else v * machine_factor[(m, k)]
                    for k, v in metrics.items()}
            if m == "CPU-C" and w in PINNED:
                vals.update(PINNED[w])
            metric_values[(suite, w, m)] = vals
            ev = events_for(vals, icount[(suite, w)])
            dump = []
            for name in sorted(ev):
                if (m, name) in UNSUPPORTED:
                    rows.append((suite, w, m, name, 0, False))
                    dump.append((None, RAW_NAMES[m][name]))
                    continue
                if (m, name) in LINE_GRANULAR:
                    lines = int(round(ev[name] / 64.0))
                    rows.append((suite, w, m, name, lines * 64, True))
                    dump.append((lines, RAW_NAMES[m][name]))
                    continue
                count = int(round(ev[name]))
                rows.append((suite, w, m, name, count, True))
                dump.append((count, RAW_NAMES[m][name]))
            raw[(m, suite, w)] = dump
            cycles = int(round(ev["cycles"]))
            wall = cycles / (FREQ_GHZ[m] * 1e9)
            score = score_base[(suite, w)] * speed[m] * math.exp(rng.normal(0.0, 0.05))
            scores.append((suite, w, m, score, wall))

    out.mkdir(parents=True, exist_ok=True)
    with open(out / "store.csv", "w") as f:
        f.write("suite,workload,machine,event,value,supported\n")
        for s, w, m, e, v, sup in sorted(rows):
            f.write(f"{s},{w},{m},{e},{v},{'true' if sup else 'false'}\n")
    with open(out / "scores.csv", "w") as f:
        f.write("suite,workload,machine,score,wallclock_seconds\n")
        for s, w, m, sc, wall in sorted(scores):
            f.write(f"{s},{w},{m},{sc:.6f},{wall:.6f}\n")
    with open(out / "truth.csv", "w") as f:
        f.write("suite,workload,cluster\n")
        for (s, w), g in sorted(truth.items()):
            f.write(f"{s},{w},{g}\n")

    cmap = {"machines": {}}
    for m in MACHINES:
        events = {}
        for canon, rawname in RAW_NAMES[m].items():
            events[canon] = {"event": rawname, "unit": "lines"} if (m, canon) in LINE_GRANULAR else rawname
        cmap["machines"][m] = {"cacheline_bytes": 64, "events": events}
    (out / "counter_map.json").write_text(json.dumps(cmap, indent=2, sort_keys=True) + "\n")

    for (m, s, w), dump in sorted(raw.items()):
        d = out / "dumps" / m / s
        d.mkdir(parents=True, exist_ok=True)
        with open(d / f"{w}.csv", "w") as f:
            f.write(f"# perf stat -x, -a -- {w}\n\n")
            for value, name in dump:
                shown = "<not supported>" if value is None else str(value)
                f.write(f"{shown},,{name},1000000000,100.00\n")
            if (m, s, w) == ("CPU-G", "dcperf", "tao"):
                f.write("12x4,,cpu_clock,1000000000,100.00\n")

    (out / "mix.txt").write_text("# RRR pair, durations from measured wallclock\n709.cactus_r\n749.fotonik3d_r\n")
    (out / "config.toml").write_text(
        "# Defaults for running the pipeline on this fixture from the repository root.\n"
        'store = "data/synthetic/store.csv"\n'
        'scores = "data/synthetic/scores.csv"\n'
        'linkage = "ward"\n'
        "groups = 4\n"
        "top-n = 4\n")

    # Planted groups must be what the pipeline recovers.
    for suite, (names, groups, _) in suites.items():
        if groups < 3:
            continue
        matrix = []
        for w in sorted(names):
            row = []
            for k in RANGES:
                for m in MACHINES:
                    if k == "mem_bytes_per_cycle" and m == "CPU-A":
                        continue
                    row.append(metric_values[(suite, w, m)][k])
            matrix.append(row)
        labels = zscore_pca_ward(matrix, groups)
        found = {}
        for w, lab in zip(sorted(names), labels):
            found.setdefault(lab, set()).add(truth[(suite, w)])
        if any(len(v) != 1 for v in found.values()) or len(found) != groups:
            raise SystemExit(f"planted clusters not recovered for {suite}: {found}")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
