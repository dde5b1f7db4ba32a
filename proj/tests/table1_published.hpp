#ifndef BENCHSCOPE_TESTS_TABLE1_PUBLISHED_HPP
#define BENCHSCOPE_TESTS_TABLE1_PUBLISHED_HPP

#include <array>
#include <string_view>

// Published per-workload characteristics on CPU-C: instruction count in
// billions, Loads/Stores/Branches as % of instructions, IPC.
namespace table1 {

struct Row {
    std::string_view suite;
    std::string_view workload;
    double icount_billions;
    double load_pct;
    double store_pct;
    double branch_pct;
    double ipc;
};

inline constexpr std::array<Row, 52> kRows = {{
    {"int_rate", "706.stockfish_r", 6507, 22.0, 9.9, 10.4, 3.625},
    {"int_rate", "707.ntest_r", 2507, 25.0, 9.6, 9.2, 3.268},
    {"int_rate", "708.sqlite_r", 1716, 26.9, 11.9, 20.9, 2.228},
    {"int_rate", "710.omnetpp_r", 1583, 31.9, 17.5, 20.5, 2.103},
    {"int_rate", "714.cpython_r", 1475, 27.9, 15.8, 21.4, 2.843},
    {"int_rate", "721.gcc_r", 1503, 28.0, 11.3, 21.8, 0.551},
    {"int_rate", "723.llvm_r", 1534, 26.0, 13.7, 20.8, 1.484},
    {"int_rate", "727.cppcheck_r", 1286, 22.5, 9.6, 26.7, 2.228},
    {"int_rate", "729.abc_r", 1400, 26.2, 8.9, 16.7, 2.187},
    {"int_rate", "734.vpr_r", 1367, 30.9, 11.2, 19.2, 2.097},
    {"int_rate", "735.gem5_r", 1659, 30.2, 14.7, 20.9, 2.068},
    {"int_rate", "750.sealcrypto_r", 3087, 12.0, 4.7, 1.9, 4.961},
    {"int_rate", "753.ns3_r", 1432, 29.4, 16.8, 22.2, 2.230},
    {"int_rate", "777.zstd_r", 1817, 22.2, 9.0, 13.3, 1.911},
    {"int_speed", "801.xz_s", 17757, 22.2, 7.4, 14.4, 1.008},
    {"int_speed", "807.ntest_s", 151005, 20.8, 7.8, 6.7, 3.460},
    {"int_speed", "817.flac_s", 90970, 17.6, 2.3, 4.4, 4.156},
    {"int_speed", "821.gcc_s", 109486, 26.8, 12.5, 21.7, 2.016},
    {"int_speed", "823.llvm_s", 103105, 22.0, 11.8, 23.1, 1.896},
    {"int_speed", "827.cppcheck_s", 90423, 23.0, 11.2, 26.5, 2.375},
    {"int_speed", "829.abc_s", 1433, 25.1, 11.7, 18.1, 0.858},
    {"int_speed", "834.vpr_s", 3117, 30.7, 11.1, 19.4, 1.863},
    {"int_speed", "835.gem5_s", 2858, 29.4, 13.5, 17.6, 1.805},
    {"int_speed", "838.diamond_s", 146966, 20.1, 6.8, 5.5, 3.203},
    {"int_speed", "846.minizinc_s", 5062, 26.5, 18.2, 15.9, 1.228},
    {"int_speed", "853.ns3_s", 11053, 28.9, 14.3, 21.0, 1.662},
    {"int_speed", "854.graph500_s", 37168, 36.2, 0.9, 25.7, 1.539},
    {"fp_rate", "709.cactus_r", 1456, 51.9, 7.9, 1.1, 1.696},
    {"fp_rate", "722.palm_r", 3272, 39.0, 9.1, 5.0, 3.187},
    {"fp_rate", "731.astcenc_r", 2615, 28.3, 6.5, 8.7, 2.718},
    {"fp_rate", "736.ocio_r", 2484, 24.2, 7.5, 9.8, 3.269},
    {"fp_rate", "737.gmsh_r", 1086, 29.2, 12.1, 17.2, 1.585},
    {"fp_rate", "748.flightdm_r", 1721, 29.5, 14.2, 18.8, 3.071},
    {"fp_rate", "749.fotonik3d_r", 1291, 36.8, 13.7, 1.8, 0.785},
    {"fp_rate", "765.roms_r", 2738, 34.8, 8.4, 7.3, 1.830},
    {"fp_rate", "766.femflow_r", 5012, 34.9, 20.1, 6.9, 3.265},
    {"fp_rate", "767.nest_r", 1848, 33.5, 12.3, 14.0, 2.844},
    {"fp_rate", "772.marian_r", 6389, 8.7, 1.3, 3.0, 3.953},
    {"fp_rate", "782.lbm_r", 2236, 21.2, 10.9, 0.7, 1.241},
    {"fp_speed", "800.pot3d_s", 7603, 34.8, 8.1, 9.5, 0.754},
    {"fp_speed", "803.sph_exa_s", 64626, 24.8, 3.4, 11.2, 2.465},
    {"fp_speed", "809.cactus_s", 29190, 51.9, 8.1, 1.6, 1.338},
    {"fp_speed", "811.tealeaf_s", 40570, 20.2, 4.9, 8.8, 1.617},
    {"fp_speed", "816.nab_s", 67717, 31.2, 5.7, 11.9, 2.441},
    {"fp_speed", "820.cloverleaf_s", 25781, 33.2, 4.7, 5.9, 1.349},
    {"fp_speed", "822.palm_s", 48883, 38.2, 8.9, 6.4, 1.920},
    {"fp_speed", "849.fotonik3d_s", 17777, 56.0, 9.8, 2.7, 0.955},
    {"fp_speed", "857.namd_s", 168881, 26.4, 6.6, 2.2, 3.929},
    {"fp_speed", "865.roms_s", 28484, 34.7, 8.6, 7.9, 1.574},
    {"fp_speed", "867.nest_s", 66774, 30.1, 9.3, 14.7, 1.790},
    {"fp_speed", "872.marian_s", 65980, 10.8, 2.8, 3.8, 3.258},
    {"fp_speed", "881.neutron_s", 33545, 25.8, 11.3, 9.1, 1.204},
}};

} // namespace table1

#endif
