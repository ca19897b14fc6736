#pragma once

// Modulation-variance optimization and parameter sweeps of the key rate.

#include <cstddef>
#include <string>
#include <vector>

#include "cvqkd/security.hpp"

namespace cvqkd {

enum class SweepVariable : std::uint8_t { v_a, loss_db, upsilon, beta };

std::string to_string(SweepVariable v);
SweepVariable sweep_variable_from_string(const std::string& s);

struct Optimum {
    double v_a_star = 0.0;
    double key_rate_star = 0.0;  // bits/symbol
    std::size_t iterations = 0;  // key-rate evaluations
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    bool positive = true;        // false: no positive key rate on the grid
    SecurityReport report{};     // report at the optimum
};

/// Maximize the key rate over V_A in [bounds_lo, bounds_hi]. A 64-point
/// coarse scan brackets the maximum; golden-section refines the bracket to
/// |hi - lo| < tol when the scan shows a single slope sign change, otherwise
/// a full fine grid is used. Deterministic.
Optimum optimal_modulation(const ChannelParams& ch, const SourceNoise& src,
                           const DetectorParams& det, double beta,
                           double bounds_lo = 1e-3, double bounds_hi = 2.0,
                           double tol = 1e-4,
                           Convention convention = Convention::single,
                           double symbol_rate = 1e7);

struct SweepSpec {
    SweepVariable variable = SweepVariable::v_a;
    std::vector<double> grid;            // strictly increasing
    ProtocolParams fixed_protocol{};
    ChannelParams fixed_channel{};
    SourceNoise fixed_source{};
    DetectorParams fixed_detector{};
    Convention convention = Convention::single;
    bool optimize_v_a = false;           // per-row optimum over V_A (non-v_a sweeps)
};

struct SweepRow {
    double value;
    double key_rate_per_symbol;
    double key_rate_per_second;
    double i_ab;
    double holevo;
    double v_a;       // the V_A used for the row
    bool valid;
    std::string note; // error marker for unphysical points, empty otherwise
};

/// One row per grid point; rows are independent and deterministic. With
/// jobs > 1 the rows are evaluated by a worker pool and merged in grid
/// order; the output is bitwise-identical to a serial run.
std::vector<SweepRow> sweep(const SweepSpec& spec, int jobs = 1);

}  // namespace cvqkd
