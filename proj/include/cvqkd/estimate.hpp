#pragma once

// Channel/detector parameter recovery and empirical information rates from
// symbol records, mirroring the experimental calibration: chi_t from the
// measured scatter, upsilon backed out from chi_t.

#include <cstddef>
#include <vector>

#include "cvqkd/simulate.hpp"

namespace cvqkd {

struct ConfidenceInterval {
    double lo;
    double hi;
};

struct EstimationResult {
    double gain_sq;        // (eta T0 / 2) estimate, pooled slope squared
    double chi_t_hat;      // total-noise estimate
    double t_hat;          // transmittance, given the calibrated eta
    double snr_hat;        // per-quadrature SNR
    double i_ab_hat;       // empirical mutual information, bits/symbol
    std::size_t n_used;
    ConfidenceInterval gain_sq_ci;   // 95%
    ConfidenceInterval chi_t_ci;
    ConfidenceInterval i_ab_ci;
    // per-quadrature slopes and residual variances, for asymmetry checks
    double slope_x, slope_p;
    double resid_var_x, resid_var_p;
};

/// Pooled least squares of bob on alice over both quadratures. The slope g
/// gives gain_sq = g^2, the residual variance r^2 gives
/// chi_t_hat = r^2 / gain_sq - 1 and t_hat = 2 gain_sq / eta.
/// Throws std::runtime_error("channel opaque") when |g| < 1e-6, and
/// std::domain_error with fewer than 1000 records.
EstimationResult estimate_channel(const std::vector<SymbolRecord>& records,
                                  double v_a, double eta);

/// upsilon = (eta/2) ((chi_t - (1/t - 1 + eps)) t + 1) - 1, the algebraic
/// inverse of the noise budget. Values below -1e-3 raise a consistency error.
double backout_detector_noise(double chi_t_hat, double t, double eps, double eta);

/// Gaussian-channel estimate: sum over both quadratures of
/// 1/2 log2(1 + SNR_q) with SNR from the signal/residual variance split.
double empirical_mutual_information(const std::vector<SymbolRecord>& records);

struct RawKeyReport {
    std::vector<std::uint8_t> alice_bits;  // 2 bits per symbol: sign x, sign p
    std::vector<std::uint8_t> bob_bits;
    double mismatch_x;
    double mismatch_p;
    double mismatch;  // pooled
};

/// Two bits per symbol from quadrature signs; per-position mismatch rates.
RawKeyReport raw_key_bits(const std::vector<SymbolRecord>& records);

}  // namespace cvqkd
