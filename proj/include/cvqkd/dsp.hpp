#pragma once

// Data-processing chain: carrier mixing, FIR low-pass, decimation to the
// ADC rate, band-limited sinc reconstruction, and truncated sinc-integral
// symbol recovery.

#include <cstddef>
#include <utility>
#include <vector>

namespace cvqkd {

struct Waveform {
    double sample_rate = 0.0;     // Hz
    double t0 = 0.0;              // start time, s
    std::vector<double> samples;  // arbitrary linear units

    double dt() const { return 1.0 / sample_rate; }
    void validate() const;
};

/// Normalized sinc: sin(pi u) / (pi u), sinc(0) = 1.
double sinc(double u);

/// Integral coefficients S_i = int_{-i tau}^{(5-i) tau} sinc(t/tau) dt.
/// Symmetric about i = 2.5: S_i = S_{5-i}.
struct SincKernel {
    double tau = 0.0;        // sampling interval, s
    int i_min = 0;
    std::vector<double> s;   // S_{i_min} .. S_{i_max}

    int i_max() const { return i_min + static_cast<int>(s.size()) - 1; }
    double at(int i) const { return s[static_cast<std::size_t>(i - i_min)]; }
};

/// Computes S_i by adaptive quadrature to absolute error < 1e-12 tau.
/// The index range must cover [0, 5].
SincKernel sinc_coefficients(double tau, int i_min = 0, int i_max = 5);

/// V(t) = sum_i V_i sinc(t/tau - i) over the available samples; exact at the
/// sample times. Sets *extrapolated when t lies more than 10 tau outside the
/// sampled span.
double reconstruct(const Waveform& w, double t, bool* extrapolated = nullptr);

struct RecoveredSymbols {
    std::vector<double> values;     // weighted sums, one per complete symbol
    double scale = 1.0;             // calibration constant k (units -> SNU)
    std::size_t dropped_head = 0;   // symbols lost to an incomplete window
    std::size_t dropped_tail = 0;   // includes any trailing partial symbol
    std::size_t partial_tail_samples = 0;
};

/// Per-symbol recovery X_n = sum_{i in window} V_{5n-5+i} S_i with the
/// default truncation window (0, 5). Requires symbol_period = 5 tau; symbols
/// whose sample windows are incomplete are dropped, not zero-padded.
RecoveredSymbols recover_symbols(const Waveform& w, double symbol_period,
                                 const SincKernel& kernel,
                                 std::pair<int, int> truncation = {0, 5});

/// Linear-phase FIR low-pass taps: windowed sinc, Blackman window, unit DC
/// gain. ntaps must be odd.
std::vector<double> design_lowpass_fir(int ntaps, double cutoff_hz, double sample_rate);

/// Magnitude response of a tap set at frequency f (direct DFT of the taps).
double fir_magnitude_response(const std::vector<double>& taps, double f_hz,
                              double sample_rate);

/// Pointwise product with cos(2 pi carrier t + phase) followed by a
/// group-delay-compensated 129-tap FIR low-pass at cutoff_hz. Symbol
/// boundaries stay aligned with the input grid.
Waveform mix_and_filter(const Waveform& w, double carrier_hz, double phase,
                        double cutoff_hz);

/// Integer-factor decimation. The rate ratio must be an integer; sample
/// times are preserved on the common grid.
Waveform downsample(const Waveform& w, double target_rate);

}  // namespace cvqkd
