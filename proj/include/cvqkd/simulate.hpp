#pragma once

// Prepare-and-measure Monte Carlo at two fidelities: fast symbol-level
// Gaussian sampling, and full waveform-level simulation of the modulator
// linearization, carrier chain, channel loss, and heterodyne detector.

#include <cstdint>
#include <string>
#include <vector>

#include "cvqkd/dsp.hpp"
#include "cvqkd/security.hpp"

namespace cvqkd {

enum class Fidelity : std::uint8_t { symbol, waveform };

std::string to_string(Fidelity f);
Fidelity fidelity_from_string(const std::string& s);

struct SymbolRecord {
    std::uint64_t n;   // symbol index
    int k;             // constellation index 0..3
    double alice_x;    // sent quadrature means, +-sqrt(v_a)
    double alice_p;
    double bob_x;      // heterodyne outcomes, shot-noise units
    double bob_p;
};

struct RunConfig {
    std::uint64_t n_symbols = 50000;
    std::uint64_t seed = 1;
    ProtocolParams protocol{};
    ChannelParams channel{};
    SourceNoise source{};
    DetectorParams detector{};
    Fidelity fidelity = Fidelity::symbol;

    // waveform-chain rates; the reference defaults are
    // carrier = adc = 5 * symbol_rate with a 400 MS/s internal rate
    double carrier_hz = 5e7;
    double adc_rate = 5e7;
    double internal_rate = 4e8;
    double lpf_cutoff_hz = 2.5e7;

    // dimensionless simulation knobs of the strong-carrier modulator; x0 is
    // the carrier offset the small modulations ride on (linearization regime)
    double x0 = 200.0;
    double amp_noise_rms = 0.0;       // source amplitude noise n_A, field units
    double amp_noise_cutoff_hz = 1e7;
    double phase_noise_rms = 0.0;     // source phase noise n_P, rad
    double phase_noise_cutoff_hz = 1e7;

    std::uint64_t n_calibration = 20000;  // symbols per calibration pass
    bool keep_waveforms = false;          // retain the decimated detector arms

    void validate() const;
};

/// Chain calibration constants, deterministic given the config seed.
struct ShotCalibration {
    double signal_gain;  // raw recovered units per unit symbol amplitude
    double noise_gain;   // raw per-symbol std per unit per-sample white noise
    double scale;        // multiplicative map raw -> shot-noise units (1/signal_gain)
};

/// QPSK sign mapping of constellation index k: amplitude alpha e^{i(2k+1)pi/4}.
inline int qpsk_sign_x(int k) { return (k == 0 || k == 3) ? 1 : -1; }
inline int qpsk_sign_p(int k) { return (k == 0 || k == 1) ? 1 : -1; }

/// Per symbol: k uniform; bob = sqrt(eta T0 / 2) alice + gaussian noise of
/// variance eta/2 (1 + T0 eps0 + T0 delta_eps) + (1-eta)/2 + upsilon + 1/2,
/// reproducing V_b = (eta T / 2)(V + chi_t). Deterministic in cfg.seed.
std::vector<SymbolRecord> symbol_level_run(const RunConfig& cfg);

struct WaveformDiagnostics {
    ShotCalibration calibration{};
    double max_mod_depth = 0.0;        // max |modulation| / x0 observed
    std::size_t guard_symbols = 0;     // dropped at each end
    std::size_t internal_samples = 0;  // per arm
};

struct WaveformRunResult {
    std::vector<SymbolRecord> records;
    WaveformDiagnostics diagnostics;
    Waveform arm_x_decimated;  // filled when cfg.keep_waveforms is set
    Waveform arm_p_decimated;
};

/// Full signal chain: NRZ symbol streams mixed onto the carrier as small
/// amplitude/phase modulations of the offset field, channel loss sqrt(T0),
/// two homodyne arms at phase 0 and pi/2 sharing the source phase noise with
/// the LO, detector-referred white noise calibrated to shot-noise units,
/// then mix_and_filter -> downsample -> recover_symbols.
/// Throws std::runtime_error when modulation depth exceeds 0.05 x0.
WaveformRunResult waveform_level_run(const RunConfig& cfg);

/// Vacuum run measuring the chain's noise gain plus a noiseless pilot run
/// measuring its symbol gain. Throws std::runtime_error if the chain
/// produces zero variance.
ShotCalibration shot_noise_calibration(const RunConfig& cfg);

/// CSV with header n,k,alice_x,alice_p,bob_x,bob_p.
void write_records_csv(const std::vector<SymbolRecord>& records, const std::string& path);
std::vector<SymbolRecord> read_records_csv(const std::string& path);

}  // namespace cvqkd
