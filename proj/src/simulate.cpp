#include "cvqkd/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "cvqkd/rng.hpp"

namespace cvqkd {

namespace {

constexpr double kPi = std::numbers::pi;

// rng stream ids
enum Stream : std::uint64_t {
    kSymbolDraw = 1,
    kBobNoiseX = 2,
    kBobNoiseP = 3,
    kArmNoiseX = 4,
    kArmNoiseP = 5,
    kSourceAmp = 6,
    kSourcePhase = 7,
    kCalNoise = 8,
    kCalPilot = 9,
};

constexpr std::size_t kGuardSymbols = 4;

struct ChainGeometry {
    std::size_t sps_internal;  // internal samples per symbol
    std::size_t decim;         // internal / adc
    double tau;                // adc interval
};

ChainGeometry chain_geometry(const RunConfig& cfg) {
    const double sps = cfg.internal_rate / cfg.protocol.symbol_rate;
    const double dec = cfg.internal_rate / cfg.adc_rate;
    return {static_cast<std::size_t>(std::lround(sps)),
            static_cast<std::size_t>(std::lround(dec)), 1.0 / cfg.adc_rate};
}

// mixing + LPF + decimation to the ADC grid
Waveform chain_process(const RunConfig& cfg, std::vector<double>&& arm) {
    Waveform w{cfg.internal_rate, 0.0, std::move(arm)};
    Waveform filtered = mix_and_filter(w, cfg.carrier_hz, 0.0, cfg.lpf_cutoff_hz);
    w.samples.clear();
    w.samples.shrink_to_fit();
    return downsample(filtered, cfg.adc_rate);
}

// full chain through truncated sinc recovery, raw units
std::vector<double> chain_recover(const RunConfig& cfg, std::vector<double>&& arm,
                                  Waveform* keep_decimated = nullptr) {
    Waveform dec = chain_process(cfg, std::move(arm));
    const SincKernel kernel = sinc_coefficients(1.0 / cfg.adc_rate, 0, 5);
    std::vector<double> values = recover_symbols(dec, 5.0 / cfg.adc_rate, kernel).values;
    if (keep_decimated) *keep_decimated = std::move(dec);
    return values;
}

// NRZ hold of per-symbol values at the internal rate
std::vector<double> nrz(const std::vector<double>& symbols, std::size_t sps) {
    std::vector<double> out(symbols.size() * sps);
    for (std::size_t j = 0; j < symbols.size(); ++j)
        std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(j * sps), sps, symbols[j]);
    return out;
}

// band-limited Gaussian process: white noise through the standard FIR,
// rescaled to the requested rms
std::vector<double> band_limited_noise(const RunConfig& cfg, std::uint64_t stream,
                                       std::size_t n, double rms, double cutoff_hz) {
    std::vector<double> out(n, 0.0);
    if (rms <= 0.0) return out;
    for (std::size_t i = 0; i < n; ++i)
        out[i] = rng_gauss(cfg.seed, stream, i);
    const std::vector<double> h = design_lowpass_fir(129, cutoff_hz, cfg.internal_rate);
    double h2 = 0.0;
    for (double v : h) h2 += v * v;
    const double gain = rms / std::sqrt(h2);
    std::vector<double> filt(n, 0.0);
    const int gd = (static_cast<int>(h.size()) - 1) / 2;
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < h.size(); ++k) {
            const long j = static_cast<long>(i) + gd - static_cast<long>(k);
            if (j >= 0 && j < static_cast<long>(n)) acc += h[k] * out[static_cast<std::size_t>(j)];
        }
        filt[i] = gain * acc;
    }
    return filt;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double var_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

}  // namespace

std::string to_string(Fidelity f) {
    return f == Fidelity::symbol ? "symbol" : "waveform";
}

Fidelity fidelity_from_string(const std::string& s) {
    if (s == "symbol") return Fidelity::symbol;
    if (s == "waveform") return Fidelity::waveform;
    throw std::domain_error("unknown fidelity '" + s + "' (expected symbol|waveform)");
}

void RunConfig::validate() const {
    if (n_symbols == 0) throw std::domain_error("n_symbols must be > 0");
    channel.validate();
    source.validate();
    detector.validate();
    if (!(protocol.v_a >= 0.0)) throw std::domain_error("v_a must be >= 0");
    if (!(protocol.symbol_rate > 0.0)) throw std::domain_error("symbol_rate must be > 0");
    if (fidelity == Fidelity::waveform) {
        const double dec = internal_rate / adc_rate;
        if (std::abs(dec - std::round(dec)) > 1e-9 || dec < 1.0)
            throw std::domain_error("internal_rate / adc_rate must be a positive integer");
        const double spsym = adc_rate / protocol.symbol_rate;
        if (std::abs(spsym - 5.0) > 1e-9)
            throw std::domain_error("adc_rate must be 5 x symbol_rate (5 samples per symbol)");
        if (!(carrier_hz > 0.0) || carrier_hz >= internal_rate / 2.0)
            throw std::domain_error("carrier must be below the internal Nyquist rate");
        if (!(lpf_cutoff_hz > 0.0) || lpf_cutoff_hz >= internal_rate / 2.0)
            throw std::domain_error("lpf cutoff must be below the internal Nyquist rate");
        if (!(x0 > 0.0)) throw std::domain_error("x0 must be > 0");
        if (n_calibration < 100) throw std::domain_error("n_calibration must be >= 100");
    }
}

std::vector<SymbolRecord> symbol_level_run(const RunConfig& cfg) {
    cfg.validate();
    const double va = cfg.protocol.v_a;
    const double amp = std::sqrt(va);
    const double gain = std::sqrt(cfg.detector.eta * cfg.channel.t0 / 2.0);
    // eta/2 (1 + T0 eps0 + T0 deps) + (1-eta)/2 + upsilon + 1/2;
    // (1-eta)/2 N with N = 1 + 2 upsilon/(1-eta) written eta-1-safe
    const double sigma_sq =
        cfg.detector.eta / 2.0 *
            (1.0 + cfg.channel.t0 * (cfg.channel.eps0 + cfg.source.delta_eps)) +
        (1.0 - cfg.detector.eta) / 2.0 + cfg.detector.upsilon + 0.5;
    const double sigma = std::sqrt(sigma_sq);

    std::vector<SymbolRecord> out;
    out.reserve(cfg.n_symbols);
    for (std::uint64_t n = 0; n < cfg.n_symbols; ++n) {
        const int k = static_cast<int>(rng_below(cfg.seed, kSymbolDraw, n, 4));
        const double ax = qpsk_sign_x(k) * amp;
        const double ap = qpsk_sign_p(k) * amp;
        const double bx = gain * ax + sigma * rng_gauss(cfg.seed, kBobNoiseX, n);
        const double bp = gain * ap + sigma * rng_gauss(cfg.seed, kBobNoiseP, n);
        out.push_back({n, k, ax, ap, bx, bp});
    }
    return out;
}

ShotCalibration shot_noise_calibration(const RunConfig& cfg) {
    RunConfig c = cfg;
    c.fidelity = Fidelity::waveform;
    c.validate();
    const ChainGeometry geo = chain_geometry(c);
    const std::size_t total = c.n_calibration + 2 * kGuardSymbols;
    const std::size_t n_samp = total * geo.sps_internal;

    // vacuum pass: unit-variance white noise per sample
    std::vector<double> arm(n_samp);
    for (std::size_t i = 0; i < n_samp; ++i)
        arm[i] = rng_gauss(c.seed, kCalNoise, i);
    std::vector<double> rec = chain_recover(c, std::move(arm));
    if (rec.size() < c.n_calibration + kGuardSymbols)
        throw std::runtime_error("shot_noise_calibration: chain produced too few symbols");
    std::vector<double> vac(rec.begin() + kGuardSymbols,
                            rec.begin() + kGuardSymbols + static_cast<std::ptrdiff_t>(c.n_calibration));
    const double kappa = var_of(vac);
    if (!(kappa > 0.0))
        throw std::runtime_error("shot_noise_calibration: zero-variance output, chain broken");

    // pilot pass: random +-1 symbols on the carrier, no noise
    std::vector<double> pilot(total);
    for (std::size_t j = 0; j < total; ++j)
        pilot[j] = rng_below(c.seed, kCalPilot, j, 2) ? 1.0 : -1.0;
    std::vector<double> sig = nrz(pilot, geo.sps_internal);
    for (std::size_t i = 0; i < n_samp; ++i) {
        const double t = static_cast<double>(i) / c.internal_rate;
        sig[i] *= std::cos(2.0 * kPi * c.carrier_hz * t);
    }
    rec = chain_recover(c, std::move(sig));
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < c.n_calibration; ++j) {
        const double a = pilot[j + kGuardSymbols];
        num += rec[j + kGuardSymbols] * a;
        den += a * a;
    }
    const double g = num / den;
    if (!(std::abs(g) > 0.0))
        throw std::runtime_error("shot_noise_calibration: zero signal gain, chain broken");
    return {g, std::sqrt(kappa), 1.0 / g};
}

WaveformRunResult waveform_level_run(const RunConfig& cfg) {
    RunConfig c = cfg;
    c.fidelity = Fidelity::waveform;
    c.validate();

    const ShotCalibration cal = shot_noise_calibration(c);
    const ChainGeometry geo = chain_geometry(c);
    const std::size_t total = c.n_symbols + 2 * kGuardSymbols;
    const std::size_t n_samp = total * geo.sps_internal;

    const double va = c.protocol.v_a;
    const double amp = std::sqrt(va);

    // linearization regime of A = sqrt((x0+x)^2 + p^2) ~ x0 + x
    const double depth = amp / 2.0 / c.x0;
    if (depth > 0.05)
        throw std::runtime_error(
            "linearization violated: modulation depth " + std::to_string(depth) +
            " exceeds 0.05 x0; raise x0 or lower v_a");

    std::vector<int> ks(total);
    std::vector<double> sym_x(total), sym_p(total);
    for (std::size_t j = 0; j < total; ++j) {
        ks[j] = static_cast<int>(rng_below(c.seed, kSymbolDraw, j, 4));
        sym_x[j] = qpsk_sign_x(ks[j]) * amp;
        sym_p[j] = qpsk_sign_p(ks[j]) * amp;
    }

    // detector-referred white noise: vacuum + electronic + channel excess,
    // in shot-noise units per recovered symbol
    const double sigma_snu_sq =
        1.0 + c.detector.upsilon +
        c.detector.eta * c.channel.t0 * (c.channel.eps0 + c.source.delta_eps) / 2.0;
    const double sigma_w = std::sqrt(sigma_snu_sq) * cal.signal_gain / cal.noise_gain;

    const double field_gain = std::sqrt(2.0 * c.detector.eta * c.channel.t0);

    const std::vector<double> n_a =
        band_limited_noise(c, kSourceAmp, n_samp, c.amp_noise_rms, c.amp_noise_cutoff_hz);
    const std::vector<double> n_p =
        band_limited_noise(c, kSourcePhase, n_samp, c.phase_noise_rms,
                           c.phase_noise_cutoff_hz);
    const bool has_na = c.amp_noise_rms > 0.0;
    const bool has_np = c.phase_noise_rms > 0.0;

    const std::vector<double> x_t = nrz(sym_x, geo.sps_internal);
    const std::vector<double> p_t = nrz(sym_p, geo.sps_internal);

    double max_depth = 0.0;
    std::vector<double> arm_x(n_samp), arm_p(n_samp);
    for (std::size_t i = 0; i < n_samp; ++i) {
        const double t = static_cast<double>(i) / c.internal_rate;
        const double carrier = std::cos(2.0 * kPi * c.carrier_hz * t);
        const double m_a = 0.5 * x_t[i] * carrier;
        const double theta_mod = 0.5 * p_t[i] / c.x0 * carrier;
        max_depth = std::max(max_depth, std::abs(m_a) / c.x0);

        const double a_field = c.x0 + m_a + (has_na ? n_a[i] : 0.0);
        const double phase = (has_np ? n_p[i] : 0.0) + theta_mod;
        // homodyne against the LO, which carries the same source phase noise
        const double lo_x = (has_np ? n_p[i] : 0.0);
        const double lo_p = kPi / 2.0 + lo_x;
        arm_x[i] = field_gain * a_field * std::cos(phase - lo_x) +
                   sigma_w * rng_gauss(c.seed, kArmNoiseX, i);
        arm_p[i] = field_gain * a_field * std::cos(phase - lo_p) +
                   sigma_w * rng_gauss(c.seed, kArmNoiseP, i);
    }

    WaveformRunResult out;
    const std::vector<double> rec_x = chain_recover(
        c, std::move(arm_x), c.keep_waveforms ? &out.arm_x_decimated : nullptr);
    const std::vector<double> rec_p = chain_recover(
        c, std::move(arm_p), c.keep_waveforms ? &out.arm_p_decimated : nullptr);
    if (rec_x.size() < kGuardSymbols + c.n_symbols)
        throw std::runtime_error("waveform_level_run: chain produced too few symbols");

    out.records.reserve(c.n_symbols);
    for (std::uint64_t n = 0; n < c.n_symbols; ++n) {
        const std::size_t j = kGuardSymbols + n;
        out.records.push_back({n, ks[j], sym_x[j], sym_p[j],
                               rec_x[j] * cal.scale, rec_p[j] * cal.scale});
    }
    out.diagnostics.calibration = cal;
    out.diagnostics.max_mod_depth = max_depth;
    out.diagnostics.guard_symbols = kGuardSymbols;
    out.diagnostics.internal_samples = n_samp;
    return out;
}

void write_records_csv(const std::vector<SymbolRecord>& records, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << "n,k,alice_x,alice_p,bob_x,bob_p\n";
    char line[160];
    for (const SymbolRecord& r : records) {
        std::snprintf(line, sizeof(line), "%llu,%d,%.17g,%.17g,%.17g,%.17g\n",
                      static_cast<unsigned long long>(r.n), r.k, r.alice_x, r.alice_p,
                      r.bob_x, r.bob_p);
        f << line;
    }
}

std::vector<SymbolRecord> read_records_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error("empty record file: " + path);
    if (line.rfind("n,k,", 0) != 0)
        throw std::runtime_error("bad record header in " + path);
    std::vector<SymbolRecord> out;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        SymbolRecord r{};
        if (!(ss >> r.n >> r.k >> r.alice_x >> r.alice_p >> r.bob_x >> r.bob_p))
            throw std::runtime_error("bad record line in " + path);
        out.push_back(r);
    }
    return out;
}

}  // namespace cvqkd
