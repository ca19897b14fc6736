#include "cvqkd/dsp.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cvqkd {

namespace {

constexpr double kPi = std::numbers::pi;

double simpson(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

// standard adaptive Simpson with error sharing
double adaptive_simpson(double (*f)(double), double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    if (depth <= 0) throw std::runtime_error("adaptive quadrature did not converge");
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(double (*f)(double), double a, double b, double tol) {
    if (a == b) return 0.0;
    // split per unit interval; the sinc integrand oscillates with period 2
    const double lo = std::min(a, b), hi = std::max(a, b);
    const double sign = a < b ? 1.0 : -1.0;
    double total = 0.0;
    double x0 = lo;
    const double n_panels = std::max(1.0, std::ceil(hi - lo));
    const double panel_tol = tol / n_panels;
    while (x0 < hi) {
        const double x1 = std::min(x0 + 1.0, hi);
        const double fa = f(x0), fb = f(x1), fm = f(0.5 * (x0 + x1));
        const double whole = simpson(fa, fm, fb, x1 - x0);
        total += adaptive_simpson(f, x0, x1, fa, fm, fb, whole, panel_tol, 48);
        x0 = x1;
    }
    return sign * total;
}

}  // namespace

void Waveform::validate() const {
    if (!(sample_rate > 0.0)) throw std::domain_error("waveform sample_rate must be > 0");
    for (double v : samples)
        if (!std::isfinite(v)) throw std::domain_error("waveform sample not finite");
}

double sinc(double u) {
    if (u == 0.0) return 1.0;
    const double x = kPi * u;
    return std::sin(x) / x;
}

SincKernel sinc_coefficients(double tau, int i_min, int i_max) {
    if (!(tau > 0.0)) throw std::domain_error("sinc_coefficients: tau must be > 0");
    if (!(i_min <= 0 && 5 <= i_max))
        throw std::domain_error("sinc_coefficients: index range must cover [0, 5]");
    SincKernel k;
    k.tau = tau;
    k.i_min = i_min;
    k.s.reserve(static_cast<std::size_t>(i_max - i_min + 1));
    for (int i = i_min; i <= i_max; ++i) {
        double v;
        try {
            // dimensionless integral over u = t / tau
            v = tau * integrate(&sinc, -static_cast<double>(i),
                                static_cast<double>(5 - i), 1e-13);
        } catch (const std::exception&) {
            throw std::runtime_error("sinc_coefficients: quadrature failed at i=" +
                                     std::to_string(i));
        }
        k.s.push_back(v);
    }
    return k;
}

double reconstruct(const Waveform& w, double t, bool* extrapolated) {
    w.validate();
    if (w.samples.empty()) throw std::domain_error("reconstruct: empty waveform");
    const double tau = w.dt();
    const double u = (t - w.t0) / tau;
    const double n = static_cast<double>(w.samples.size());
    if (extrapolated) *extrapolated = (u < -10.0 || u > n - 1.0 + 10.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < w.samples.size(); ++i)
        acc += w.samples[i] * sinc(u - static_cast<double>(i));
    return acc;
}

RecoveredSymbols recover_symbols(const Waveform& w, double symbol_period,
                                 const SincKernel& kernel,
                                 std::pair<int, int> truncation) {
    w.validate();
    const double tau = w.dt();
    if (std::abs(symbol_period / tau - 5.0) > 1e-9)
        throw std::domain_error("recover_symbols: symbol_period must be 5 sampling intervals");
    if (std::abs(kernel.tau - tau) > 1e-12 * tau)
        throw std::domain_error("recover_symbols: kernel tau does not match waveform");
    const auto [lo, hi] = truncation;
    if (lo > 0 || hi < 5)
        throw std::domain_error("recover_symbols: truncation window must cover [0, 5]");
    if (lo < kernel.i_min || hi > kernel.i_max())
        throw std::domain_error("recover_symbols: truncation window exceeds kernel range");

    RecoveredSymbols out;
    const std::size_t n_samples = w.samples.size();
    const std::size_t n_full = n_samples / 5;  // complete symbols in the stream
    out.partial_tail_samples = n_samples % 5;

    // symbol n (1-based) uses samples 5n-5+lo .. 5n-5+hi
    for (std::size_t n = 1; n <= n_full; ++n) {
        const long first = static_cast<long>(5 * n) - 5 + lo;
        const long last = static_cast<long>(5 * n) - 5 + hi;
        if (first < 0) {
            ++out.dropped_head;
            continue;
        }
        if (last >= static_cast<long>(n_samples)) {
            ++out.dropped_tail;
            continue;
        }
        double acc = 0.0;
        for (int i = lo; i <= hi; ++i)
            acc += w.samples[static_cast<std::size_t>(first + (i - lo))] * kernel.at(i);
        out.values.push_back(acc);
    }
    if (out.partial_tail_samples != 0) ++out.dropped_tail;
    return out;
}

std::vector<double> design_lowpass_fir(int ntaps, double cutoff_hz, double sample_rate) {
    if (ntaps < 3 || ntaps % 2 == 0)
        throw std::domain_error("design_lowpass_fir: ntaps must be odd and >= 3");
    if (!(cutoff_hz > 0.0) || cutoff_hz >= sample_rate / 2.0)
        throw std::domain_error("design_lowpass_fir: cutoff must be in (0, Nyquist)");
    const double fc = cutoff_hz / sample_rate;
    const int mid = (ntaps - 1) / 2;
    std::vector<double> h(static_cast<std::size_t>(ntaps));
    double sum = 0.0;
    for (int n = 0; n < ntaps; ++n) {
        const double m = n - mid;
        const double ideal = 2.0 * fc * sinc(2.0 * fc * m);
        // Blackman window
        const double wnd = 0.42 - 0.5 * std::cos(2.0 * kPi * n / (ntaps - 1)) +
                           0.08 * std::cos(4.0 * kPi * n / (ntaps - 1));
        h[static_cast<std::size_t>(n)] = ideal * wnd;
        sum += h[static_cast<std::size_t>(n)];
    }
    for (double& v : h) v /= sum;
    return h;
}

double fir_magnitude_response(const std::vector<double>& taps, double f_hz,
                              double sample_rate) {
    double re = 0.0, im = 0.0;
    for (std::size_t n = 0; n < taps.size(); ++n) {
        const double ph = -2.0 * kPi * f_hz / sample_rate * static_cast<double>(n);
        re += taps[n] * std::cos(ph);
        im += taps[n] * std::sin(ph);
    }
    return std::hypot(re, im);
}

Waveform mix_and_filter(const Waveform& w, double carrier_hz, double phase,
                        double cutoff_hz) {
    w.validate();
    if (!(carrier_hz > 0.0) || carrier_hz >= w.sample_rate / 2.0)
        throw std::domain_error("mix_and_filter: carrier must be below Nyquist");
    if (!(cutoff_hz > 0.0) || cutoff_hz >= w.sample_rate / 2.0)
        throw std::domain_error("mix_and_filter: cutoff must be below Nyquist");

    const std::size_t n = w.samples.size();
    std::vector<double> mixed(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = w.t0 + static_cast<double>(i) / w.sample_rate;
        mixed[i] = w.samples[i] * std::cos(2.0 * kPi * carrier_hz * t + phase);
    }

    constexpr int kTaps = 129;
    const std::vector<double> h = design_lowpass_fir(kTaps, cutoff_hz, w.sample_rate);
    const int gd = (kTaps - 1) / 2;  // group delay, compensated below

    Waveform out;
    out.sample_rate = w.sample_rate;
    out.t0 = w.t0;
    out.samples.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int k = 0; k < kTaps; ++k) {
            const long j = static_cast<long>(i) + gd - k;
            if (j >= 0 && j < static_cast<long>(n))
                acc += h[static_cast<std::size_t>(k)] * mixed[static_cast<std::size_t>(j)];
        }
        out.samples[i] = acc;
    }
    return out;
}

Waveform downsample(const Waveform& w, double target_rate) {
    w.validate();
    if (!(target_rate > 0.0)) throw std::domain_error("downsample: target rate must be > 0");
    const double ratio = w.sample_rate / target_rate;
    const long m = std::lround(ratio);
    if (m < 1 || std::abs(ratio - static_cast<double>(m)) > 1e-9)
        throw std::domain_error("downsample: rate ratio must be a positive integer");
    Waveform out;
    out.sample_rate = target_rate;
    out.t0 = w.t0;
    out.samples.reserve(w.samples.size() / static_cast<std::size_t>(m) + 1);
    for (std::size_t i = 0; i < w.samples.size(); i += static_cast<std::size_t>(m))
        out.samples.push_back(w.samples[i]);
    return out;
}

}  // namespace cvqkd
