#include <cmath>
#include <numbers>
#include <random>

#include "cvqkd/dsp.hpp"
#include "doctest.h"
#include "dsp_corpus.hpp"
#include "oracles.hpp"

using namespace cvqkd;

namespace {

constexpr double kPi = std::numbers::pi;

// partial tiling sum sum_{i=-K}^{K+5} S_i in units of tau, via the kernel
double tiling_sum(int K) {
    const SincKernel k = sinc_coefficients(1.0, -K, K + 5);
    double acc = 0.0;
    for (int i = -K; i <= K + 5; ++i) acc += k.at(i);
    return acc;
}

}  // namespace

TEST_CASE("sinc kernel values against an independent quadrature") {
    const double tau = 20e-9;
    const SincKernel k = sinc_coefficients(tau, -3, 8);
    for (int i = -3; i <= 8; ++i) {
        const double ref =
            tau * oracle::integrate_gl([](double u) { return sinc(u); },
                                       -static_cast<double>(i), 5.0 - i);
        CHECK(std::abs(k.at(i) - ref) < 1e-12 * tau);
    }
    // frozen spot values (tau = 1)
    const SincKernel k1 = sinc_coefficients(1.0, 0, 8);
    CHECK(k1.at(0) == doctest::Approx(0.520107164191).epsilon(1e-9));
    CHECK(k1.at(1) == doctest::Approx(1.064459542120).epsilon(1e-9));
    CHECK(k1.at(2) == doctest::Approx(0.984504904408).epsilon(1e-9));
    CHECK(k1.at(6) == doctest::Approx(-0.106284654738).epsilon(1e-9));
}

TEST_CASE("kernel symmetry about i = 2.5 and tail decay") {
    const double tau = 20e-9;
    const SincKernel k = sinc_coefficients(tau, -10, 15);
    for (int i = -10; i <= 15; ++i)
        CHECK(std::abs(k.at(i) - k.at(5 - i)) < 1e-12 * tau);
    CHECK(std::abs(k.at(8)) < std::abs(k.at(6)));
    CHECK(std::abs(k.at(6)) < std::abs(k.at(5)));
    CHECK_THROWS_AS(sinc_coefficients(0.0, 0, 5), std::domain_error);
    CHECK_THROWS_AS(sinc_coefficients(1.0, 1, 5), std::domain_error);
}

TEST_CASE("window tiling sum converges to 5 tau") {
    // the raw partial sum is an alternating O(1/K) sequence; the limit is
    // extracted by iterated pairwise averaging of the last partial sums
    std::vector<double> seq;
    for (int K = 188; K <= 200; ++K) seq.push_back(tiling_sum(K));
    CHECK(std::abs(seq.back() - 5.0) < 2e-3);   // raw value at K = 200
    while (seq.size() > 1) {
        for (std::size_t i = 0; i + 1 < seq.size(); ++i) seq[i] = 0.5 * (seq[i] + seq[i + 1]);
        seq.pop_back();
    }
    CHECK(std::abs(seq[0] - 5.0) < 1e-6);
}

TEST_CASE("reconstruction is exact at sample times") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    Waveform w{5e7, 0.0, {}};
    for (int i = 0; i < 64; ++i) w.samples.push_back(g(rng));
    for (int i = 0; i < 64; ++i)
        CHECK(reconstruct(w, i / 5e7) == doctest::Approx(w.samples[static_cast<std::size_t>(i)])
                                             .epsilon(1e-12));
}

TEST_CASE("reconstruction of a 10 MHz tone at 50 MS/s") {
    const double fs = 5e7, f = 1e7;
    const std::size_t n = 1 << 19;
    Waveform w{fs, 0.0, {}};
    w.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        w.samples[i] = std::cos(2.0 * kPi * f * static_cast<double>(i) / fs + 0.3);
    const double mid = static_cast<double>(n / 2);
    for (const double off : {0.37, 0.5, 0.71}) {
        const double t = (mid + off) / fs;
        const double expect = std::cos(2.0 * kPi * f * t + 0.3);
        CHECK(std::abs(reconstruct(w, t) - expect) < 1e-6);
    }
}

TEST_CASE("reconstruction reproduces a constant mid-span") {
    const std::size_t n = 40001;
    Waveform w{1.0, 0.0, std::vector<double>(n, 1.0)};
    CHECK(std::abs(reconstruct(w, (n - 1) / 2.0 + 0.5) - 1.0) < 1e-9);
    bool warn = false;
    reconstruct(w, -11.0, &warn);
    CHECK(warn);
    reconstruct(w, 5.0, &warn);
    CHECK_FALSE(warn);
}

TEST_CASE("recover_symbols basics") {
    const double fs = 5e7, tau = 1.0 / fs;
    const SincKernel kernel = sinc_coefficients(tau, 0, 5);

    Waveform zero{fs, 0.0, std::vector<double>(52, 0.0)};
    const RecoveredSymbols rz = recover_symbols(zero, 5 * tau, kernel);
    CHECK(rz.partial_tail_samples == 2);
    CHECK(rz.dropped_tail >= 1);
    for (double v : rz.values) CHECK(v == 0.0);

    // constant stream: every full symbol recovers c * sum(S_i)
    Waveform cw{fs, 0.0, std::vector<double>(51, 2.0)};
    const RecoveredSymbols rc = recover_symbols(cw, 5 * tau, kernel);
    double ssum = 0.0;
    for (int i = 0; i <= 5; ++i) ssum += kernel.at(i);
    REQUIRE(rc.values.size() == 10);
    for (double v : rc.values) CHECK(v == doctest::Approx(2.0 * ssum).epsilon(1e-12));

    CHECK_THROWS_AS(recover_symbols(cw, 4 * tau, kernel), std::domain_error);
    CHECK_THROWS_AS(recover_symbols(cw, 5 * tau, kernel, {1, 5}), std::domain_error);
    CHECK_THROWS_AS(recover_symbols(cw, 5 * tau, kernel, {-1, 6}), std::domain_error);
}

TEST_CASE("truncated recovery matches the integral oracle within the "
          "widened-window truncation bound") {
    const auto sigs = corpus::make_corpus(1, 99);
    const corpus::Signal& sig = sigs[0];
    const SincKernel k6 = sinc_coefficients(1.0, 0, 5);
    const SincKernel kw = sinc_coefficients(1.0, -20, 25);

    double sum_e6 = 0.0, sum_ew = 0.0;
    for (int n = corpus::kEvalFirst; n <= corpus::kEvalLast; ++n) {
        const double x6 = corpus::recover_one(sig, k6, n, 0, 5);
        const double xw = corpus::recover_one(sig, kw, n, -20, 25);
        // quadrature oracle on the reconstructed waveform
        const Waveform& w = sig.wave;
        const double iq = oracle::integrate_gl(
            [&](double t) { return reconstruct(w, t); }, 5.0 * (n - 1), 5.0 * n);
        const double bound = std::abs(x6 - xw) + 1e-6;
        CHECK(std::abs(x6 - iq) < 1.5 * bound);
        sum_e6 += std::abs(x6 - iq);
        sum_ew += std::abs(xw - iq);
    }
    CHECK(sum_ew < sum_e6);  // the widened window sits closer to the integral
}

TEST_CASE("recovery error shrinks monotonically as the window widens") {
    const auto sigs = corpus::make_corpus(30, 7);
    const SincKernel k = sinc_coefficients(1.0, -10, 15);
    const double e6 = corpus::median_recovery_error(sigs, k, 0, 5);
    const double e10 = corpus::median_recovery_error(sigs, k, -2, 7);
    const double e16 = corpus::median_recovery_error(sigs, k, -5, 10);
    const double e26 = corpus::median_recovery_error(sigs, k, -10, 15);
    CHECK(e6 > e10);
    CHECK(e10 > e16);
    CHECK(e16 > e26);
}

TEST_CASE("printed 0..5 window beats every 5-coefficient window") {
    const auto sigs = corpus::make_corpus(30, 21);
    const SincKernel k = sinc_coefficients(1.0, -3, 8);
    const double base = corpus::median_recovery_error(sigs, k, 0, 5);
    for (int j = -2; j <= 3; ++j)
        CHECK(base < corpus::median_recovery_error(sigs, k, j, j + 4));
}

TEST_CASE("mix and filter: carrier tone becomes half-amplitude DC") {
    const double fs = 4e8, fc = 5e7;
    const std::size_t n = 4000;
    Waveform w{fs, 0.0, {}};
    w.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        w.samples[i] = 0.8 * std::cos(2.0 * kPi * fc * static_cast<double>(i) / fs);
    const Waveform y = mix_and_filter(w, fc, 0.0, 2.5e7);
    for (std::size_t i = n / 2 - 50; i < n / 2 + 50; ++i)
        CHECK(y.samples[i] == doctest::Approx(0.4).epsilon(2e-3));
}

TEST_CASE("mix and filter: stopband rejection at carrier + 60 MHz") {
    const double fs = 4e8, fc = 5e7;
    const std::size_t n = 8000;
    Waveform w{fs, 0.0, {}};
    w.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        w.samples[i] = std::cos(2.0 * kPi * (fc + 6e7) * static_cast<double>(i) / fs);
    const Waveform y = mix_and_filter(w, fc, 0.0, 2.5e7);
    double rms = 0.0;
    std::size_t cnt = 0;
    for (std::size_t i = 1000; i + 1000 < n; ++i, ++cnt) rms += y.samples[i] * y.samples[i];
    rms = std::sqrt(rms / static_cast<double>(cnt));
    CHECK(rms < 1e-3);  // < -60 dB of the unit input tone

    // the filter's own response confirms the design
    const auto taps = design_lowpass_fir(129, 2.5e7, fs);
    CHECK(fir_magnitude_response(taps, 6e7, fs) < 1e-3);
    CHECK(fir_magnitude_response(taps, 5e6, fs) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("mix and filter: zero input, linearity, validation") {
    const double fs = 4e8;
    Waveform z{fs, 0.0, std::vector<double>(512, 0.0)};
    for (double v : mix_and_filter(z, 5e7, 0.0, 2.5e7).samples) CHECK(v == 0.0);

    std::mt19937_64 rng(17);
    std::normal_distribution<double> g(0.0, 1.0);
    Waveform w1{fs, 0.0, {}}, w2{fs, 0.0, {}};
    for (int i = 0; i < 600; ++i) {
        w1.samples.push_back(g(rng));
        w2.samples.push_back(g(rng));
    }
    Waveform combo{fs, 0.0, {}};
    for (int i = 0; i < 600; ++i)
        combo.samples.push_back(1.7 * w1.samples[static_cast<std::size_t>(i)] -
                                0.4 * w2.samples[static_cast<std::size_t>(i)]);
    const Waveform y1 = mix_and_filter(w1, 5e7, 0.1, 2.5e7);
    const Waveform y2 = mix_and_filter(w2, 5e7, 0.1, 2.5e7);
    const Waveform yc = mix_and_filter(combo, 5e7, 0.1, 2.5e7);
    for (std::size_t i = 0; i < yc.samples.size(); ++i)
        CHECK(std::abs(yc.samples[i] - (1.7 * y1.samples[i] - 0.4 * y2.samples[i])) < 1e-9);

    CHECK_THROWS_AS(mix_and_filter(w1, 3e8, 0.0, 2.5e7), std::domain_error);
    CHECK_THROWS_AS(mix_and_filter(w1, 5e7, 0.0, 2.1e8), std::domain_error);
}

TEST_CASE("downsample") {
    Waveform w{4e8, 0.0, {}};
    const double f = 1.1e7;
    for (int i = 0; i < 800; ++i)
        w.samples.push_back(std::sin(2.0 * kPi * f * i / 4e8));
    const Waveform d = downsample(w, 5e7);
    REQUIRE(d.samples.size() == 100);
    for (std::size_t i = 0; i < d.samples.size(); ++i) {
        CHECK(d.samples[i] == w.samples[8 * i]);
        CHECK(d.samples[i] ==
              doctest::Approx(std::sin(2.0 * kPi * f * static_cast<double>(i) / 5e7))
                  .epsilon(1e-9));
    }
    const Waveform same = downsample(w, 4e8);
    CHECK(same.samples.size() == w.samples.size());
    CHECK_THROWS_AS(downsample(w, 3e8), std::domain_error);
}
