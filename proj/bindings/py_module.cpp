// Python bindings for the main operations: constellation quantities, the
// key-rate chain, modulation-variance optimization, the sinc-recovery
// kernel, and the Monte Carlo simulator / estimator pair.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cvqkd/constellation.hpp"
#include "cvqkd/estimate.hpp"
#include "cvqkd/optimize.hpp"
#include "cvqkd/security.hpp"
#include "cvqkd/simulate.hpp"
#include "cvqkd/version.hpp"

namespace py = pybind11;
using namespace cvqkd;

namespace {

py::dict report_dict(const SecurityReport& r) {
    py::dict d;
    d["i_ab"] = r.i_ab;
    d["lambda"] = std::vector<double>{r.lambda[0], r.lambda[1], r.lambda[2], r.lambda[3]};
    d["s_ab"] = r.s_ab;
    d["s_cond"] = r.s_cond;
    d["holevo"] = r.holevo;
    d["key_rate_per_symbol"] = r.key_rate_per_symbol;
    d["key_rate_per_second"] = r.key_rate_per_second;
    d["convention"] = to_string(r.convention);
    d["positive"] = r.positive;
    d["chi_c"] = r.budget.chi_c;
    d["chi_d"] = r.budget.chi_d;
    d["chi_t"] = r.budget.chi_t;
    d["equivalent_t"] = r.equivalent.t;
    d["equivalent_eps"] = r.equivalent.eps;
    return d;
}

RunConfig make_runconfig(std::uint64_t n_symbols, std::uint64_t seed, double v_a,
                         double t0, double eps0, double delta_eps, double eta,
                         double upsilon) {
    RunConfig cfg;
    cfg.n_symbols = n_symbols;
    cfg.seed = seed;
    cfg.protocol = {v_a, 0.8, 1e7};
    cfg.channel = {t0, eps0};
    cfg.source = {delta_eps};
    cfg.detector = {eta, upsilon};
    return cfg;
}

py::dict records_dict(const std::vector<SymbolRecord>& recs) {
    std::vector<int> k;
    std::vector<double> ax, ap, bx, bp;
    k.reserve(recs.size());
    for (const auto& r : recs) {
        k.push_back(r.k);
        ax.push_back(r.alice_x);
        ap.push_back(r.alice_p);
        bx.push_back(r.bob_x);
        bp.push_back(r.bob_p);
    }
    py::dict d;
    d["k"] = std::move(k);
    d["alice_x"] = std::move(ax);
    d["alice_p"] = std::move(ap);
    d["bob_x"] = std::move(bx);
    d["bob_p"] = std::move(bp);
    return d;
}

std::vector<SymbolRecord> records_from_arrays(const std::vector<double>& ax,
                                              const std::vector<double>& ap,
                                              const std::vector<double>& bx,
                                              const std::vector<double>& bp) {
    if (ax.size() != ap.size() || ax.size() != bx.size() || ax.size() != bp.size())
        throw std::invalid_argument("record arrays must have equal length");
    std::vector<SymbolRecord> recs;
    recs.reserve(ax.size());
    for (std::size_t i = 0; i < ax.size(); ++i)
        recs.push_back({i, 0, ax[i], ap[i], bx[i], bp[i]});
    return recs;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "four-state CV-QKD key-rate toolkit";
#ifdef CVQKD_VERSION_INFO
    m.attr("__version__") = CVQKD_VERSION_INFO;
#else
    m.attr("__version__") = kVersion;
#endif

    m.def("xi_closed_form",
          [](double alpha_sq) {
              const XiCoefficients w = xi_closed_form(alpha_sq);
              return std::vector<double>(w.xi.begin(), w.xi.end());
          },
          py::arg("alpha_sq"));
    m.def("xi_series_oracle",
          [](double alpha_sq, int n_max) {
              const XiCoefficients w = xi_series_oracle(alpha_sq, n_max);
              return std::vector<double>(w.xi.begin(), w.xi.end());
          },
          py::arg("alpha_sq"), py::arg("n_max") = 40);
    m.def("correlation_z", &correlation_z, py::arg("v_a"));
    m.def("z_epr", &z_epr, py::arg("v_a"));
    m.def("entropy_g", &entropy_g, py::arg("x"));

    m.def("key_rate",
          [](double v_a, double t0, double eps0, double delta_eps, double eta,
             double upsilon, double beta, double symbol_rate, const std::string& conv) {
              return report_dict(key_rate({v_a, beta, symbol_rate}, {t0, eps0},
                                          {delta_eps}, {eta, upsilon},
                                          convention_from_string(conv)));
          },
          py::arg("v_a"), py::arg("t0"), py::arg("eps0") = 0.0,
          py::arg("delta_eps") = 0.0, py::arg("eta") = 1.0, py::arg("upsilon") = 0.0,
          py::arg("beta") = 0.8, py::arg("symbol_rate") = 1e7,
          py::arg("convention") = "single");

    m.def("optimal_modulation",
          [](double t0, double eps0, double delta_eps, double eta, double upsilon,
             double beta, double lo, double hi, double tol, const std::string& conv) {
              const Optimum o =
                  optimal_modulation({t0, eps0}, {delta_eps}, {eta, upsilon}, beta, lo,
                                     hi, tol, convention_from_string(conv));
              py::dict d;
              d["v_a_star"] = o.v_a_star;
              d["key_rate_star"] = o.key_rate_star;
              d["iterations"] = o.iterations;
              d["bracket"] = std::pair<double, double>{o.bracket_lo, o.bracket_hi};
              d["positive"] = o.positive;
              d["report"] = report_dict(o.report);
              return d;
          },
          py::arg("t0"), py::arg("eps0") = 0.0, py::arg("delta_eps") = 0.0,
          py::arg("eta") = 1.0, py::arg("upsilon") = 0.0, py::arg("beta") = 0.8,
          py::arg("lo") = 1e-3, py::arg("hi") = 2.0, py::arg("tol") = 1e-4,
          py::arg("convention") = "single");

    m.def("sinc_coefficients",
          [](double tau, int i_min, int i_max) {
              const SincKernel k = sinc_coefficients(tau, i_min, i_max);
              return k.s;
          },
          py::arg("tau"), py::arg("i_min") = 0, py::arg("i_max") = 5);

    m.def("symbol_level_run",
          [](std::uint64_t n_symbols, std::uint64_t seed, double v_a, double t0,
             double eps0, double delta_eps, double eta, double upsilon) {
              return records_dict(symbol_level_run(make_runconfig(
                  n_symbols, seed, v_a, t0, eps0, delta_eps, eta, upsilon)));
          },
          py::arg("n_symbols"), py::arg("seed"), py::arg("v_a"), py::arg("t0") = 1.0,
          py::arg("eps0") = 0.0, py::arg("delta_eps") = 0.0, py::arg("eta") = 1.0,
          py::arg("upsilon") = 0.0);

    m.def("waveform_level_run",
          [](std::uint64_t n_symbols, std::uint64_t seed, double v_a, double t0,
             double eps0, double delta_eps, double eta, double upsilon,
             std::uint64_t n_calibration, double phase_noise_rms, double amp_noise_rms) {
              RunConfig cfg = make_runconfig(n_symbols, seed, v_a, t0, eps0, delta_eps,
                                             eta, upsilon);
              cfg.fidelity = Fidelity::waveform;
              cfg.n_calibration = n_calibration;
              cfg.phase_noise_rms = phase_noise_rms;
              cfg.amp_noise_rms = amp_noise_rms;
              const WaveformRunResult r = waveform_level_run(cfg);
              py::dict d = records_dict(r.records);
              d["signal_gain"] = r.diagnostics.calibration.signal_gain;
              d["noise_gain"] = r.diagnostics.calibration.noise_gain;
              d["scale"] = r.diagnostics.calibration.scale;
              d["max_mod_depth"] = r.diagnostics.max_mod_depth;
              return d;
          },
          py::arg("n_symbols"), py::arg("seed"), py::arg("v_a"), py::arg("t0") = 1.0,
          py::arg("eps0") = 0.0, py::arg("delta_eps") = 0.0, py::arg("eta") = 1.0,
          py::arg("upsilon") = 0.0, py::arg("n_calibration") = 20000,
          py::arg("phase_noise_rms") = 0.0, py::arg("amp_noise_rms") = 0.0);

    m.def("estimate_channel",
          [](const std::vector<double>& ax, const std::vector<double>& ap,
             const std::vector<double>& bx, const std::vector<double>& bp, double v_a,
             double eta) {
              const EstimationResult e =
                  estimate_channel(records_from_arrays(ax, ap, bx, bp), v_a, eta);
              py::dict d;
              d["gain_sq"] = e.gain_sq;
              d["chi_t_hat"] = e.chi_t_hat;
              d["t_hat"] = e.t_hat;
              d["snr_hat"] = e.snr_hat;
              d["i_ab_hat"] = e.i_ab_hat;
              d["n_used"] = e.n_used;
              d["chi_t_ci"] = std::pair<double, double>{e.chi_t_ci.lo, e.chi_t_ci.hi};
              return d;
          },
          py::arg("alice_x"), py::arg("alice_p"), py::arg("bob_x"), py::arg("bob_p"),
          py::arg("v_a"), py::arg("eta"));

    m.def("backout_detector_noise", &backout_detector_noise, py::arg("chi_t_hat"),
          py::arg("t"), py::arg("eps"), py::arg("eta"));

    m.def("empirical_mutual_information",
          [](const std::vector<double>& ax, const std::vector<double>& ap,
             const std::vector<double>& bx, const std::vector<double>& bp) {
              return empirical_mutual_information(records_from_arrays(ax, ap, bx, bp));
          },
          py::arg("alice_x"), py::arg("alice_p"), py::arg("bob_x"), py::arg("bob_p"));
}
