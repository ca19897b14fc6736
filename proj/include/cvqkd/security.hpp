#pragma once

// Collective-attack lower bound on the secret key rate of the four-state
// protocol with a noisy source and a realistic (trusted-noise) heterodyne
// detector, via the equivalent Gaussian channel.
//
// All variances are in shot-noise units. Entropies are in bits.

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace cvqkd {

struct ProtocolParams {
    double v_a = 0.29;          // modulation variance, 2 alpha^2
    double beta = 0.8;          // reconciliation efficiency in (0, 1]
    double symbol_rate = 1e7;   // encoding rate, symbols/s
};

struct ChannelParams {
    double t0 = 1.0;    // physical transmittance in (0, 1]
    double eps0 = 0.0;  // channel excess noise, >= 0

    void validate() const;
};

struct SourceNoise {
    double delta_eps = 0.0;  // source/modulation excess noise variance, >= 0

    void validate() const;
};

struct DetectorParams {
    double eta = 1.0;      // detection efficiency in (0, 1]
    double upsilon = 0.0;  // electronic noise, >= 0

    void validate() const;
};

/// Gaussian-modulation channel (T, eps) whose covariance matrix equals the
/// discrete-modulation one.
struct EquivalentChannel {
    double t;
    double eps;
};

struct NoiseBudget {
    double chi_c;  // channel-added noise, 1/T - 1 + eps
    double chi_d;  // heterodyne-detector noise, 2(1+upsilon)/eta - 1
    double chi_t;  // total, chi_c + chi_d / T
};

/// Two-mode covariance in the standard block form
///   [ a I2      c sigma_z ]
///   [ c sigma_z b I2      ].
struct TwoModeCov {
    double a;
    double b;
    double c;

    double det() const { return (a * b - c * c) * (a * b - c * c); }
    bool physical(double tol = 1e-9) const;
};

enum class Convention : std::uint8_t { single, doubled };
enum class CondMode : std::uint8_t { oracle, closed_form, paper_literal };

std::string to_string(Convention c);
Convention convention_from_string(const std::string& s);

struct SecurityReport {
    double i_ab;                  // mutual information, bits/symbol (convention-scaled)
    std::array<double, 4> lambda; // symplectic eigenvalues l1, l2, l3, l4
    double s_ab;                  // S(rho_AB) = g(l1) + g(l2), bits
    double s_cond;                // S(rho^b) = g(l3) + g(l4), bits
    double holevo;                // chi(b:EF), bits/symbol (convention-scaled)
    double key_rate_per_symbol;   // beta * i_ab - holevo
    double key_rate_per_second;
    Convention convention;
    bool positive;                // key_rate_per_symbol > 0
    NoiseBudget budget;
    EquivalentChannel equivalent;
};

/// Variance N of the thermal state that models electronic noise behind the
/// detector's beam splitter: N = 1 + 2 upsilon / (1 - eta).
/// Throws std::domain_error at eta = 1 (thermal model undefined there);
/// callers take the direct additive-noise path instead.
double detector_thermal_variance(const DetectorParams& det);

/// T = T0 Z^2/Z_EPR^2, eps = (Z_EPR^2/Z^2)(V_A + eps0 + delta_eps) - V_A.
/// Satisfies T (V_A + eps) = T0 (V_A + eps0 + delta_eps) identically.
EquivalentChannel equivalent_gaussian_channel(double v_a, const ChannelParams& ch,
                                              const SourceNoise& src);

NoiseBudget noise_budget(const EquivalentChannel& equiv, const DetectorParams& det);

/// log2((V + chi_t)/(chi_t + 1)) with V = v_a + 1; doubled convention
/// returns twice that.
double mutual_information(double v_a, double chi_t,
                          Convention convention = Convention::single);

/// a = V_A + 1, b = T(V_A + eps) + 1, c = sqrt(T) Z_EPR(V_A).
/// Throws std::runtime_error if the result is unphysical.
TwoModeCov covariance_ab(double v_a, const EquivalentChannel& equiv);

/// Closed-form symplectic eigenvalues of a TwoModeCov:
///   lambda_{1,2} = sqrt((A +- sqrt(A^2 - 4B))/2),
/// A = a^2 + b^2 - 2c^2, B = (ab - c^2)^2. Returned (l1, l2), l1 >= l2.
std::pair<double, double> channel_symplectic_eigenvalues(const TwoModeCov& cov);

/// Generic symplectic spectrum of an even-dimensional covariance matrix:
/// moduli of the eigenvalues of i Omega gamma, sorted descending, one per
/// mode pair.
std::vector<double> symplectic_spectrum(const Eigen::MatrixXd& gamma);

/// Full conditional spectrum of modes (A, G, H) after the detector beam
/// splitter (transmission eta, EPR purification of the thermal state of
/// variance N on the idle port) and heterodyne conditioning on B'.
/// Three values, sorted descending; the smallest is 1 up to numerics.
/// At eta = 1 the purification degenerates; the additive-noise path
/// conditions mode A directly on a heterodyne with electronic noise.
std::array<double, 3> conditional_spectrum_oracle(const TwoModeCov& cov,
                                                  const DetectorParams& det);

/// (lambda_3, lambda_4) of the conditioned state.
///  - CondMode::oracle       covariance-conditioning construction (default)
///  - CondMode::closed_form  corrected heterodyne C, D closed form
///  - CondMode::paper_literal the as-published C (missing the 2 chi_d b term);
///    throws std::domain_error("literal formula unphysical here") when C^2-4D < 0.
std::pair<double, double> conditional_symplectic_eigenvalues(
    const TwoModeCov& cov, const DetectorParams& det,
    CondMode mode = CondMode::oracle);

/// g(x) = (x+1)/2 log2((x+1)/2) - (x-1)/2 log2((x-1)/2); g(1) = 0.
/// Inputs in [1 - 1e-6, 1) clamp to 1; below that is a domain error.
double entropy_g(double x);

/// Composes the full chain: equivalent channel -> noise budget -> I(a:b)
/// -> symplectic eigenvalues (corrected closed form) -> entropies -> K.
/// Negative rates are returned as-is with positive = false.
SecurityReport key_rate(const ProtocolParams& params, const ChannelParams& ch,
                        const SourceNoise& src, const DetectorParams& det,
                        Convention convention = Convention::single);

}  // namespace cvqkd
