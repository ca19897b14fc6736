#pragma once

// Four-state (QPSK) coherent constellation quantities. The state set is
// alpha * e^{i(2k+1)pi/4}, k = 0..3, with modulation variance V_A = 2 alpha^2
// in shot-noise units (x = a + a^dag, vacuum variance 1).

#include <array>

namespace cvqkd {

struct Constellation {
    double alpha;  // real amplitude, > 0
    double v_a;    // modulation variance, = 2 alpha^2

    static Constellation from_variance(double v_a);
    static Constellation from_alpha(double alpha);
};

/// Weights of the four photon-number-mod-4 components of the averaged
/// constellation state. Non-negative and summing to 1.
struct XiCoefficients {
    std::array<double, 4> xi;

    double sum() const { return xi[0] + xi[1] + xi[2] + xi[3]; }
};

/// Closed-form xi_m for x = alpha^2:
///   xi_{0,2} = 1/2 e^{-x} (cosh x +- cos x)
///   xi_{1,3} = 1/2 e^{-x} (sinh x +- sin x)
/// Small arguments use the equivalent cancellation-free power series.
/// Throws std::domain_error for non-finite or non-positive input.
XiCoefficients xi_closed_form(double alpha_sq);

/// Brute-force xi_m = e^{-x} sum_n x^{4n+m}/(4n+m)! truncated at
/// 4n + m <= 4 n_max, accumulated by incremental term ratios.
/// Throws std::runtime_error if the truncated tail is not negligible.
XiCoefficients xi_series_oracle(double alpha_sq, int n_max);

/// Correlation of the discrete-modulation two-mode state:
///   Z = 2 alpha^2 (xi_0^{3/2} xi_1^{-1/2} + xi_1^{3/2} xi_2^{-1/2}
///       + xi_2^{3/2} xi_3^{-1/2} + xi_3^{3/2} xi_0^{-1/2}),
/// evaluated from xi_closed_form(v_a / 2). Ratios switch to log space
/// when any xi underflows toward zero. 0 < Z < z_epr(v_a).
double correlation_z(double v_a);

/// EPR correlation of the Gaussian-modulation reference: sqrt(V_A^2 + 2 V_A).
double z_epr(double v_a);

}  // namespace cvqkd
