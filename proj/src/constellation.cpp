#include "cvqkd/constellation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cvqkd {

namespace {

void check_alpha_sq(double alpha_sq) {
    if (!std::isfinite(alpha_sq) || alpha_sq <= 0.0)
        throw std::domain_error("alpha_sq must be finite and > 0, got " +
                                std::to_string(alpha_sq));
}

// xi_m via the 4-periodic factorial series
//   xi_m = e^{-x} sum_n x^{4n+m}/(4n+m)!,
// which is exactly the closed form with cosh/cos and sinh/sin expanded.
// Free of the cosh-cos / sinh-sin cancellation that loses precision for
// small x in the closed form.
XiCoefficients xi_small_series(double x) {
    const double ex = std::exp(-x);
    XiCoefficients out{};
    for (int m = 0; m < 4; ++m) {
        double term = 1.0;
        for (int j = 1; j <= m; ++j) term *= x / j;
        double sum = term;
        int k = m;
        while (true) {
            term *= x / (k + 1) * x / (k + 2) * x / (k + 3) * x / (k + 4);
            k += 4;
            sum += term;
            if (term < sum * 1e-18 || k > 200) break;
        }
        out.xi[m] = ex * sum;
    }
    return out;
}

}  // namespace

Constellation Constellation::from_variance(double v_a) {
    check_alpha_sq(v_a / 2.0);
    return {std::sqrt(v_a / 2.0), v_a};
}

Constellation Constellation::from_alpha(double alpha) {
    check_alpha_sq(alpha * alpha);
    return {alpha, 2.0 * alpha * alpha};
}

XiCoefficients xi_closed_form(double alpha_sq) {
    check_alpha_sq(alpha_sq);
    const double x = alpha_sq;
    // Below this the trig/hyperbolic differences lose more digits than the
    // series costs terms.
    if (x < 0.25) return xi_small_series(x);
    const double ex = std::exp(-x);
    const double ch = std::cosh(x), sh = std::sinh(x);
    const double c = std::cos(x), s = std::sin(x);
    return {{0.5 * ex * (ch + c), 0.5 * ex * (sh + s),
             0.5 * ex * (ch - c), 0.5 * ex * (sh - s)}};
}

XiCoefficients xi_series_oracle(double alpha_sq, int n_max) {
    check_alpha_sq(alpha_sq);
    if (n_max < 10) throw std::domain_error("xi_series_oracle: n_max must be >= 10");
    const double x = alpha_sq;
    const double ex = std::exp(-x);
    XiCoefficients out{};
    for (int m = 0; m < 4; ++m) {
        // term = x^{4n+m}/(4n+m)! built incrementally to avoid factorial
        // overflow; x <= ~40 keeps every term finite this way.
        double term = 1.0;
        for (int j = 1; j <= m; ++j) term *= x / j;
        double sum = term;
        double prev = term;
        int k = m;
        bool decreasing = false;
        for (int n = 1; n <= n_max; ++n) {
            term *= x / (k + 1) * x / (k + 2) * x / (k + 3) * x / (k + 4);
            k += 4;
            sum += term;
            if (term < prev) decreasing = true;
            prev = term;
        }
        if (!decreasing || term > sum * 1e-13)
            throw std::runtime_error(
                "xi_series_oracle: truncated series has not converged at n_max=" +
                std::to_string(n_max) + " for alpha_sq=" + std::to_string(x));
        out.xi[m] = ex * sum;
    }
    return out;
}

double correlation_z(double v_a) {
    const double x = v_a / 2.0;
    const XiCoefficients w = xi_closed_form(x);
    double min_xi = w.xi[0];
    for (double v : w.xi) min_xi = std::min(min_xi, v);

    double sum = 0.0;
    if (min_xi < 1e-30) {
        for (int i = 0; i < 4; ++i)
            sum += std::exp(1.5 * std::log(w.xi[i]) - 0.5 * std::log(w.xi[(i + 1) % 4]));
    } else {
        for (int i = 0; i < 4; ++i)
            sum += w.xi[i] * std::sqrt(w.xi[i] / w.xi[(i + 1) % 4]);
    }
    return 2.0 * x * sum;
}

double z_epr(double v_a) {
    if (!std::isfinite(v_a) || v_a < 0.0)
        throw std::domain_error("z_epr: v_a must be finite and >= 0");
    return std::sqrt(v_a * (v_a + 2.0));
}

}  // namespace cvqkd
