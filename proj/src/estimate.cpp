#include "cvqkd/estimate.hpp"

#include <cmath>
#include <stdexcept>

namespace cvqkd {

namespace {

struct QuadFit {
    double slope;
    double resid_var;
    double alice_var;
};

QuadFit fit_quadrature(const std::vector<SymbolRecord>& recs, bool x_quad) {
    double saa = 0.0, sab = 0.0;
    for (const SymbolRecord& r : recs) {
        const double a = x_quad ? r.alice_x : r.alice_p;
        const double b = x_quad ? r.bob_x : r.bob_p;
        saa += a * a;
        sab += a * b;
    }
    const double n = static_cast<double>(recs.size());
    const double slope = saa > 0.0 ? sab / saa : 0.0;
    double rss = 0.0;
    for (const SymbolRecord& r : recs) {
        const double a = x_quad ? r.alice_x : r.alice_p;
        const double b = x_quad ? r.bob_x : r.bob_p;
        const double e = b - slope * a;
        rss += e * e;
    }
    return {slope, rss / (n - 1.0), saa / n};
}

}  // namespace

EstimationResult estimate_channel(const std::vector<SymbolRecord>& records,
                                  double v_a, double eta) {
    if (records.size() < 1000)
        throw std::domain_error("estimate_channel: need at least 1000 records");
    if (!(eta > 0.0 && eta <= 1.0))
        throw std::domain_error("estimate_channel: eta must be in (0, 1]");
    if (!(v_a > 0.0)) throw std::domain_error("estimate_channel: v_a must be > 0");

    const QuadFit fx = fit_quadrature(records, true);
    const QuadFit fp = fit_quadrature(records, false);

    // the model is quadrature-symmetric; pool both fits
    double saa = 0.0, sab = 0.0;
    for (const SymbolRecord& r : records) {
        saa += r.alice_x * r.alice_x + r.alice_p * r.alice_p;
        sab += r.alice_x * r.bob_x + r.alice_p * r.bob_p;
    }
    const double g = saa > 0.0 ? sab / saa : 0.0;
    if (!std::isfinite(g) || std::abs(g) < 1e-6) throw std::runtime_error("channel opaque");

    double rss = 0.0;
    for (const SymbolRecord& r : records) {
        const double ex = r.bob_x - g * r.alice_x;
        const double ep = r.bob_p - g * r.alice_p;
        rss += ex * ex + ep * ep;
    }
    const double n_eff = 2.0 * static_cast<double>(records.size());
    const double r2 = rss / (n_eff - 1.0);

    const double gain_sq = g * g;
    const double chi_t = r2 / gain_sq - 1.0;

    // delta-method standard errors: var(r2) ~ 2 r2^2 / n, var(g) ~ r2 / (n Va)
    const double va_emp = saa / n_eff;
    const double var_r2 = 2.0 * r2 * r2 / n_eff;
    const double var_g = r2 / (n_eff * va_emp);
    const double var_chi =
        var_r2 / (gain_sq * gain_sq) +
        4.0 * r2 * r2 * var_g / (gain_sq * gain_sq * gain_sq);
    const double sd_chi = std::sqrt(var_chi);
    const double var_gsq = 4.0 * gain_sq * var_g;
    const double sd_gsq = std::sqrt(var_gsq);

    const double snr = gain_sq * va_emp / r2;
    const double i_ab = 0.5 * std::log2(1.0 + fx.slope * fx.slope * fx.alice_var / fx.resid_var) +
                        0.5 * std::log2(1.0 + fp.slope * fp.slope * fp.alice_var / fp.resid_var);
    // d/dSNR of log2(1+SNR) per quadrature, SNR error dominated by the slope
    const double var_snr = snr * snr * (var_g / gain_sq * 4.0 + var_r2 / (r2 * r2));
    const double sd_iab = std::sqrt(var_snr) / ((1.0 + snr) * std::numbers::ln2);

    EstimationResult out{};
    out.gain_sq = gain_sq;
    out.chi_t_hat = chi_t;
    out.t_hat = 2.0 * gain_sq / eta;
    out.snr_hat = snr;
    out.i_ab_hat = i_ab;
    out.n_used = records.size();
    out.gain_sq_ci = {gain_sq - 1.96 * sd_gsq, gain_sq + 1.96 * sd_gsq};
    out.chi_t_ci = {chi_t - 1.96 * sd_chi, chi_t + 1.96 * sd_chi};
    out.i_ab_ci = {i_ab - 1.96 * sd_iab, i_ab + 1.96 * sd_iab};
    out.slope_x = fx.slope;
    out.slope_p = fp.slope;
    out.resid_var_x = fx.resid_var;
    out.resid_var_p = fp.resid_var;
    return out;
}

double backout_detector_noise(double chi_t_hat, double t, double eps, double eta) {
    if (!(t > 0.0 && t <= 1.0)) throw std::domain_error("backout: t must be in (0, 1]");
    if (!(eta > 0.0 && eta <= 1.0)) throw std::domain_error("backout: eta must be in (0, 1]");
    const double chi_c = 1.0 / t - 1.0 + eps;
    const double upsilon = eta / 2.0 * ((chi_t_hat - chi_c) * t + 1.0) - 1.0;
    if (upsilon < -1e-3)
        throw std::runtime_error(
            "backout_detector_noise: inconsistent inputs, negative upsilon " +
            std::to_string(upsilon));
    return upsilon;
}

double empirical_mutual_information(const std::vector<SymbolRecord>& records) {
    if (records.size() < 1000)
        throw std::domain_error("empirical_mutual_information: need at least 1000 records");
    const QuadFit fx = fit_quadrature(records, true);
    const QuadFit fp = fit_quadrature(records, false);
    if (!(fx.resid_var > 0.0) || !(fp.resid_var > 0.0))
        throw std::runtime_error("empirical_mutual_information: non-positive residual variance");
    const double snr_x = fx.slope * fx.slope * fx.alice_var / fx.resid_var;
    const double snr_p = fp.slope * fp.slope * fp.alice_var / fp.resid_var;
    return 0.5 * std::log2(1.0 + snr_x) + 0.5 * std::log2(1.0 + snr_p);
}

RawKeyReport raw_key_bits(const std::vector<SymbolRecord>& records) {
    RawKeyReport out{};
    out.alice_bits.reserve(2 * records.size());
    out.bob_bits.reserve(2 * records.size());
    std::size_t mm_x = 0, mm_p = 0;
    for (const SymbolRecord& r : records) {
        const std::uint8_t ax = r.alice_x >= 0.0 ? 1 : 0;
        const std::uint8_t ap = r.alice_p >= 0.0 ? 1 : 0;
        const std::uint8_t bx = r.bob_x >= 0.0 ? 1 : 0;
        const std::uint8_t bp = r.bob_p >= 0.0 ? 1 : 0;
        out.alice_bits.push_back(ax);
        out.alice_bits.push_back(ap);
        out.bob_bits.push_back(bx);
        out.bob_bits.push_back(bp);
        mm_x += ax != bx;
        mm_p += ap != bp;
    }
    const double n = records.empty() ? 1.0 : static_cast<double>(records.size());
    out.mismatch_x = static_cast<double>(mm_x) / n;
    out.mismatch_p = static_cast<double>(mm_p) / n;
    out.mismatch = static_cast<double>(mm_x + mm_p) / (2.0 * n);
    return out;
}

}  // namespace cvqkd
