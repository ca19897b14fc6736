#include "cvqkd/security.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cvqkd/constellation.hpp"

namespace cvqkd {

namespace {

constexpr double kPhysTol = 1e-9;

double clamp_disc(double disc, const char* what) {
    if (disc < -kPhysTol)
        throw std::runtime_error(std::string(what) + ": discriminant negative beyond tolerance");
    return std::max(disc, 0.0);
}

// lambda_3 of the eta = 1 degenerate detector: electronic noise enters as
// classical noise on the heterodyne outcome, so mode A conditions to
//   nu = (a chi_d + |ab - c^2|) / (b + chi_d),  chi_d = 1 + 2 upsilon.
double eta_one_conditional(const TwoModeCov& cov, double upsilon) {
    const double chi_d = 1.0 + 2.0 * upsilon;
    const double sB = std::abs(cov.a * cov.b - cov.c * cov.c);
    return (cov.a * chi_d + sB) / (cov.b + chi_d);
}

std::pair<double, double> eigen_pair_from_cd(double c_big, double d_big, const char* what) {
    const double disc = clamp_disc(c_big * c_big - 4.0 * d_big, what);
    const double r = std::sqrt(disc);
    const double l3 = std::sqrt(std::max(0.5 * (c_big + r), 0.0));
    const double l4 = std::sqrt(std::max(0.5 * (c_big - r), 0.0));
    return {l3, l4};
}

}  // namespace

void ChannelParams::validate() const {
    if (!(t0 > 0.0 && t0 <= 1.0)) throw std::domain_error("channel t0 must be in (0, 1]");
    if (!(eps0 >= 0.0)) throw std::domain_error("channel eps0 must be >= 0");
}

void SourceNoise::validate() const {
    if (!(delta_eps >= 0.0)) throw std::domain_error("source delta_eps must be >= 0");
}

void DetectorParams::validate() const {
    if (!(eta > 0.0 && eta <= 1.0)) throw std::domain_error("detector eta must be in (0, 1]");
    if (!(upsilon >= 0.0)) throw std::domain_error("detector upsilon must be >= 0");
}

bool TwoModeCov::physical(double tol) const {
    if (a < 1.0 - tol || b < 1.0 - tol) return false;
    if (a * b - c * c < 1.0 - tol) return false;
    const double A = a * a + b * b - 2.0 * c * c;
    const double B = (a * b - c * c) * (a * b - c * c);
    const double disc = A * A - 4.0 * B;
    if (disc < -tol) return false;
    const double l2sq = 0.5 * (A - std::sqrt(std::max(disc, 0.0)));
    return l2sq >= 1.0 - tol;
}

std::string to_string(Convention c) {
    return c == Convention::single ? "single" : "doubled";
}

Convention convention_from_string(const std::string& s) {
    if (s == "single") return Convention::single;
    if (s == "doubled") return Convention::doubled;
    throw std::domain_error("unknown convention '" + s + "' (expected single|doubled)");
}

double detector_thermal_variance(const DetectorParams& det) {
    det.validate();
    if (det.eta >= 1.0)
        throw std::domain_error("thermal model undefined at eta = 1");
    return 1.0 + 2.0 * det.upsilon / (1.0 - det.eta);
}

EquivalentChannel equivalent_gaussian_channel(double v_a, const ChannelParams& ch,
                                              const SourceNoise& src) {
    if (!(v_a > 0.0)) throw std::domain_error("v_a must be > 0");
    ch.validate();
    src.validate();
    const double z = correlation_z(v_a);
    const double ze = z_epr(v_a);
    const double ratio_sq = (z / ze) * (z / ze);
    return {ch.t0 * ratio_sq, (v_a + ch.eps0 + src.delta_eps) / ratio_sq - v_a};
}

NoiseBudget noise_budget(const EquivalentChannel& equiv, const DetectorParams& det) {
    if (!(equiv.t > 0.0)) throw std::domain_error("equivalent transmittance must be > 0");
    det.validate();
    const double chi_c = 1.0 / equiv.t - 1.0 + equiv.eps;
    const double chi_d = 2.0 * (1.0 + det.upsilon) / det.eta - 1.0;
    return {chi_c, chi_d, chi_c + chi_d / equiv.t};
}

double mutual_information(double v_a, double chi_t, Convention convention) {
    if (!(v_a >= 0.0)) throw std::domain_error("v_a must be >= 0");
    if (!(chi_t >= 0.0)) throw std::domain_error("chi_t must be >= 0");
    const double base = std::log2((v_a + 1.0 + chi_t) / (chi_t + 1.0));
    return convention == Convention::doubled ? 2.0 * base : base;
}

TwoModeCov covariance_ab(double v_a, const EquivalentChannel& equiv) {
    TwoModeCov cov{v_a + 1.0, equiv.t * (v_a + equiv.eps) + 1.0,
                   std::sqrt(equiv.t) * z_epr(v_a)};
    if (cov.a * cov.b - cov.c * cov.c < 1.0 - kPhysTol)
        throw std::runtime_error("covariance_ab: unphysical state (ab - c^2 < 1)");
    return cov;
}

std::pair<double, double> channel_symplectic_eigenvalues(const TwoModeCov& cov) {
    const double A = cov.a * cov.a + cov.b * cov.b - 2.0 * cov.c * cov.c;
    const double B = (cov.a * cov.b - cov.c * cov.c) * (cov.a * cov.b - cov.c * cov.c);
    const double disc = clamp_disc(A * A - 4.0 * B, "channel_symplectic_eigenvalues");
    const double r = std::sqrt(disc);
    return {std::sqrt(0.5 * (A + r)), std::sqrt(std::max(0.5 * (A - r), 0.0))};
}

std::vector<double> symplectic_spectrum(const Eigen::MatrixXd& gamma) {
    const auto n = gamma.rows();
    if (n % 2 != 0 || gamma.cols() != n)
        throw std::domain_error("symplectic_spectrum: matrix must be 2n x 2n");
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n / 2; ++i) {
        omega(2 * i, 2 * i + 1) = 1.0;
        omega(2 * i + 1, 2 * i) = -1.0;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(omega * gamma, false);
    std::vector<double> mods(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        mods[static_cast<std::size_t>(i)] = std::abs(es.eigenvalues()(i));
    std::sort(mods.begin(), mods.end(), std::greater<>());
    // eigenvalues come in +-i nu pairs; keep one of each
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n / 2));
    for (std::size_t i = 0; i < mods.size(); i += 2) out.push_back(mods[i]);
    return out;
}

std::array<double, 3> conditional_spectrum_oracle(const TwoModeCov& cov,
                                                  const DetectorParams& det) {
    det.validate();
    if (det.eta >= 1.0) {
        return {eta_one_conditional(cov, det.upsilon), 1.0, 1.0};
    }
    const double N = detector_thermal_variance(det);
    const double zn = std::sqrt(std::max(N * N - 1.0, 0.0));
    const Eigen::Matrix2d I2 = Eigen::Matrix2d::Identity();
    const Eigen::Matrix2d sz = Eigen::Vector2d(1.0, -1.0).asDiagonal();

    // modes (A, B, G, H0); G-H0 is the EPR purification of the thermal state
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(8, 8);
    g.block<2, 2>(0, 0) = cov.a * I2;
    g.block<2, 2>(2, 2) = cov.b * I2;
    g.block<2, 2>(0, 2) = cov.c * sz;
    g.block<2, 2>(2, 0) = cov.c * sz;
    g.block<2, 2>(4, 4) = N * I2;
    g.block<2, 2>(6, 6) = N * I2;
    g.block<2, 2>(4, 6) = zn * sz;
    g.block<2, 2>(6, 4) = zn * sz;

    // beam splitter on (B, H0): B' = sqrt(eta) B + sqrt(1-eta) H0
    const double t = std::sqrt(det.eta), r = std::sqrt(1.0 - det.eta);
    Eigen::MatrixXd S = Eigen::MatrixXd::Identity(8, 8);
    S.block<2, 2>(2, 2) = t * I2;
    S.block<2, 2>(2, 6) = r * I2;
    S.block<2, 2>(6, 2) = -r * I2;
    S.block<2, 2>(6, 6) = t * I2;
    g = S * g * S.transpose();

    // heterodyne conditioning on B' (rows/cols 2..3):
    // gamma_cond = gamma_AGH - C (gamma_B' + I)^{-1} C^T
    const std::array<Eigen::Index, 6> keep{0, 1, 4, 5, 6, 7};
    Eigen::MatrixXd ga(6, 6), cx(6, 2);
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) ga(i, j) = g(keep[i], keep[j]);
        cx(i, 0) = g(keep[i], 2);
        cx(i, 1) = g(keep[i], 3);
    }
    const Eigen::Matrix2d gb = g.block<2, 2>(2, 2) + I2;
    const Eigen::MatrixXd gcond = ga - cx * gb.inverse() * cx.transpose();

    const std::vector<double> spec = symplectic_spectrum(gcond);
    return {spec[0], spec[1], spec[2]};
}

std::pair<double, double> conditional_symplectic_eigenvalues(const TwoModeCov& cov,
                                                             const DetectorParams& det,
                                                             CondMode mode) {
    det.validate();
    if (mode == CondMode::oracle) {
        const auto spec = conditional_spectrum_oracle(cov, det);
        return {spec[0], spec[1]};
    }

    const double chi_d = 2.0 * (1.0 + det.upsilon) / det.eta - 1.0;
    const double a = cov.a, b = cov.b, c = cov.c;
    const double A = a * a + b * b - 2.0 * c * c;
    const double sB = std::abs(a * b - c * c);
    const double B = sB * sB;
    const double den = (b + chi_d) * (b + chi_d);

    if (mode == CondMode::paper_literal) {
        const double C = (A * chi_d * chi_d + 2.0 * a * (a * b - c * c) * chi_d +
                          2.0 * c * c + B + 1.0) / den;
        const double D = (a + sB * chi_d) * (a + sB * chi_d) / den;
        if (C * C - 4.0 * D < 0.0)
            throw std::domain_error("literal formula unphysical here");
        return eigen_pair_from_cd(C, D, "conditional (paper_literal)");
    }

    // corrected heterodyne closed form; matches the conditioning oracle
    if (det.eta >= 1.0) return {eta_one_conditional(cov, det.upsilon), 1.0};
    const double C = (A * chi_d * chi_d + B + 1.0 + 2.0 * chi_d * (a * sB + b) +
                      2.0 * c * c) / den;
    const double D = (a + sB * chi_d) * (a + sB * chi_d) / den;
    return eigen_pair_from_cd(C, D, "conditional (closed_form)");
}

double entropy_g(double x) {
    if (x < 1.0 - 1e-6) throw std::domain_error("entropy_g: x below 1 beyond tolerance");
    if (x < 1.0) x = 1.0;
    const double p = (x + 1.0) / 2.0;
    const double m = (x - 1.0) / 2.0;
    const double t1 = p * std::log2(p);
    const double t2 = (x - 1.0 < 1e-12) ? 0.0 : m * std::log2(m);
    return t1 - t2;
}

SecurityReport key_rate(const ProtocolParams& params, const ChannelParams& ch,
                        const SourceNoise& src, const DetectorParams& det,
                        Convention convention) {
    if (!(params.beta > 0.0 && params.beta <= 1.0))
        throw std::domain_error("beta must be in (0, 1]");
    if (!(params.symbol_rate > 0.0))
        throw std::domain_error("symbol_rate must be > 0");

    const EquivalentChannel equiv = equivalent_gaussian_channel(params.v_a, ch, src);
    const NoiseBudget budget = noise_budget(equiv, det);
    const TwoModeCov cov = covariance_ab(params.v_a, equiv);

    const auto [l1, l2] = channel_symplectic_eigenvalues(cov);
    const auto [l3, l4] =
        conditional_symplectic_eigenvalues(cov, det, CondMode::closed_form);

    const double s_ab = entropy_g(l1) + entropy_g(l2);
    const double s_cond = entropy_g(l3) + entropy_g(l4);
    const double scale = convention == Convention::doubled ? 2.0 : 1.0;

    SecurityReport r{};
    r.i_ab = scale * mutual_information(params.v_a, budget.chi_t, Convention::single);
    r.lambda = {l1, l2, l3, l4};
    r.s_ab = s_ab;
    r.s_cond = s_cond;
    r.holevo = scale * (s_ab - s_cond);
    r.key_rate_per_symbol = params.beta * r.i_ab - r.holevo;
    r.key_rate_per_second = r.key_rate_per_symbol * params.symbol_rate;
    r.convention = convention;
    r.positive = r.key_rate_per_symbol > 0.0;
    r.budget = budget;
    r.equivalent = equiv;
    return r;
}

}  // namespace cvqkd
