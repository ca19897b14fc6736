#include "cvqkd/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace cvqkd {

namespace {

constexpr double kGolden = 0.6180339887498949;  // (sqrt(5) - 1) / 2

}  // namespace

std::string to_string(SweepVariable v) {
    switch (v) {
        case SweepVariable::v_a: return "v_a";
        case SweepVariable::loss_db: return "loss_db";
        case SweepVariable::upsilon: return "upsilon";
        case SweepVariable::beta: return "beta";
    }
    return "?";
}

SweepVariable sweep_variable_from_string(const std::string& s) {
    if (s == "v_a") return SweepVariable::v_a;
    if (s == "loss_db") return SweepVariable::loss_db;
    if (s == "upsilon") return SweepVariable::upsilon;
    if (s == "beta") return SweepVariable::beta;
    throw std::domain_error("unknown sweep variable '" + s +
                            "' (expected v_a|loss_db|upsilon|beta)");
}

Optimum optimal_modulation(const ChannelParams& ch, const SourceNoise& src,
                           const DetectorParams& det, double beta,
                           double bounds_lo, double bounds_hi, double tol,
                           Convention convention, double symbol_rate) {
    if (!(bounds_lo > 0.0 && bounds_lo < bounds_hi))
        throw std::domain_error("optimal_modulation: need 0 < lo < hi");
    if (!(tol > 0.0)) throw std::domain_error("optimal_modulation: tol must be > 0");

    std::size_t evals = 0;
    auto eval = [&](double v_a) {
        ++evals;
        ProtocolParams p{v_a, beta, symbol_rate};
        return key_rate(p, ch, src, det, convention).key_rate_per_symbol;
    };

    // coarse scan
    constexpr int kCoarse = 64;
    std::vector<double> xs(kCoarse), ks(kCoarse);
    for (int i = 0; i < kCoarse; ++i) {
        xs[i] = bounds_lo + (bounds_hi - bounds_lo) * i / (kCoarse - 1);
        ks[i] = eval(xs[i]);
    }
    const auto best_it = std::max_element(ks.begin(), ks.end());
    int best = static_cast<int>(best_it - ks.begin());

    // single slope sign change (rise then fall) => unimodal enough for
    // golden-section; otherwise fall back to a full fine grid
    int sign_changes = 0;
    int prev_sign = 0;
    for (int i = 1; i < kCoarse; ++i) {
        const double d = ks[i] - ks[i - 1];
        const int s = d > 0 ? 1 : (d < 0 ? -1 : 0);
        if (s != 0) {
            if (prev_sign != 0 && s != prev_sign) ++sign_changes;
            prev_sign = s;
        }
    }

    double lo = xs[std::max(best - 1, 0)];
    double hi = xs[std::min(best + 1, kCoarse - 1)];

    double x_star, k_star;
    if (sign_changes <= 1) {
        double x1 = hi - kGolden * (hi - lo);
        double x2 = lo + kGolden * (hi - lo);
        double f1 = eval(x1), f2 = eval(x2);
        while (hi - lo > tol) {
            if (f1 < f2) {
                lo = x1;
                x1 = x2; f1 = f2;
                x2 = lo + kGolden * (hi - lo);
                f2 = eval(x2);
            } else {
                hi = x2;
                x2 = x1; f2 = f1;
                x1 = hi - kGolden * (hi - lo);
                f1 = eval(x1);
            }
        }
        x_star = f1 > f2 ? x1 : x2;
        k_star = std::max(f1, f2);
    } else {
        const int n = static_cast<int>(std::ceil((bounds_hi - bounds_lo) / tol)) + 1;
        x_star = xs[best];
        k_star = ks[best];
        for (int i = 0; i < n; ++i) {
            const double x = bounds_lo + (bounds_hi - bounds_lo) * i / (n - 1);
            const double k = eval(x);
            if (k > k_star) { k_star = k; x_star = x; }
        }
        lo = std::max(bounds_lo, x_star - tol);
        hi = std::min(bounds_hi, x_star + tol);
    }

    // grid maximum can beat the refined point when the bracket was off
    if (ks[best] > k_star) { k_star = ks[best]; x_star = xs[best]; }

    Optimum opt;
    opt.v_a_star = x_star;
    opt.key_rate_star = k_star;
    opt.iterations = evals;
    opt.bracket_lo = lo;
    opt.bracket_hi = hi;
    opt.positive = k_star > 0.0;
    opt.report = key_rate({x_star, beta, symbol_rate}, ch, src, det, convention);
    return opt;
}

namespace {

SweepRow evaluate_row(const SweepSpec& spec, double value) {
    SweepRow row{value, 0.0, 0.0, 0.0, 0.0, spec.fixed_protocol.v_a, false, ""};
    try {
        ProtocolParams p = spec.fixed_protocol;
        ChannelParams ch = spec.fixed_channel;
        DetectorParams det = spec.fixed_detector;
        switch (spec.variable) {
            case SweepVariable::v_a: p.v_a = value; break;
            case SweepVariable::loss_db: ch.t0 = std::pow(10.0, -value / 10.0); break;
            case SweepVariable::upsilon: det.upsilon = value; break;
            case SweepVariable::beta: p.beta = value; break;
        }
        SecurityReport rep;
        if (spec.optimize_v_a && spec.variable != SweepVariable::v_a) {
            const Optimum o = optimal_modulation(ch, spec.fixed_source, det, p.beta,
                                                 1e-3, 2.0, 1e-4, spec.convention,
                                                 p.symbol_rate);
            rep = o.report;
            row.v_a = o.v_a_star;
        } else {
            rep = key_rate(p, ch, spec.fixed_source, det, spec.convention);
            row.v_a = p.v_a;
        }
        row.key_rate_per_symbol = rep.key_rate_per_symbol;
        row.key_rate_per_second = rep.key_rate_per_second;
        row.i_ab = rep.i_ab;
        row.holevo = rep.holevo;
        row.valid = true;
    } catch (const std::exception& e) {
        row.note = e.what();
    }
    return row;
}

}  // namespace

std::vector<SweepRow> sweep(const SweepSpec& spec, int jobs) {
    if (spec.grid.empty()) throw std::domain_error("sweep: empty grid");
    for (std::size_t i = 1; i < spec.grid.size(); ++i)
        if (!(spec.grid[i] > spec.grid[i - 1]))
            throw std::domain_error("sweep: grid must be strictly increasing");

    const std::size_t n = spec.grid.size();
    std::vector<SweepRow> rows(n);
    if (jobs <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) rows[i] = evaluate_row(spec, spec.grid[i]);
        return rows;
    }
    // each worker owns a strided slice; slots are disjoint, merge is by index
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers)
                rows[i] = evaluate_row(spec, spec.grid[i]);
        });
    }
    for (std::thread& t : pool) t.join();
    return rows;
}

}  // namespace cvqkd
