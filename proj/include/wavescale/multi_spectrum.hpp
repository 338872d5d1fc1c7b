#pragma once

// Multifractal spectrum from DWT detail magnitudes.
//
// Conventions (fixed, applied identically to data and oracles):
//   S(j, q)  = mean_k |d_{j,k}|^q                       q >= 0
//   S(j, q)  = mean_k L_{j,k}^q                          q <  0
//   L_{j,k}  = 2^{j/2} * sup of 2^{-j'/2} |d_{j',k'}| over the dyadic cell
//              (j, k) and all of its descendants down to the finest level
//   tau(q)   = OLS slope of log2 S(j, q) against j
//   alpha(q) = 1/2 - dtau/dq
//   f(q)     = tau(q) - q dtau/dq, shifted so that max f = 0
// With these, fBm gives alpha = H + 1 and a binomial cascade analysed with
// Haar gives alpha in [-log2 m0, -log2 m1].

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "wavescale/detail/regression.hpp"
#include "wavescale/error.hpp"
#include "wavescale/wavelet.hpp"

namespace wavescale {

class MomentGrid {
 public:
    MomentGrid() = default;

    static MomentGrid uniform(double q_min, double q_max, double step) {
        if (!(step > 0.0)) throw Error("moment grid step must be positive");
        if (!(q_max > q_min)) throw Error("moment grid needs q_max > q_min");
        const double span = (q_max - q_min) / step;
        const auto intervals = static_cast<std::size_t>(std::llround(span));
        if (std::abs(span - static_cast<double>(intervals)) > 1e-9) {
            throw Error("moment grid range is not a multiple of the step");
        }
        MomentGrid g;
        g.step_ = step;
        for (std::size_t i = 0; i <= intervals; ++i) g.q_.push_back(q_min + static_cast<double>(i) * step);
        if (g.q_.size() < 5) throw Error("moment grid needs at least 5 points");
        return g;
    }

    // [-q_max, q_max]; always contains q = 0 exactly when q_max is a multiple of step.
    static MomentGrid symmetric(double q_max, double step) { return uniform(-q_max, q_max, step); }

    const std::vector<double>& values() const noexcept { return q_; }
    double step() const noexcept { return step_; }
    std::size_t size() const noexcept { return q_.size(); }
    double operator[](std::size_t i) const { return q_[i]; }
    double front() const { return q_.front(); }
    double back() const { return q_.back(); }

 private:
    std::vector<double> q_;
    double step_ = 0.0;
};

struct JRange {
    int j_min = 3;
    int j_max = 7;
};

enum class QRangeUsed { Primary, Fallback, Custom };

inline const char* to_string(QRangeUsed r) noexcept {
    switch (r) {
        case QRangeUsed::Primary: return "primary";
        case QRangeUsed::Fallback: return "fallback";
        case QRangeUsed::Custom: return "custom";
    }
    return "unknown";
}

// log2 S(j, q), indexed [q][level].
struct PartitionTable {
    std::vector<int> levels;
    std::vector<double> q;
    std::vector<std::vector<double>> log2_s;

    double value(std::size_t qi, std::size_t li) const { return std::exp2(log2_s[qi][li]); }
};

struct TauFit {
    std::vector<double> tau;
    std::vector<double> intercept;
    std::vector<double> r2;

    double min_r2() const { return r2.empty() ? 1.0 : *std::min_element(r2.begin(), r2.end()); }
};

struct MultifractalSpectrum {
    MomentGrid grid;
    std::vector<double> tau;  // empty for planted spectra
    std::vector<double> alpha;
    std::vector<double> f_alpha;
    std::vector<double> tau_r2;
    JRange j_range{};
    QRangeUsed q_range_used = QRangeUsed::Custom;

    std::size_t size() const noexcept { return alpha.size(); }

    // Planted (alpha, f) curve parametrized by a unit-step grid q = 0..n-1.
    static MultifractalSpectrum from_points(std::vector<double> alpha, std::vector<double> f_alpha) {
        if (alpha.size() != f_alpha.size()) throw Error("alpha and f have different lengths");
        if (alpha.size() < 5) throw Error("spectrum needs at least 5 points");
        MultifractalSpectrum s;
        s.grid = MomentGrid::uniform(0.0, static_cast<double>(alpha.size() - 1), 1.0);
        s.alpha = std::move(alpha);
        s.f_alpha = std::move(f_alpha);
        return s;
    }

    // Largest upward step of alpha along increasing q (0 when non-increasing).
    double alpha_max_increase() const {
        double worst = 0.0;
        for (std::size_t i = 1; i < alpha.size(); ++i) worst = std::max(worst, alpha[i] - alpha[i - 1]);
        return worst;
    }
};

namespace detail {

inline void check_j_range(const WaveletDecomposition& decomp, const JRange& jr) {
    if (jr.j_min >= jr.j_max) {
        throw Error("scale window [" + std::to_string(jr.j_min) + ", " + std::to_string(jr.j_max) + "] is empty");
    }
    if (!decomp.has_level(jr.j_min) || !decomp.has_level(jr.j_max)) {
        throw Error("scale window [" + std::to_string(jr.j_min) + ", " + std::to_string(jr.j_max) +
                    "] outside available levels [" + std::to_string(decomp.j0()) + ", " +
                    std::to_string(decomp.finest_level()) + "]");
    }
}

// log2 of mean(x_k^q) for x_k >= 0, evaluated as q*log2(max) + log2(mean((x/max)^q)).
inline double log2_mean_power(std::span<const double> x, double q) {
    if (q == 0.0) return 0.0;
    double top = 0.0;
    double bottom = std::numeric_limits<double>::infinity();
    for (double v : x) {
        top = std::max(top, v);
        bottom = std::min(bottom, v);
    }
    if (top <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    if (q < 0.0 && bottom <= 0.0) return std::numeric_limits<double>::infinity();
    // Negative q is dominated by the smallest value; rescale by it instead.
    const double ref = q > 0.0 ? top : bottom;
    double acc = 0.0;
    for (double v : x) acc += v > 0.0 ? std::pow(v / ref, q) : 0.0;
    return q * std::log2(ref) + std::log2(acc / static_cast<double>(x.size()));
}

// Cell suprema L_{j,k} for every level from j_min to the finest.
inline std::vector<std::vector<double>> cell_suprema(const WaveletDecomposition& decomp, int j_min) {
    const int finest = decomp.finest_level();
    std::vector<std::vector<double>> out(static_cast<std::size_t>(finest - j_min + 1));
    std::vector<double> below;
    for (int j = finest; j >= j_min; --j) {
        const auto d = decomp.detail(j);
        const double w = std::exp2(-0.5 * j);
        std::vector<double> cur(d.size());
        for (std::size_t k = 0; k < d.size(); ++k) {
            double v = w * std::abs(d[k]);
            if (!below.empty()) v = std::max({v, below[2 * k], below[2 * k + 1]});
            cur[k] = v;
        }
        below = cur;
        const double back = std::exp2(0.5 * j);
        for (double& v : cur) v *= back;
        out[static_cast<std::size_t>(j - j_min)] = std::move(cur);
    }
    return out;
}

// Derivative on a uniform grid: central inside, one-sided at the ends.
inline std::vector<double> grid_derivative(const std::vector<double>& y, double step) {
    const std::size_t n = y.size();
    std::vector<double> dy(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0) dy[i] = (y[1] - y[0]) / step;
        else if (i + 1 == n) dy[i] = (y[n - 1] - y[n - 2]) / step;
        else dy[i] = (y[i + 1] - y[i - 1]) / (2.0 * step);
    }
    return dy;
}

}  // namespace detail

inline PartitionTable partition_function(const WaveletDecomposition& decomp, const MomentGrid& grid,
                                         const JRange& jr) {
    detail::check_j_range(decomp, jr);
    for (int j = jr.j_min; j <= jr.j_max; ++j) {
        const auto d = decomp.detail(j);
        if (std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; })) {
            throw Error("degenerate level " + std::to_string(j) + ": all detail coefficients are zero");
        }
    }
    const bool negative = grid.front() < 0.0;
    std::vector<std::vector<double>> sup;
    if (negative) sup = detail::cell_suprema(decomp, jr.j_min);

    PartitionTable table;
    table.q = grid.values();
    for (int j = jr.j_min; j <= jr.j_max; ++j) table.levels.push_back(j);
    std::vector<std::vector<double>> mags;
    for (int j = jr.j_min; j <= jr.j_max; ++j) {
        const auto d = decomp.detail(j);
        std::vector<double> m(d.size());
        for (std::size_t k = 0; k < d.size(); ++k) m[k] = std::abs(d[k]);
        mags.push_back(std::move(m));
    }
    for (double q : table.q) {
        std::vector<double> row;
        for (std::size_t li = 0; li < table.levels.size(); ++li) {
            const auto& src = q < 0.0 ? sup[static_cast<std::size_t>(table.levels[li] - jr.j_min)] : mags[li];
            const double v = detail::log2_mean_power(src, q);
            if (!std::isfinite(v)) {
                throw Error("degenerate level " + std::to_string(table.levels[li]) +
                            ": zero cell supremum at negative moment");
            }
            row.push_back(v);
        }
        table.log2_s.push_back(std::move(row));
    }
    return table;
}

inline TauFit tau_exponents(const PartitionTable& table) {
    if (table.levels.size() < 2) throw Error("tau regression needs at least 2 scales");
    std::vector<double> x(table.levels.begin(), table.levels.end());
    TauFit fit;
    for (const auto& row : table.log2_s) {
        const auto line = detail::ols_line(x, row);
        fit.tau.push_back(line.slope);
        fit.intercept.push_back(line.intercept);
        fit.r2.push_back(line.r2);
    }
    return fit;
}

inline MultifractalSpectrum legendre_spectrum(const std::vector<double>& tau, const MomentGrid& grid) {
    if (tau.size() != grid.size()) throw Error("tau and moment grid differ in length");
    for (double t : tau) {
        if (!std::isfinite(t)) throw Error("tau is not finite on the moment grid");
    }
    const auto dtau = detail::grid_derivative(tau, grid.step());
    MultifractalSpectrum s;
    s.grid = grid;
    s.tau = tau;
    s.alpha.resize(tau.size());
    s.f_alpha.resize(tau.size());
    for (std::size_t i = 0; i < tau.size(); ++i) {
        s.alpha[i] = 0.5 - dtau[i];
        s.f_alpha[i] = tau[i] - grid[i] * dtau[i];
    }
    const double apex = *std::max_element(s.f_alpha.begin(), s.f_alpha.end());
    for (double& f : s.f_alpha) f -= apex;
    return s;
}

struct MultifractalOptions {
    double primary_qmax = 9.0;
    double fallback_qmax = 4.0;
    double q_step = 0.25;
    double r2_threshold = 0.9;
    double alpha_monotone_tol = 0.05;
};

// Spectrum on one grid, or the reason the grid was rejected.
struct GridAttempt {
    std::optional<MultifractalSpectrum> spectrum;
    std::string reason;
};

inline GridAttempt try_moment_grid(const WaveletDecomposition& decomp, const MomentGrid& grid, const JRange& jr,
                                   const MultifractalOptions& opts) {
    GridAttempt out;
    try {
        const auto table = partition_function(decomp, grid, jr);
        const auto fit = tau_exponents(table);
        if (fit.min_r2() < opts.r2_threshold) {
            out.reason = "tau regression r2 " + std::to_string(fit.min_r2()) + " below threshold";
            return out;
        }
        auto spec = legendre_spectrum(fit.tau, grid);
        if (spec.alpha_max_increase() > opts.alpha_monotone_tol) {
            out.reason = "alpha(q) not monotone (increase " + std::to_string(spec.alpha_max_increase()) + ")";
            return out;
        }
        spec.tau_r2 = fit.r2;
        spec.j_range = jr;
        out.spectrum = std::move(spec);
    } catch (const Error& e) {
        out.reason = e.what();
    }
    return out;
}

// Primary symmetric grid, then the narrower fallback grid.
inline MultifractalSpectrum multifractal_spectrum(const WaveletDecomposition& decomp, const JRange& jr,
                                                  const MultifractalOptions& opts = {}) {
    detail::check_j_range(decomp, jr);
    auto primary = try_moment_grid(decomp, MomentGrid::symmetric(opts.primary_qmax, opts.q_step), jr, opts);
    if (primary.spectrum) {
        primary.spectrum->q_range_used = QRangeUsed::Primary;
        return std::move(*primary.spectrum);
    }
    auto fallback = try_moment_grid(decomp, MomentGrid::symmetric(opts.fallback_qmax, opts.q_step), jr, opts);
    if (fallback.spectrum) {
        fallback.spectrum->q_range_used = QRangeUsed::Fallback;
        return std::move(*fallback.spectrum);
    }
    throw Error("multifractal spectrum unavailable: " + primary.reason + "; fallback: " + fallback.reason);
}

inline MomentGrid select_q_range(const WaveletDecomposition& decomp, const JRange& jr,
                                 const MultifractalOptions& opts = {}) {
    return multifractal_spectrum(decomp, jr, opts).grid;
}

}  // namespace wavescale
