#pragma once

// Wavelet (monofractal) spectrum: y_j = log2(mean_k d_{j,k}^2) per detail
// level, its OLS slope S over a scale window, and H = -(S + 1) / 2.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "wavescale/detail/regression.hpp"
#include "wavescale/error.hpp"
#include "wavescale/wavelet.hpp"

namespace wavescale {

struct WaveletSpectrum {
    std::vector<int> levels;
    std::vector<double> log_energy;  // -inf marks an all-zero (unusable) level

    bool usable(std::size_t i) const { return std::isfinite(log_energy[i]); }

    std::size_t usable_count() const {
        std::size_t n = 0;
        for (std::size_t i = 0; i < log_energy.size(); ++i) n += usable(i) ? 1 : 0;
        return n;
    }
};

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    int j_min = 0;
    int j_max = 0;
    double r2 = 1.0;
    std::size_t points = 0;
};

// Relative power below which a detail level is treated as numerically zero.
inline constexpr double kRoundoffPower = 1e-24;

inline WaveletSpectrum wavelet_spectrum(const WaveletDecomposition& decomp) {
    if (decomp.level_count() < 2) throw Error("wavelet spectrum needs at least 2 detail levels");
    // Levels at round-off scale relative to the signal power count as zero,
    // so a constant signal is degenerate for every filter, not just Haar.
    double total = 0.0;
    for (double v : decomp.coarse()) total += v * v;
    for (int j = decomp.j0(); j < decomp.depth(); ++j) {
        for (double v : decomp.detail(j)) total += v * v;
    }
    const double floor = kRoundoffPower * total / static_cast<double>(decomp.size());
    WaveletSpectrum spec;
    for (int j = decomp.j0(); j < decomp.depth(); ++j) {
        const auto d = decomp.detail(j);
        double energy = 0.0;
        for (double v : d) energy += v * v;
        energy /= static_cast<double>(d.size());
        spec.levels.push_back(j);
        spec.log_energy.push_back(energy > floor ? std::log2(energy) : -std::numeric_limits<double>::infinity());
    }
    if (spec.usable_count() < 2) {
        throw Error("wavelet spectrum: fewer than 2 levels with nonzero detail coefficients");
    }
    return spec;
}

inline SlopeFit fit_spectrum_slope(const WaveletSpectrum& spec, int j_min, int j_max) {
    if (spec.levels.empty()) throw Error("empty wavelet spectrum");
    if (j_min >= j_max) {
        throw Error("slope window [" + std::to_string(j_min) + ", " + std::to_string(j_max) + "] is empty");
    }
    if (j_min < spec.levels.front() || j_max > spec.levels.back()) {
        throw Error("slope window [" + std::to_string(j_min) + ", " + std::to_string(j_max) +
                    "] outside available levels [" + std::to_string(spec.levels.front()) + ", " +
                    std::to_string(spec.levels.back()) + "]");
    }
    std::vector<double> x, y;
    for (std::size_t i = 0; i < spec.levels.size(); ++i) {
        const int j = spec.levels[i];
        if (j < j_min || j > j_max || !spec.usable(i)) continue;
        x.push_back(j);
        y.push_back(spec.log_energy[i]);
    }
    if (x.size() < 2) throw Error("slope window has fewer than 2 usable levels");
    const auto line = detail::ols_line(x, y);
    return SlopeFit{line.slope, line.intercept, j_min, j_max, line.r2, x.size()};
}

inline double hurst_from_slope(double slope) noexcept { return -(slope + 1.0) / 2.0; }

// Brownian-type regularity lives in (0, 1); estimates outside are reported, not clamped.
inline bool hurst_in_range(double h) noexcept { return h > 0.0 && h < 1.0; }

}  // namespace wavescale
