#pragma once

// The twelve scaling descriptors of one signal: the wavelet-spectrum slope S
// plus eleven geometric features of the multifractal (alpha, f) curve.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wavescale/detail/regression.hpp"
#include "wavescale/error.hpp"
#include "wavescale/mono_spectrum.hpp"
#include "wavescale/multi_spectrum.hpp"
#include "wavescale/wavelet.hpp"

namespace wavescale {

inline constexpr std::size_t kDescriptorCount = 12;

inline constexpr std::array<std::string_view, kDescriptorCount> kDescriptorNames = {
    "S", "LS", "RS", "B", "SM", "LTP", "RTP", "LT", "RT", "MC", "K", "KC"};

// Index of a descriptor name in the canonical order, or nullopt.
inline std::optional<std::size_t> descriptor_index(std::string_view name) {
    for (std::size_t i = 0; i < kDescriptorCount; ++i) {
        if (kDescriptorNames[i] == name) return i;
    }
    return std::nullopt;
}

enum DescriptorFlag : std::uint32_t {
    kFlagNone = 0,
    kFlagApexAtBoundary = 1u << 0,
    kFlagLeftCutExtrapolated = 1u << 1,
    kFlagRightCutExtrapolated = 1u << 2,
    kFlagLeftCutMissing = 1u << 3,
    kFlagRightCutMissing = 1u << 4,
    kFlagLeftSlopeUnavailable = 1u << 5,
    kFlagRightSlopeUnavailable = 1u << 6,
    kFlagCurvatureDegenerate = 1u << 7,
    kFlagCentralCurvatureFallback = 1u << 8,
    kFlagMultifractalUnavailable = 1u << 9,
    kFlagHurstOutOfRange = 1u << 10,
    kFlagQRangeFallback = 1u << 11,
    kFlagDegenerateParametrization = 1u << 12,
    kFlagCutFolded = 1u << 13,
};

inline std::string flags_to_string(std::uint32_t flags) {
    static constexpr std::array<std::pair<std::uint32_t, const char*>, 14> names = {{
        {kFlagApexAtBoundary, "apex_at_boundary"},
        {kFlagLeftCutExtrapolated, "left_cut_extrapolated"},
        {kFlagRightCutExtrapolated, "right_cut_extrapolated"},
        {kFlagLeftCutMissing, "left_cut_missing"},
        {kFlagRightCutMissing, "right_cut_missing"},
        {kFlagLeftSlopeUnavailable, "left_slope_unavailable"},
        {kFlagRightSlopeUnavailable, "right_slope_unavailable"},
        {kFlagCurvatureDegenerate, "curvature_degenerate"},
        {kFlagCentralCurvatureFallback, "central_curvature_fallback"},
        {kFlagMultifractalUnavailable, "multifractal_unavailable"},
        {kFlagHurstOutOfRange, "hurst_out_of_range"},
        {kFlagQRangeFallback, "q_range_fallback"},
        {kFlagDegenerateParametrization, "degenerate_parametrization"},
        {kFlagCutFolded, "cut_folded"},
    }};
    std::string out;
    for (const auto& [bit, name] : names) {
        if ((flags & bit) == 0) continue;
        if (!out.empty()) out += '|';
        out += name;
    }
    return out;
}

struct ScalingDescriptors {
    static constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    double S = nan;
    double LS = nan;
    double RS = nan;
    double B = nan;
    double SM = nan;
    double LTP = nan;
    double RTP = nan;
    double LT = nan;
    double RT = nan;
    double MC = nan;
    double K = nan;
    double KC = nan;
    std::uint32_t flags = kFlagNone;
    std::string note;  // first error met while extracting, if any

    std::array<double, kDescriptorCount> values() const { return {S, LS, RS, B, SM, LTP, RTP, LT, RT, MC, K, KC}; }

    bool has(DescriptorFlag f) const noexcept { return (flags & f) != 0; }
    bool multifractal_ok() const noexcept { return !has(kFlagMultifractalUnavailable); }
};

struct DescriptorConfig {
    std::string wavelet = "sym8";
    int j0 = 1;
    JRange window{3, 7};
    MultifractalOptions multifractal{};
    double cut_level = -0.2;
    bool detrend_endpoints = true;
};

struct SpectralMode {
    double sm = 0.0;
    std::size_t index = 0;
    bool at_boundary = false;
};

struct Cuts {
    double ltp = std::numeric_limits<double>::quiet_NaN();
    double rtp = std::numeric_limits<double>::quiet_NaN();
    double broadness = std::numeric_limits<double>::quiet_NaN();
    std::uint32_t flags = kFlagNone;
};

struct BranchSlopes {
    double ls = std::numeric_limits<double>::quiet_NaN();
    double rs = std::numeric_limits<double>::quiet_NaN();
    std::uint32_t flags = kFlagNone;
};

struct Tangents {
    double lt = std::numeric_limits<double>::quiet_NaN();
    double rt = std::numeric_limits<double>::quiet_NaN();
};

struct Curvature {
    double value = std::numeric_limits<double>::quiet_NaN();
    std::uint32_t flags = kFlagNone;
};

namespace detail {

inline constexpr double kTinyStep = 1e-12;

// Index of the largest f; a tied plateau resolves to its middle point.
inline std::size_t apex_index(const MultifractalSpectrum& mfs) {
    const auto& f = mfs.f_alpha;
    std::size_t best = 0;
    for (std::size_t i = 1; i < f.size(); ++i) {
        if (f[i] > f[best]) best = i;
    }
    std::size_t last = best;
    while (last + 1 < f.size() && f[last + 1] == f[best]) ++last;
    return best + (last - best) / 2;
}

// +1 when alpha grows with the index, -1 otherwise. The left branch (small
// alpha) is walked in the direction -dir from the apex.
inline int alpha_direction(const MultifractalSpectrum& mfs) {
    return mfs.alpha.back() >= mfs.alpha.front() ? 1 : -1;
}

// Indices from the apex outward along one branch (apex included).
inline std::vector<std::size_t> branch_indices(const MultifractalSpectrum& mfs, std::size_t apex, bool left) {
    const int step = (left ? -1 : 1) * alpha_direction(mfs);
    std::vector<std::size_t> out;
    for (long i = static_cast<long>(apex); i >= 0 && i < static_cast<long>(mfs.size()); i += step) {
        out.push_back(static_cast<std::size_t>(i));
    }
    return out;
}

struct CutPoint {
    double alpha = std::numeric_limits<double>::quiet_NaN();
    std::size_t inner = 0;  // bracketing pair (inner nearer the apex)
    std::size_t outer = 0;
    std::size_t branch_pos = 0;  // position of inner along the branch
    bool extrapolated = false;
    bool found = false;
    bool folded = false;
};

inline CutPoint find_cut(const MultifractalSpectrum& mfs, const std::vector<std::size_t>& branch, double a,
                         bool left) {
    const auto& al = mfs.alpha;
    const auto& f = mfs.f_alpha;
    CutPoint c;
    for (std::size_t p = 0; p + 1 < branch.size(); ++p) {
        const std::size_t i = branch[p];
        const std::size_t o = branch[p + 1];
        if (f[i] >= a && f[o] <= a) {
            c.inner = i;
            c.outer = o;
            c.branch_pos = p;
            c.found = true;
            if (f[i] == f[o]) c.alpha = al[o];
            else c.alpha = al[i] + (a - f[i]) * (al[o] - al[i]) / (f[o] - f[i]);
            return c;
        }
    }
    if (branch.size() < 2) return c;
    // Never reached: extend the last segment.
    const std::size_t i = branch[branch.size() - 2];
    const std::size_t o = branch.back();
    const double dal = al[o] - al[i];
    if (std::abs(dal) < kTinyStep) return c;
    const double slope = (f[o] - f[i]) / dal;
    if (slope == 0.0) return c;
    const double x = al[o] + (a - f[o]) / slope;
    const bool outward = left ? x <= al[o] : x >= al[o];
    if (!outward) return c;
    c.alpha = x;
    c.inner = i;
    c.outer = o;
    c.branch_pos = branch.size() - 2;
    c.extrapolated = true;
    c.found = true;
    return c;
}

// Derivative at x of the quadratic through three points; nullopt if two abscissae coincide.
inline std::optional<double> quadratic_slope(double x0, double y0, double x1, double y1, double x2, double y2,
                                             double x) {
    const double d01 = x0 - x1, d02 = x0 - x2, d12 = x1 - x2;
    if (std::abs(d01) < kTinyStep || std::abs(d02) < kTinyStep || std::abs(d12) < kTinyStep) return std::nullopt;
    return y0 * ((x - x1) + (x - x2)) / (d01 * d02) + y1 * ((x - x0) + (x - x2)) / (-d01 * d12) +
           y2 * ((x - x0) + (x - x1)) / (d02 * d12);
}

// 2 * f[x0, x1, x2]: exact second derivative of the interpolating parabola.
inline std::optional<double> second_divided(double x0, double y0, double x1, double y1, double x2, double y2) {
    const double d10 = x1 - x0, d21 = x2 - x1, d20 = x2 - x0;
    if (std::abs(d10) < kTinyStep || std::abs(d21) < kTinyStep || std::abs(d20) < kTinyStep) return std::nullopt;
    return 2.0 * ((y2 - y1) / d21 - (y1 - y0) / d10) / d20;
}

}  // namespace detail

inline SpectralMode spectral_mode(const MultifractalSpectrum& mfs) {
    if (mfs.size() < 3) throw Error("spectral mode needs at least 3 grid points");
    const std::size_t i = detail::apex_index(mfs);
    SpectralMode m{mfs.alpha[i], i, false};
    if (i == 0 || i + 1 == mfs.size()) {
        m.at_boundary = true;
        return m;
    }
    const double x0 = mfs.alpha[i - 1], x1 = mfs.alpha[i], x2 = mfs.alpha[i + 1];
    const double y0 = mfs.f_alpha[i - 1], y1 = mfs.f_alpha[i], y2 = mfs.f_alpha[i + 1];
    const auto curv = detail::second_divided(x0, y0, x1, y1, x2, y2);
    const auto slope = detail::quadratic_slope(x0, y0, x1, y1, x2, y2, x1);
    if (!curv || !slope || *curv >= 0.0) return m;
    // Vertex of the parabola, kept inside the apex triple.
    double vertex = x1 - *slope / *curv;
    const double lo = std::min({x0, x1, x2});
    const double hi = std::max({x0, x1, x2});
    m.sm = std::clamp(vertex, lo, hi);
    return m;
}

namespace detail {

// Cut on one branch, rejected when alpha(q) folds back so far that the
// crossing lands on the other side of the spectral mode.
inline CutPoint branch_cut(const MultifractalSpectrum& mfs, std::size_t apex, double a, bool left) {
    auto c = find_cut(mfs, branch_indices(mfs, apex, left), a, left);
    if (!c.found) return c;
    const double sm = spectral_mode(mfs).sm;
    if (left ? c.alpha > sm : c.alpha < sm) {
        c.found = false;
        c.folded = true;
    }
    return c;
}

}  // namespace detail

inline Cuts broadness_and_cuts(const MultifractalSpectrum& mfs, double a = -0.2) {
    const std::size_t apex = detail::apex_index(mfs);
    Cuts cuts;
    const auto left = detail::branch_cut(mfs, apex, a, true);
    const auto right = detail::branch_cut(mfs, apex, a, false);
    if (left.folded || right.folded) cuts.flags |= kFlagCutFolded;
    if (left.found) cuts.ltp = left.alpha;
    else cuts.flags |= kFlagLeftCutMissing;
    if (right.found) cuts.rtp = right.alpha;
    else cuts.flags |= kFlagRightCutMissing;
    if (left.extrapolated) cuts.flags |= kFlagLeftCutExtrapolated;
    if (right.extrapolated) cuts.flags |= kFlagRightCutExtrapolated;
    cuts.broadness = cuts.rtp - cuts.ltp;
    return cuts;
}

inline BranchSlopes branch_slopes(const MultifractalSpectrum& mfs) {
    const double sm = spectral_mode(mfs).sm;
    // Points within round-off of SM (typically the apex itself) sit on neither branch.
    const auto [lo, hi] = std::minmax_element(mfs.alpha.begin(), mfs.alpha.end());
    const double tol = 1e-9 * std::max(1.0, *hi - *lo);
    std::vector<double> lx, ly, rx, ry;
    for (std::size_t i = 0; i < mfs.size(); ++i) {
        if (mfs.alpha[i] < sm - tol) {
            lx.push_back(mfs.alpha[i]);
            ly.push_back(mfs.f_alpha[i]);
        } else if (mfs.alpha[i] > sm + tol) {
            rx.push_back(mfs.alpha[i]);
            ry.push_back(mfs.f_alpha[i]);
        }
    }
    auto side = [](const std::vector<double>& x, const std::vector<double>& y) -> std::optional<double> {
        if (x.size() < 2) return std::nullopt;
        try {
            return detail::ols_line(x, y).slope;
        } catch (const Error&) {
            return std::nullopt;
        }
    };
    BranchSlopes out;
    if (const auto s = side(lx, ly)) out.ls = *s;
    else out.flags |= kFlagLeftSlopeUnavailable;
    if (const auto s = side(rx, ry)) out.rs = *s;
    else out.flags |= kFlagRightSlopeUnavailable;
    return out;
}

inline Tangents cut_tangents(const MultifractalSpectrum& mfs, double a = -0.2) {
    const std::size_t apex = detail::apex_index(mfs);
    const auto& al = mfs.alpha;
    const auto& f = mfs.f_alpha;
    auto tangent = [&](bool left) {
        const auto branch = detail::branch_indices(mfs, apex, left);
        const auto cut = detail::branch_cut(mfs, apex, a, left);
        if (!cut.found) return std::numeric_limits<double>::quiet_NaN();
        const double dal = al[cut.outer] - al[cut.inner];
        if (std::abs(dal) < detail::kTinyStep) return std::numeric_limits<double>::quiet_NaN();
        const double secant = (f[cut.outer] - f[cut.inner]) / dal;
        if (cut.extrapolated) return secant;
        // Third point: the inner point's neighbour toward (or across) the apex.
        std::optional<std::size_t> third;
        if (cut.branch_pos > 0) {
            third = branch[cut.branch_pos - 1];
        } else {
            const auto other = detail::branch_indices(mfs, apex, !left);
            if (other.size() > 1) third = other[1];
        }
        if (!third) return secant;
        const auto q = detail::quadratic_slope(al[*third], f[*third], al[cut.inner], f[cut.inner], al[cut.outer],
                                               f[cut.outer], cut.alpha);
        if (!q || (*q > 0.0) != (secant > 0.0)) return secant;
        return *q;
    };
    return Tangents{tangent(true), tangent(false)};
}

// |f''| / (1 + f'^2)^{3/2} at the apex, with derivatives of the parametric
// curve (alpha(q), f(q)) taken by central differences in q.
inline Curvature max_curvature(const MultifractalSpectrum& mfs) {
    const std::size_t i = detail::apex_index(mfs);
    Curvature c;
    if (i < 2 || i + 2 >= mfs.size()) {
        c.flags |= kFlagApexAtBoundary;
        return c;
    }
    const double h = mfs.grid.step();
    const auto& al = mfs.alpha;
    const auto& f = mfs.f_alpha;
    auto alpha_q = [&](std::size_t k) { return (al[k + 1] - al[k - 1]) / (2.0 * h); };
    auto f_prime = [&](std::size_t k) {
        const double aq = alpha_q(k);
        if (std::abs(aq) < detail::kTinyStep) throw Error("degenerate parametrization: dalpha/dq vanishes");
        return ((f[k + 1] - f[k - 1]) / (2.0 * h)) / aq;
    };
    const double aq = alpha_q(i);
    const double fp = f_prime(i);
    const double fpp = ((f_prime(i + 1) - f_prime(i - 1)) / (2.0 * h)) / aq;
    c.value = std::abs(fpp) / std::pow(1.0 + fp * fp, 1.5);
    return c;
}

// Mean of the two one-sided three-point second differences at the apex.
inline Curvature curvature_k(const MultifractalSpectrum& mfs) {
    const std::size_t i = detail::apex_index(mfs);
    Curvature c;
    if (i < 2 || i + 2 >= mfs.size()) {
        c.flags |= kFlagApexAtBoundary;
        return c;
    }
    const auto& al = mfs.alpha;
    const auto& f = mfs.f_alpha;
    const auto lo = detail::second_divided(al[i - 2], f[i - 2], al[i - 1], f[i - 1], al[i], f[i]);
    const auto hi = detail::second_divided(al[i], f[i], al[i + 1], f[i + 1], al[i + 2], f[i + 2]);
    if (!lo || !hi) {
        c.flags |= kFlagCurvatureDegenerate;
        return c;
    }
    c.value = 0.5 * (std::abs(*lo) + std::abs(*hi));
    return c;
}

// Second derivative at the apex of the quartic through the five points
// around it; three-point central stencil when only one neighbour per side exists.
inline Curvature curvature_kc(const MultifractalSpectrum& mfs) {
    const std::size_t i = detail::apex_index(mfs);
    const auto& al = mfs.alpha;
    const auto& f = mfs.f_alpha;
    Curvature c;
    if (i == 0 || i + 1 >= mfs.size()) {
        c.flags |= kFlagApexAtBoundary;
        return c;
    }
    if (i < 2 || i + 2 >= mfs.size()) {
        c.flags |= kFlagCentralCurvatureFallback;
        const auto v = detail::second_divided(al[i - 1], f[i - 1], al[i], f[i], al[i + 1], f[i + 1]);
        if (!v) c.flags |= kFlagCurvatureDegenerate;
        else c.value = std::abs(*v);
        return c;
    }
    const double x = al[i];
    double second = 0.0;
    for (std::size_t m = i - 2; m <= i + 2; ++m) {
        // L_m''(x) = sum over pairs {p, r} of prod_{k not m,p,r} (x - x_k) / prod_{k != m} (x_m - x_k)
        double denom = 1.0;
        for (std::size_t k = i - 2; k <= i + 2; ++k) {
            if (k == m) continue;
            const double d = al[m] - al[k];
            if (std::abs(d) < detail::kTinyStep) {
                c.flags |= kFlagCurvatureDegenerate;
                return c;
            }
            denom *= d;
        }
        double num = 0.0;
        for (std::size_t p = i - 2; p <= i + 2; ++p) {
            for (std::size_t r = p + 1; r <= i + 2; ++r) {
                if (p == m || r == m) continue;
                double prod = 1.0;
                for (std::size_t k = i - 2; k <= i + 2; ++k) {
                    if (k != m && k != p && k != r) prod *= x - al[k];
                }
                num += prod;
            }
        }
        second += f[m] * 2.0 * num / denom;
    }
    c.value = std::abs(second);
    return c;
}

// Multifractal fields of the record, computed from an accepted spectrum.
inline void fill_multifractal(ScalingDescriptors& d, const MultifractalSpectrum& mfs, double cut_level) {
    const auto mode = spectral_mode(mfs);
    d.SM = mode.sm;
    if (mode.at_boundary) d.flags |= kFlagApexAtBoundary;
    const auto cuts = broadness_and_cuts(mfs, cut_level);
    d.LTP = cuts.ltp;
    d.RTP = cuts.rtp;
    d.B = cuts.broadness;
    d.flags |= cuts.flags;
    const auto slopes = branch_slopes(mfs);
    d.LS = slopes.ls;
    d.RS = slopes.rs;
    d.flags |= slopes.flags;
    const auto tan = cut_tangents(mfs, cut_level);
    d.LT = tan.lt;
    d.RT = tan.rt;
    try {
        const auto mc = max_curvature(mfs);
        d.MC = mc.value;
        d.flags |= mc.flags;
    } catch (const Error& e) {
        d.flags |= kFlagDegenerateParametrization;
        if (d.note.empty()) d.note = e.what();
    }
    const auto k = curvature_k(mfs);
    d.K = k.value;
    d.flags |= k.flags;
    const auto kc = curvature_kc(mfs);
    d.KC = kc.value;
    d.flags |= kc.flags;
    if (mfs.q_range_used == QRangeUsed::Fallback) d.flags |= kFlagQRangeFallback;
}

// Largest power-of-two prefix, with the line through the end samples removed
// when requested (limits the wrap-around jump of the periodic transform).
inline std::vector<double> prepare_signal(std::span<const double> signal, bool detrend) {
    if (signal.size() < 256) throw Error("signal too short: need at least 256 samples");
    const std::size_t n = std::size_t{1} << log2_exact(signal.size());
    std::vector<double> x(signal.begin(), signal.begin() + static_cast<std::ptrdiff_t>(n));
    if (detrend) {
        const double first = x.front();
        const double rise = x.back() - first;
        for (std::size_t i = 0; i < n; ++i) x[i] -= first + rise * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return x;
}

inline ScalingDescriptors extract_descriptors(std::span<const double> signal, const DescriptorConfig& cfg = {}) {
    const auto filter = filter_from_id(cfg.wavelet);
    const auto x = prepare_signal(signal, cfg.detrend_endpoints);
    const auto decomp = dwt(x, filter, cfg.j0);
    ScalingDescriptors d;
    const auto spec = wavelet_spectrum(decomp);
    d.S = fit_spectrum_slope(spec, cfg.window.j_min, cfg.window.j_max).slope;
    if (!hurst_in_range(hurst_from_slope(d.S))) d.flags |= kFlagHurstOutOfRange;
    try {
        const auto mfs = multifractal_spectrum(decomp, cfg.window, cfg.multifractal);
        fill_multifractal(d, mfs, cfg.cut_level);
    } catch (const Error& e) {
        d.flags |= kFlagMultifractalUnavailable;
        d.note = e.what();
    }
    return d;
}

}  // namespace wavescale
