#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "wavescale/mono_spectrum.hpp"
#include "wavescale/multi_spectrum.hpp"
#include "wavescale/synth.hpp"

using namespace wavescale;

namespace {

// Cascade that always puts m0 on the left child.
std::vector<double> fixed_cascade(double m0, int depth) {
    std::vector<double> mass{1.0};
    for (int l = 0; l < depth; ++l) {
        std::vector<double> next;
        for (double m : mass) {
            next.push_back(m * m0);
            next.push_back(m * (1.0 - m0));
        }
        mass.swap(next);
    }
    return mass;
}

}  // namespace

TEST(MonoSpectrum, FrozenHaarLogEnergy) {
    std::vector<double> x(64);
    for (std::size_t i = 0; i < 64; ++i) x[i] = std::sin(0.3 * static_cast<double>(i)) + 0.01 * std::pow(static_cast<double>(i), 1.5);
    const auto spec = wavelet_spectrum(dwt(x, filter_from_id("haar"), 1));
    const std::vector<double> expected{3.7591962798059715, 2.6829802470297075, 0.5452906651282186, -2.2885060032205904,
                                       -5.239630661231656};
    ASSERT_EQ(spec.levels.size(), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        EXPECT_EQ(spec.levels[i], static_cast<int>(i) + 1);
        EXPECT_NEAR(spec.log_energy[i], expected[i], 1e-12);
    }
}

TEST(MonoSpectrum, PlantedPowerLawSlope) {
    WaveletSpectrum s;
    for (int j = 1; j <= 9; ++j) {
        s.levels.push_back(j);
        s.log_energy.push_back(3.0 - 2.5 * j);
    }
    const auto fit = fit_spectrum_slope(s, 3, 7);
    EXPECT_NEAR(fit.slope, -2.5, 1e-12);
    EXPECT_NEAR(fit.intercept, 3.0, 1e-12);
    EXPECT_EQ(fit.points, 5u);
    EXPECT_NEAR(fit.r2, 1.0, 1e-12);
    EXPECT_NEAR(hurst_from_slope(fit.slope), 0.75, 1e-12);
}

TEST(MonoSpectrum, SkipsZeroEnergyLevelsAndValidatesWindow) {
    WaveletSpectrum s;
    for (int j = 1; j <= 6; ++j) {
        s.levels.push_back(j);
        s.log_energy.push_back(j == 4 ? -std::numeric_limits<double>::infinity() : -1.0 * j);
    }
    const auto fit = fit_spectrum_slope(s, 2, 6);
    EXPECT_EQ(fit.points, 4u);
    EXPECT_NEAR(fit.slope, -1.0, 1e-12);
    EXPECT_THROW(fit_spectrum_slope(s, 5, 5), Error);
    EXPECT_THROW(fit_spectrum_slope(s, 0, 4), Error);
    EXPECT_THROW(fit_spectrum_slope(s, 3, 9), Error);
}

TEST(MonoSpectrum, ConstantSignalRejected) {
    EXPECT_THROW(wavelet_spectrum(dwt(std::vector<double>(256, 1.0), filter_from_id("db4"), 1)), Error);
}

TEST(MonoSpectrum, HurstRangeIsOpen) {
    EXPECT_TRUE(hurst_in_range(0.5));
    EXPECT_FALSE(hurst_in_range(0.0));
    EXPECT_FALSE(hurst_in_range(1.0));
    EXPECT_FALSE(hurst_in_range(-0.2));
}

TEST(MonoSpectrum, BrownianSlopeNearMinusTwo) {
    double sum = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto x = gen_fbm({0.5, 4096, s});
        sum += fit_spectrum_slope(wavelet_spectrum(dwt(x, filter_from_id("haar"), 1)), 4, 9).slope;
    }
    EXPECT_NEAR(sum / 10.0, -2.0, 0.2);
}

TEST(MomentGrid, SymmetricAndValidated) {
    const auto g = MomentGrid::symmetric(9.0, 0.25);
    EXPECT_EQ(g.size(), 73u);
    EXPECT_DOUBLE_EQ(g.front(), -9.0);
    EXPECT_DOUBLE_EQ(g.back(), 9.0);
    EXPECT_DOUBLE_EQ(g[36], 0.0);
    EXPECT_THROW(MomentGrid::uniform(0.0, 1.0, 0.5), Error);
    EXPECT_THROW(MomentGrid::uniform(1.0, -1.0, 0.25), Error);
}

// Reference exponents from tests/oracle/make_oracles.py.
TEST(PartitionFunction, FrozenCascadeTau) {
    const auto x = fixed_cascade(0.6, 10);
    const auto dec = dwt(x, filter_from_id("haar"), 1);
    const auto grid = MomentGrid::uniform(-2.0, 2.0, 0.5);
    const auto fit = tau_exponents(partition_function(dec, grid, {3, 8}));
    EXPECT_NEAR(fit.tau[0], 1.1743709064735033, 1e-10);    // q = -2
    EXPECT_NEAR(fit.tau[4], 0.0, 0.0);                     // q = 0
    EXPECT_NEAR(fit.tau[5], -0.25732414681732185, 1e-10);  // q = 0.5
    EXPECT_NEAR(fit.tau[8], -0.9434164716336307, 1e-10);   // q = 2
}

TEST(PartitionFunction, DegenerateLevelsRejected) {
    std::vector<double> x(256, 0.0);
    for (std::size_t i = 0; i < 256; ++i) x[i] = static_cast<double>(i % 2);
    const auto dec = dwt(x, filter_from_id("haar"), 1);
    EXPECT_THROW(partition_function(dec, MomentGrid::symmetric(2.0, 0.5), {3, 6}), Error);
}

TEST(PartitionFunction, LogSumExpStaysFinite) {
    const std::vector<double> big{1e200, 3e200, 2e200};
    const double v = detail::log2_mean_power(big, 8.0);
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_NEAR(v, 8.0 * std::log2(3e200) + std::log2((std::pow(1.0 / 3, 8) + 1.0 + std::pow(2.0 / 3, 8)) / 3.0), 1e-9);
    const std::vector<double> tiny{1e-200, 2e-200};
    EXPECT_TRUE(std::isfinite(detail::log2_mean_power(tiny, -9.0)));
}

TEST(Legendre, CascadeClosedFormMatchesExactCurve) {
    const double m0 = 0.6;
    const auto grid = MomentGrid::symmetric(9.0, 0.01);
    const auto s = cascade_theoretical_spectrum(m0, grid);
    const double m1 = 1.0 - m0;
    for (std::size_t i = 100; i + 100 < s.size(); i += 150) {
        const double q = grid[i];
        const double a = std::pow(m0, q), b = std::pow(m1, q);
        const double exact = -(a * std::log(m0) + b * std::log(m1)) / ((a + b) * std::log(2.0));
        EXPECT_NEAR(s.alpha[i], exact, 1e-3) << "q " << q;
    }
    EXPECT_NEAR(*std::max_element(s.f_alpha.begin(), s.f_alpha.end()), 0.0, 0.0);
    EXPECT_LE(s.alpha_max_increase(), 0.0);
}

TEST(Legendre, AlphaNonIncreasingForConvexTau) {
    const auto grid = MomentGrid::symmetric(4.0, 0.25);
    std::vector<double> tau;
    for (double q : grid.values()) tau.push_back(-0.4 * q + 0.05 * q * q);
    const auto s = legendre_spectrum(tau, grid);
    for (std::size_t i = 1; i < s.size(); ++i) EXPECT_LE(s.alpha[i], s.alpha[i - 1] + 1e-12);
    // tau = -0.4 q + 0.05 q^2 gives alpha = 0.9 - 0.1 q and f = -0.05 q^2.
    EXPECT_NEAR(s.alpha[16], 0.9, 1e-12);
    EXPECT_NEAR(s.alpha[20], 0.8, 1e-12);
    EXPECT_NEAR(s.f_alpha[24], -0.05 * 4.0, 1e-12);
}

TEST(MultifractalSpectrum, CascadePrimaryGrid) {
    const auto x = gen_cascade({0.6, 12, 5});
    const auto s = multifractal_spectrum(dwt(x, filter_from_id("haar"), 1), {4, 9});
    EXPECT_EQ(s.q_range_used, QRangeUsed::Primary);
    EXPECT_EQ(s.size(), 73u);
    EXPECT_GE(*std::min_element(s.tau_r2.begin(), s.tau_r2.end()), 0.9);
    EXPECT_NEAR(s.alpha.back(), -std::log2(0.6), 0.1);
    EXPECT_NEAR(s.alpha.front(), -std::log2(0.4), 0.1);
}

TEST(MultifractalSpectrum, FallbackThenUnavailable) {
    // Raising the r2 bar above what the wide grid achieves but not the narrow
    // one forces the fallback grid; a bar of 1 rejects both.
    const auto x = gen_fbm({0.5, 1024, 11});
    const auto dec = dwt(x, filter_from_id("sym8"), 1);
    MultifractalOptions any_fit;
    any_fit.r2_threshold = 0.0;
    const auto wide = try_moment_grid(dec, MomentGrid::symmetric(9.0, 0.25), {3, 7}, any_fit);
    const auto narrow = try_moment_grid(dec, MomentGrid::symmetric(4.0, 0.25), {3, 7}, any_fit);
    ASSERT_TRUE(wide.spectrum && narrow.spectrum);
    const double r2_wide = *std::min_element(wide.spectrum->tau_r2.begin(), wide.spectrum->tau_r2.end());
    const double r2_narrow = *std::min_element(narrow.spectrum->tau_r2.begin(), narrow.spectrum->tau_r2.end());
    ASSERT_LT(r2_wide, r2_narrow);
    MultifractalOptions opts;
    opts.r2_threshold = 0.5 * (r2_wide + r2_narrow);
    const auto s = multifractal_spectrum(dec, {3, 7}, opts);
    EXPECT_EQ(s.q_range_used, QRangeUsed::Fallback);
    EXPECT_DOUBLE_EQ(select_q_range(dec, {3, 7}, opts).back(), 4.0);
    opts.r2_threshold = 1.0 + 1e-9;
    try {
        (void)multifractal_spectrum(dec, {3, 7}, opts);
        FAIL() << "expected unavailable";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("multifractal spectrum unavailable"), std::string::npos);
    }
}

TEST(MultifractalSpectrum, WindowOutsideDecompositionRejected) {
    const auto dec = dwt(gen_fbm({0.5, 256, 1}), filter_from_id("haar"), 1);
    EXPECT_THROW(multifractal_spectrum(dec, {3, 8}), Error);
    EXPECT_THROW(multifractal_spectrum(dec, {5, 5}), Error);
}

TEST(Synth, FbmDeterministicAndSized) {
    const auto a = gen_fbm({0.7, 1024, 99});
    const auto b = gen_fbm({0.7, 1024, 99});
    const auto c = gen_fbm({0.7, 1024, 100});
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
    EXPECT_EQ(a.size(), 1024u);
    EXPECT_THROW(gen_fbm({1.0, 1024, 1}), Error);
    EXPECT_THROW(gen_fbm({0.5, 1000, 1}), Error);
}

TEST(Synth, FgnAutocovariance) {
    EXPECT_DOUBLE_EQ(fgn_autocovariance(0.8, 0.0), 1.0);
    EXPECT_NEAR(fgn_autocovariance(0.5, 3.0), 0.0, 1e-15);
    EXPECT_GT(fgn_autocovariance(0.8, 1.0), 0.0);
    EXPECT_LT(fgn_autocovariance(0.2, 1.0), 0.0);
}

TEST(Synth, IncrementVarianceNearOne) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::uint64_t s = 0; s < 4; ++s) {
        const auto x = gen_fbm({0.3, 4096, s});
        double prev = 0.0;
        for (double v : x) {
            sum += (v - prev) * (v - prev);
            prev = v;
            ++n;
        }
    }
    EXPECT_NEAR(sum / static_cast<double>(n), 1.0, 0.05);
}

TEST(Synth, CascadeConservesMass) {
    const auto x = gen_cascade({0.7, 10, 3});
    EXPECT_EQ(x.size(), 1024u);
    EXPECT_NEAR(std::accumulate(x.begin(), x.end(), 0.0), 1.0, 1e-12);
    const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
    EXPECT_NEAR(*mx, std::pow(0.7, 10), 1e-15);
    EXPECT_NEAR(*mn, std::pow(0.3, 10), 1e-15);
    EXPECT_THROW(gen_cascade({0.4, 10, 1}), Error);
    EXPECT_THROW(gen_cascade({0.6, 31, 1}), Error);
}

TEST(Synth, CascadeTauClosedForm) {
    EXPECT_DOUBLE_EQ(cascade_tau(0.6, 0.0), 0.0);
    EXPECT_NEAR(cascade_tau(0.6, 1.0), -0.5, 1e-15);
    EXPECT_NEAR(cascade_tau(0.5, 3.0), -1.5, 1e-15);  // monofractal: tau linear
}
