#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "wavescale/rng.hpp"
#include "wavescale/wavelet.hpp"

using namespace wavescale;

namespace {

std::vector<double> random_signal(std::size_t n, std::uint64_t seed) {
    CounterRng rng(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.normal();
    return x;
}

double energy(const std::vector<double>& x) { return std::inner_product(x.begin(), x.end(), x.begin(), 0.0); }

}  // namespace

TEST(WaveletFilter, HaarAndDb1Agree) {
    const auto h = filter_from_id("haar");
    const auto d = filter_from_id("db1");
    ASSERT_EQ(h.length(), 2u);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_DOUBLE_EQ(h.low_pass()[i], d.low_pass()[i]);
}

TEST(WaveletFilter, QuadratureMirror) {
    const auto f = filter_from_id("sym8");
    const auto h = f.low_pass();
    const auto g = f.high_pass();
    const std::size_t L = h.size();
    for (std::size_t k = 0; k < L; ++k) {
        const double sign = k % 2 == 0 ? 1.0 : -1.0;
        EXPECT_DOUBLE_EQ(g[k], sign * h[L - 1 - k]);
    }
}

class FilterProperties : public ::testing::TestWithParam<const char*> {};

// Orthonormal low-pass: sum sqrt(2), unit norm, orthogonal to even shifts;
// high-pass annihilates polynomials up to order - 1.
TEST_P(FilterProperties, OrthonormalWithVanishingMoments) {
    const auto f = filter_from_id(GetParam());
    const auto h = f.low_pass();
    const auto g = f.high_pass();
    const long L = static_cast<long>(h.size());
    EXPECT_NEAR(std::accumulate(h.begin(), h.end(), 0.0), std::sqrt(2.0), 1e-12);
    for (long s = 0; s < L; s += 2) {
        double acc = 0.0;
        for (long k = 0; k + s < L; ++k) acc += h[k] * h[k + s];
        EXPECT_NEAR(acc, s == 0 ? 1.0 : 0.0, 1e-12) << "shift " << s;
    }
    for (int m = 0; m < f.order(); ++m) {
        double acc = 0.0;
        for (long k = 0; k < L; ++k) acc += std::pow(static_cast<double>(k), m) * g[k];
        EXPECT_NEAR(acc, 0.0, 1e-7 * std::pow(static_cast<double>(L), m)) << "moment " << m;
    }
}

INSTANTIATE_TEST_SUITE_P(All, FilterProperties,
                         ::testing::Values("haar", "db2", "db4", "db6", "db8", "db10", "sym2", "sym4", "sym6", "sym8",
                                           "sym10"));

TEST(WaveletFilter, UnknownIdsThrow) {
    EXPECT_THROW(filter_from_id("db11"), Error);
    EXPECT_THROW(filter_from_id("coif3"), Error);
    EXPECT_THROW(filter_from_id("sym1"), Error);
    EXPECT_THROW(filter_from_id("db"), Error);
}

// Dense-matrix reference values from tests/oracle/make_oracles.py.
TEST(Dwt, FrozenDb2) {
    const std::vector<double> x{3, 1, 4, 1, 5, 9, 2, 6};
    const std::vector<double> expected{5.0637023679041775, 10.436297632095819, 3.884854790610807,
                                       -1.4697912811497125, 2.2507298661109023, -0.905866657858823,
                                       -3.8890872965260113, 0.4229037447142878};
    const auto got = dwt(x, filter_from_id("db2"), 1).flatten();
    ASSERT_EQ(got.size(), expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], expected[i], 1e-13) << i;
}

TEST(Dwt, FrozenHaar) {
    const std::vector<double> x{3, 1, 4, 1, 5, 9, 2, 6};
    const std::vector<double> expected{2.82842712474619, 3.5355339059327373, 9.899494936611665, 5.65685424949238,
                                       1.414213562373095, 2.1213203435596424, -2.8284271247461903, -2.82842712474619};
    const auto got = dwt(x, filter_from_id("haar"), 2).flatten();
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], expected[i], 1e-13) << i;
}

TEST(Dwt, LevelLayout) {
    const auto x = random_signal(64, 3);
    const auto d = dwt(x, filter_from_id("db4"), 2);
    EXPECT_EQ(d.j0(), 2);
    EXPECT_EQ(d.depth(), 6);
    EXPECT_EQ(d.coarse().size(), 4u);
    for (int j = 2; j < 6; ++j) EXPECT_EQ(d.detail(j).size(), std::size_t{1} << j);
    EXPECT_FALSE(d.has_level(6));
    EXPECT_THROW((void)d.detail(1), Error);
}

class RoundTrip : public ::testing::TestWithParam<const char*> {};

TEST_P(RoundTrip, ReconstructsAndPreservesEnergy) {
    const auto f = filter_from_id(GetParam());
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto x = random_signal(512, s);
        for (int j0 : {1, 4, 8}) {
            const auto d = dwt(x, f, j0);
            const auto y = idwt(d, f);
            double err = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) err = std::max(err, std::abs(x[i] - y[i]));
            EXPECT_LT(err, 1e-10);
            EXPECT_NEAR(energy(d.flatten()), energy(x), 1e-10 * energy(x));
        }
    }
}

INSTANTIATE_TEST_SUITE_P(All, RoundTrip, ::testing::Values("haar", "db2", "db4", "db10", "sym8"));

TEST(Dwt, MatrixIsOrthogonal) {
    for (const char* id : {"haar", "db4", "sym8"}) {
        const auto w = dwt_matrix(64, filter_from_id(id), 1);
        const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(64, 64);
        EXPECT_LT((w * w.transpose() - eye).cwiseAbs().maxCoeff(), 1e-12) << id;
    }
}

TEST(Dwt, PyramidMatchesMatrixOracle) {
    const auto f = filter_from_id("db6");
    const auto x = random_signal(128, 9);
    const auto a = dwt(x, f, 2).flatten();
    const auto b = dwt_matrix_oracle(x, f, 2);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
    EXPECT_THROW(dwt_matrix_oracle(random_signal(512, 1), f, 2), Error);
}

TEST(Dwt, LinearInSignal) {
    const auto f = filter_from_id("sym4");
    const auto x = random_signal(256, 1);
    const auto y = random_signal(256, 2);
    std::vector<double> z(256);
    for (std::size_t i = 0; i < 256; ++i) z[i] = 2.0 * x[i] - 3.0 * y[i];
    const auto dx = dwt(x, f, 1).flatten();
    const auto dy = dwt(y, f, 1).flatten();
    const auto dz = dwt(z, f, 1).flatten();
    for (std::size_t i = 0; i < dz.size(); ++i) EXPECT_NEAR(dz[i], 2.0 * dx[i] - 3.0 * dy[i], 1e-12);
}

TEST(Dwt, ConstantSignalHasZeroDetails) {
    const std::vector<double> x(256, 4.25);
    const auto d = dwt(x, filter_from_id("db4"), 1);
    for (int j = 1; j < d.depth(); ++j) {
        for (double v : d.detail(j)) EXPECT_NEAR(v, 0.0, 1e-12);
    }
}

TEST(Dwt, RejectsBadInput) {
    const auto f = filter_from_id("haar");
    EXPECT_THROW(dwt(std::vector<double>(100, 1.0), f, 1), Error);
    EXPECT_THROW(dwt(std::vector<double>(64, 1.0), f, 0), Error);
    EXPECT_THROW(dwt(std::vector<double>(64, 1.0), f, 6), Error);
    EXPECT_NO_THROW(dwt(std::vector<double>(64, 1.0), f, 5));
}
