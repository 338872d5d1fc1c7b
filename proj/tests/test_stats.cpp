#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <vector>

#include "wavescale/rng.hpp"
#include "wavescale/stats.hpp"

using namespace wavescale;

// scipy.special.kolmogorov reference values.
TEST(Kolmogorov, MatchesReference) {
    const std::vector<std::pair<double, double>> ref{
        {0.3, 0.9999906941986655},  {0.5, 0.9639452436648751},  {0.8, 0.5441424115741981},
        {1.0, 0.26999967167735456}, {1.17, 0.12939004218561884}, {1.19, 0.11774229287977166},
        {1.5, 0.022217962616525127}, {2.0, 0.0006709252557796953}};
    for (const auto& [l, q] : ref) EXPECT_NEAR(kolmogorov_q(l), q, 1e-12) << l;
    EXPECT_DOUBLE_EQ(kolmogorov_q(0.0), 1.0);
    EXPECT_GE(kolmogorov_q(10.0), 0.0);
}

TEST(Kolmogorov, MonotoneDecreasing) {
    double prev = 1.0;
    for (double l = 0.05; l < 3.0; l += 0.01) {
        const double q = kolmogorov_q(l);
        EXPECT_LE(q, prev + 1e-14);
        prev = q;
    }
}

TEST(KsTwoSample, FrozenCase) {
    const std::vector<double> a{0.1, 0.4, 0.35, 0.8, 1.2, 0.05, 0.9, 0.66};
    const std::vector<double> b{0.5, 1.1, 1.3, 0.95, 1.7, 1.25, 0.7};
    const auto r = ks_two_sample(a, b);
    EXPECT_NEAR(r.d_stat, 0.5892857142857143, 1e-14);
    EXPECT_NEAR(r.p_value, 0.14954937715349195, 1e-12);
    EXPECT_NEAR(ks_two_sample(a, b, true).p_value, 0.0910448974969782, 1e-12);
    EXPECT_EQ(r.n1, 8u);
    EXPECT_EQ(r.n2, 7u);
}

TEST(KsTwoSample, IdenticalAndDisjoint) {
    const std::vector<double> a{1, 2, 3, 4, 5};
    const auto same = ks_two_sample(a, a);
    EXPECT_DOUBLE_EQ(same.d_stat, 0.0);
    EXPECT_DOUBLE_EQ(same.p_value, 1.0);
    const std::vector<double> b{10, 11, 12};
    EXPECT_DOUBLE_EQ(ks_two_sample(a, b).d_stat, 1.0);
    EXPECT_THROW(ks_two_sample(a, std::vector<double>{}), Error);
}

TEST(KsTwoSample, SymmetricAndTieAware) {
    const std::vector<double> a{1, 1, 2, 2, 3};
    const std::vector<double> b{1, 2, 2, 3, 3, 3};
    const auto ab = ks_two_sample(a, b);
    const auto ba = ks_two_sample(b, a);
    EXPECT_DOUBLE_EQ(ab.d_stat, ba.d_stat);
    EXPECT_DOUBLE_EQ(ab.p_value, ba.p_value);
    // ECDFs after the tie at 1: 2/5 vs 1/6; after 2: 4/5 vs 3/6, the largest gap.
    EXPECT_NEAR(ab.d_stat, 4.0 / 5.0 - 3.0 / 6.0, 1e-15);
}

TEST(Kde, SilvermanBandwidth) {
    const std::vector<double> x{0.1, 0.4, 0.35, 0.8, 1.2, 0.05, 0.9, 0.66};
    EXPECT_NEAR(silverman_bandwidth(x), 0.23817610143148793, 1e-14);
    EXPECT_NEAR(kde(x).bandwidth, 0.23817610143148793, 1e-14);
}

TEST(Kde, IntegratesToOne) {
    const std::vector<double> x{0.1, 0.4, 0.35, 0.8, 1.2, 0.05, 0.9, 0.66};
    const auto est = kde(x, std::nullopt, 513);
    double area = 0.0;
    for (std::size_t i = 1; i < est.grid.size(); ++i) {
        area += 0.5 * (est.density[i] + est.density[i - 1]) * (est.grid[i] - est.grid[i - 1]);
    }
    EXPECT_NEAR(area, 1.0, 3e-3);
    EXPECT_DOUBLE_EQ(est.grid.front(), 0.05 - 3.0 * est.bandwidth);
    EXPECT_DOUBLE_EQ(est.grid.back(), 1.2 + 3.0 * est.bandwidth);
}

// Grid chosen so that 0.5 is a node; reference density from the oracle script.
TEST(Kde, DensityAtPointMatchesReference) {
    const std::vector<double> x{0.1, 0.4, 0.35, 0.8, 1.2, 0.05, 0.9, 0.66};
    const double h = 0.23817610143148793;
    const double lo = 0.05 - 3.0 * h, hi = 1.2 + 3.0 * h;
    // Pick the node count so that (0.5 - lo) / step is an integer as closely as possible.
    std::size_t best_n = 0, best_i = 0;
    double best_err = 1.0;
    for (std::size_t n = 400; n < 4000; ++n) {
        const double step = (hi - lo) / static_cast<double>(n - 1);
        const double pos = (0.5 - lo) / step;
        const double err = std::abs(pos - std::round(pos)) * step;
        if (err < best_err) {
            best_err = err;
            best_n = n;
            best_i = static_cast<std::size_t>(std::llround(pos));
        }
    }
    const auto est = kde(x, h, best_n);
    ASSERT_LT(std::abs(est.grid[best_i] - 0.5), 1e-6);
    EXPECT_NEAR(est.density[best_i], 0.7653494774826816, 1e-5);
}

TEST(Kde, DegenerateSampleRejected) {
    EXPECT_THROW(kde(std::vector<double>{2.0, 2.0, 2.0}), Error);
    EXPECT_THROW(kde(std::vector<double>{2.0}), Error);
}

namespace {

using Row = std::array<double, kDescriptorCount>;

Row row_with(double shift, CounterRng& rng, std::size_t informative) {
    Row r{};
    for (std::size_t d = 0; d < kDescriptorCount; ++d) r[d] = rng.normal() + (d == informative ? shift : 0.0);
    return r;
}

}  // namespace

TEST(Ranking, InformativeDescriptorFirst) {
    CounterRng rng(4);
    std::vector<Row> rows;
    std::vector<int> labels;
    for (int i = 0; i < 60; ++i) {
        const int c = i % 2;
        rows.push_back(row_with(c == 0 ? 0.0 : 3.0, rng, 4));
        labels.push_back(c);
    }
    const auto r = rank_descriptors(rows, labels, "RCT");
    ASSERT_EQ(r.ordered.size(), kDescriptorCount);
    EXPECT_EQ(r.ordered.front().name, "SM");
    EXPECT_EQ(r.feature_order().front(), 4u);
    for (std::size_t i = 1; i < r.ordered.size(); ++i) EXPECT_LE(r.ordered[i - 1].p_value, r.ordered[i].p_value);
    EXPECT_EQ(r.categories_used, (std::vector<int>{0, 1}));
}

TEST(Ranking, MultiCategoryMeanOfPairs) {
    CounterRng rng(8);
    std::vector<Row> rows;
    std::vector<int> labels;
    for (int i = 0; i < 80; ++i) {
        const int c = i % 4;
        rows.push_back(row_with(2.0 * c, rng, 0));
        labels.push_back(c);
    }
    const auto r = rank_descriptors(rows, labels, "TPC");
    EXPECT_EQ(r.ordered.front().name, "S");
    EXPECT_EQ(r.categories_used.size(), 4u);
}

TEST(Ranking, SmallCategoriesExcluded) {
    CounterRng rng(2);
    std::vector<Row> rows;
    std::vector<int> labels;
    for (int i = 0; i < 23; ++i) {
        rows.push_back(row_with(0.0, rng, 0));
        labels.push_back(i < 10 ? 0 : (i < 20 ? 1 : 2));
    }
    const auto r = rank_descriptors(rows, labels, "TPC");
    EXPECT_EQ(r.categories_used, (std::vector<int>{0, 1}));
    EXPECT_FALSE(r.warnings.empty());
    labels.assign(23, 0);
    EXPECT_THROW(rank_descriptors(rows, labels, "TPC"), Error);
}

TEST(Ranking, TiesKeepCanonicalOrder) {
    std::vector<Row> rows;
    std::vector<int> labels;
    for (int i = 0; i < 20; ++i) {
        Row r{};
        r.fill(static_cast<double>(i % 5));
        rows.push_back(r);
        labels.push_back(i % 2);
    }
    const auto r = rank_descriptors(rows, labels, "pH");
    for (std::size_t i = 0; i < kDescriptorCount; ++i) EXPECT_EQ(r.ordered[i].index, i);
}
