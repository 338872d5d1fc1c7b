#pragma once

// Gaussian KDE for plotting, the two-sample Kolmogorov-Smirnov test, and
// ranking of descriptors by KS p-value between trait categories.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wavescale/descriptors.hpp"
#include "wavescale/detail/quantile.hpp"
#include "wavescale/error.hpp"

namespace wavescale {

struct KdeEstimate {
    std::vector<double> grid;
    std::vector<double> density;
    double bandwidth = 0.0;
};

struct KsResult {
    double d_stat = 0.0;
    double p_value = 1.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
};

struct RankedDescriptor {
    std::string name;
    std::size_t index = 0;  // position in the canonical descriptor order
    double p_value = 1.0;   // single test, or mean over category pairs
};

struct DescriptorRanking {
    std::string mqp;
    std::vector<RankedDescriptor> ordered;
    std::vector<int> categories_used;
    std::vector<std::string> warnings;

    std::vector<std::size_t> feature_order() const {
        std::vector<std::size_t> out;
        for (const auto& r : ordered) out.push_back(r.index);
        return out;
    }
};

inline double silverman_bandwidth(const std::vector<double>& x) {
    const double sd = detail::sample_std(x);
    std::vector<double> sorted = x;
    std::sort(sorted.begin(), sorted.end());
    const double iqr = detail::quantile_sorted(sorted, 0.75) - detail::quantile_sorted(sorted, 0.25);
    const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
    return 0.9 * spread * std::pow(static_cast<double>(x.size()), -0.2);
}

inline KdeEstimate kde(std::span<const double> samples, std::optional<double> bandwidth = std::nullopt,
                       std::size_t grid_points = 512) {
    if (samples.size() < 2) throw Error("kde needs at least 2 samples");
    std::vector<double> x(samples.begin(), samples.end());
    const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
    if (*mn == *mx) throw Error("degenerate sample: zero variance");
    const double h = bandwidth ? *bandwidth : silverman_bandwidth(x);
    if (!(h > 0.0)) throw Error("kde bandwidth must be positive");
    KdeEstimate est;
    est.bandwidth = h;
    const double lo = *mn - 3.0 * h;
    const double hi = *mx + 3.0 * h;
    const double norm = 1.0 / (static_cast<double>(x.size()) * h * std::sqrt(2.0 * std::numbers::pi));
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double g = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_points - 1);
        double acc = 0.0;
        for (double v : x) {
            const double z = (g - v) / h;
            acc += std::exp(-0.5 * z * z);
        }
        est.grid.push_back(g);
        est.density.push_back(acc * norm);
    }
    return est;
}

// Kolmogorov survival function Q(l) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 l^2).
inline double kolmogorov_q(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 1.18) {
        // Dual (Jacobi theta) series converges fast for small lambda.
        const double pi2 = std::numbers::pi * std::numbers::pi;
        double sum = 0.0;
        for (int k = 1; k <= 20; ++k) {
            const double odd = 2.0 * k - 1.0;
            sum += std::exp(-odd * odd * pi2 / (8.0 * lambda * lambda));
        }
        return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum, 0.0, 1.0);
    }
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-17) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

// p from the asymptotic Kolmogorov distribution at lambda = sqrt(n_e) * D.
// `stephens` applies lambda = (sqrt(n_e) + 0.12 + 0.11 / sqrt(n_e)) * D, which
// undershoots the exact tail by up to 0.07 at n1 = n2 = 20.
inline KsResult ks_two_sample(std::span<const double> x, std::span<const double> y, bool stephens = false) {
    if (x.empty() || y.empty()) throw Error("ks test needs non-empty samples");
    std::vector<double> a(x.begin(), x.end());
    std::vector<double> b(y.begin(), y.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    KsResult r;
    r.d_stat = d;
    r.n1 = a.size();
    r.n2 = b.size();
    const double ne = std::sqrt(na * nb / (na + nb));
    r.p_value = kolmogorov_q((stephens ? ne + 0.12 + 0.11 / ne : ne) * d);
    return r;
}

inline constexpr std::size_t kMinCategorySize = 5;

// rows: one descriptor record per sample; labels: category id per sample.
// Non-finite descriptor values are left out of that descriptor's tests.
inline DescriptorRanking rank_descriptors(std::span<const std::array<double, kDescriptorCount>> rows,
                                          std::span<const int> labels, const std::string& mqp,
                                          std::size_t min_size = kMinCategorySize) {
    if (rows.size() != labels.size()) throw Error("descriptor rows and labels differ in length");
    DescriptorRanking ranking;
    ranking.mqp = mqp;
    std::map<int, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
    for (const auto& [cat, idx] : members) {
        if (idx.size() < min_size) {
            ranking.warnings.push_back("category " + std::to_string(cat) + " has " + std::to_string(idx.size()) +
                                       " samples (< " + std::to_string(min_size) + "), excluded");
            continue;
        }
        ranking.categories_used.push_back(cat);
    }
    if (ranking.categories_used.size() < 2) {
        throw Error("ranking for " + mqp + " needs at least 2 categories with " + std::to_string(min_size) +
                    "+ samples");
    }
    for (std::size_t d = 0; d < kDescriptorCount; ++d) {
        std::vector<std::vector<double>> groups;
        for (int cat : ranking.categories_used) {
            std::vector<double> g;
            for (std::size_t i : members[cat]) {
                if (std::isfinite(rows[i][d])) g.push_back(rows[i][d]);
            }
            groups.push_back(std::move(g));
        }
        double total = 0.0;
        std::size_t pairs = 0;
        for (std::size_t a = 0; a < groups.size(); ++a) {
            for (std::size_t b = a + 1; b < groups.size(); ++b) {
                ++pairs;
                if (groups[a].size() < 2 || groups[b].size() < 2) {
                    ranking.warnings.push_back(std::string(kDescriptorNames[d]) +
                                               ": too few finite values for a pair, p set to 1");
                    total += 1.0;
                    continue;
                }
                total += ks_two_sample(groups[a], groups[b]).p_value;
            }
        }
        ranking.ordered.push_back({std::string(kDescriptorNames[d]), d, total / static_cast<double>(pairs)});
    }
    std::stable_sort(ranking.ordered.begin(), ranking.ordered.end(),
                     [](const RankedDescriptor& a, const RankedDescriptor& b) { return a.p_value < b.p_value; });
    return ranking;
}

}  // namespace wavescale
