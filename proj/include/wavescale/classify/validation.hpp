#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "wavescale/classify/models.hpp"
#include "wavescale/error.hpp"
#include "wavescale/rng.hpp"

namespace wavescale::classify {

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Per-feature z-score with statistics from the rows it was fitted on.
// Zero-variance features are centred only.
struct Standardizer {
    Vector mean;
    Vector scale;

    static Standardizer fit(const Matrix& x) {
        Standardizer s;
        s.mean = x.colwise().mean();
        s.scale = Vector::Ones(x.cols());
        if (x.rows() > 1) {
            const Matrix c = x.rowwise() - s.mean.transpose();
            for (Eigen::Index j = 0; j < x.cols(); ++j) {
                const double sd = std::sqrt(c.col(j).squaredNorm() / static_cast<double>(x.rows() - 1));
                if (sd > 0.0) s.scale(j) = sd;
            }
        }
        return s;
    }

    Matrix apply(const Matrix& x) const {
        return ((x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array()).matrix();
    }
};

inline Matrix take_rows(const Matrix& x, const std::vector<std::size_t>& rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
    return out;
}

inline Labels take_labels(const Labels& y, const std::vector<std::size_t>& rows) {
    Labels out;
    out.reserve(rows.size());
    for (auto r : rows) out.push_back(y[r]);
    return out;
}

// Per class: n_test = round(frac * n_c), clamped to [1, n_c - 1].
inline Split stratified_split(const Labels& y, double test_frac, std::uint64_t seed) {
    if (!(test_frac > 0.0 && test_frac < 1.0)) throw Error("test fraction must lie in (0, 1)");
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < y.size(); ++i) groups[y[i]].push_back(i);
    CounterRng rng(seed);
    Split s;
    for (auto& [label, idx] : groups) {
        if (idx.size() < 2) throw Error("stratified split: class " + std::to_string(label) + " has a single sample");
        rng.shuffle(idx);
        const auto n = static_cast<double>(idx.size());
        auto n_test = static_cast<std::size_t>(std::llround(test_frac * n));
        n_test = std::clamp<std::size_t>(n_test, 1, idx.size() - 1);
        s.test.insert(s.test.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
        s.train.insert(s.train.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
    }
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

// Fold id per sample: each class is shuffled and dealt round-robin, with the
// dealing position carried across classes so fold sizes stay balanced.
inline std::vector<int> stratified_folds(const Labels& y, int k, std::uint64_t seed) {
    if (k < 2) throw Error("k-fold needs k >= 2");
    if (y.size() < static_cast<std::size_t>(k)) {
        throw Error("k-fold: " + std::to_string(y.size()) + " samples for " + std::to_string(k) + " folds");
    }
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < y.size(); ++i) groups[y[i]].push_back(i);
    CounterRng rng(seed);
    std::vector<int> fold(y.size(), 0);
    std::size_t pos = 0;
    for (auto& [label, idx] : groups) {
        rng.shuffle(idx);
        for (auto i : idx) fold[i] = static_cast<int>(pos++ % static_cast<std::size_t>(k));
    }
    return fold;
}

// Mean held-out accuracy over stratified folds. Each fold is standardized with
// its own training statistics; a fold whose fit fails scores 0.
inline double kfold_cv(const Matrix& x, const Labels& y, const ModelSpec& spec, int k, std::uint64_t seed,
                       int classes = 0) {
    if (classes <= 0) classes = detail::class_count(y);
    const auto fold = stratified_folds(y, k, seed);
    double total = 0.0;
    for (int f = 0; f < k; ++f) {
        Split s;
        for (std::size_t i = 0; i < y.size(); ++i) (fold[i] == f ? s.test : s.train).push_back(i);
        if (s.test.empty()) continue;
        const Matrix xtr = take_rows(x, s.train);
        const auto scaler = Standardizer::fit(xtr);
        try {
            const auto model = fit(spec, scaler.apply(xtr), take_labels(y, s.train), classes);
            total += accuracy(take_labels(y, s.test), model.predict(scaler.apply(take_rows(x, s.test))));
        } catch (const Error&) {
            // Scored as 0 for this fold.
        }
    }
    return total / static_cast<double>(k);
}

}  // namespace wavescale::classify
