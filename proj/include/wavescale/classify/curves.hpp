#pragma once

// Repeated split -> standardize -> search -> fit -> score runs, aggregated
// per feature count (successive-feature curves and the PCA baseline).

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "wavescale/classify/models.hpp"
#include "wavescale/classify/pca.hpp"
#include "wavescale/classify/search.hpp"
#include "wavescale/classify/validation.hpp"
#include "wavescale/parallel.hpp"
#include "wavescale/rng.hpp"

namespace wavescale::classify {

struct CurveOptions {
    int repeats = 4;
    int budget = 32;
    int folds = 10;
    double test_frac = 0.2;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

struct RepeatResult {
    std::uint64_t split_seed = 0;
    double train_acc = 0.0;
    double test_acc = 0.0;
    double cv_score = 0.0;
    std::string spec;
    std::string error;  // non-empty when this repeat could not be fitted
};

struct EvalReport {
    std::string mqp;
    std::string family;
    std::string feature_set;  // "descriptors" or "pca"
    int feature_count = 0;
    std::vector<std::string> features;
    double train_acc_mean = 0.0;
    double train_acc_std = 0.0;
    double test_acc_mean = 0.0;
    double test_acc_std = 0.0;
    int repeats = 0;
    std::vector<RepeatResult> runs;
};

inline std::uint64_t repeat_seed(std::uint64_t master, int repeat) {
    return derive_seed(master, static_cast<std::uint64_t>(repeat));
}

namespace detail {

inline void summarize(EvalReport& r) {
    std::vector<double> tr, te;
    for (const auto& run : r.runs) {
        tr.push_back(run.train_acc);
        te.push_back(run.test_acc);
    }
    auto mean_std = [](const std::vector<double>& v, double& m, double& s) {
        m = 0.0;
        for (double x : v) m += x;
        m /= static_cast<double>(v.size());
        s = 0.0;
        if (v.size() > 1) {
            for (double x : v) s += (x - m) * (x - m);
            s = std::sqrt(s / static_cast<double>(v.size() - 1));
        }
    };
    mean_std(tr, r.train_acc_mean, r.train_acc_std);
    mean_std(te, r.test_acc_mean, r.test_acc_std);
    r.repeats = static_cast<int>(r.runs.size());
}

inline Matrix take_cols(const Matrix& x, const std::vector<std::size_t>& cols) {
    Matrix out(x.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = x.col(static_cast<Eigen::Index>(cols[j]));
    return out;
}

// Train/test matrices already restricted to the chosen features.
inline RepeatResult evaluate_split(const Matrix& xtr_raw, const Labels& ytr, const Matrix& xte_raw,
                                   const Labels& yte, ModelFamily family, const CurveOptions& opts,
                                   std::uint64_t split_seed, int classes) {
    RepeatResult r;
    r.split_seed = split_seed;
    try {
        const auto scaler = Standardizer::fit(xtr_raw);
        const Matrix xtr = scaler.apply(xtr_raw);
        const Matrix xte = scaler.apply(xte_raw);
        const auto search = hyperparam_search(xtr, ytr, family, opts.budget, derive_seed(split_seed, 0x5ea7c4),
                                              opts.folds, classes);
        const auto model = fit(search.best, xtr, ytr, classes);
        r.cv_score = search.best_score;
        r.spec = search.best.describe();
        r.train_acc = accuracy(ytr, model.predict(xtr));
        r.test_acc = accuracy(yte, model.predict(xte));
    } catch (const Error& e) {
        r.error = e.what();
    }
    return r;
}

}  // namespace detail

// One repeat on a fixed feature subset.
inline RepeatResult evaluate_features(const Matrix& x, const Labels& y, const std::vector<std::size_t>& features,
                                      ModelFamily family, const CurveOptions& opts, int repeat, int classes = 0) {
    if (classes <= 0) classes = detail::class_count(y);
    const auto seed = repeat_seed(opts.seed, repeat);
    const auto split = stratified_split(y, opts.test_frac, seed);
    const Matrix sub = detail::take_cols(x, features);
    return detail::evaluate_split(take_rows(sub, split.train), take_labels(y, split.train), take_rows(sub, split.test),
                                  take_labels(y, split.test), family, opts, seed, classes);
}

// Adds the features in `order` one at a time; report k uses order[0..k).
inline std::vector<EvalReport> feature_curve(const Matrix& x, const Labels& y, const std::vector<std::size_t>& order,
                                             const std::vector<std::string>& names, ModelFamily family,
                                             const CurveOptions& opts, const std::string& mqp = "") {
    if (order.empty()) throw Error("feature curve needs a non-empty feature order");
    const int classes = detail::class_count(y);
    const std::size_t kmax = order.size();
    const auto reps = static_cast<std::size_t>(opts.repeats);
    std::vector<RepeatResult> runs(kmax * reps);
    parallel_for(
        runs.size(),
        [&](std::size_t job) {
            const std::size_t k = job / reps + 1;
            const int r = static_cast<int>(job % reps);
            const std::vector<std::size_t> feats(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
            runs[job] = evaluate_features(x, y, feats, family, opts, r, classes);
        },
        opts.threads);
    std::vector<EvalReport> out;
    for (std::size_t k = 1; k <= kmax; ++k) {
        EvalReport rep;
        rep.mqp = mqp;
        rep.family = std::string(to_string(family));
        rep.feature_set = "descriptors";
        rep.feature_count = static_cast<int>(k);
        for (std::size_t j = 0; j < k; ++j) rep.features.push_back(names.at(order[j]));
        for (std::size_t r = 0; r < reps; ++r) rep.runs.push_back(runs[(k - 1) * reps + r]);
        detail::summarize(rep);
        out.push_back(std::move(rep));
    }
    return out;
}

// PCA baseline: components fitted on each repeat's training rows only.
inline std::vector<EvalReport> pca_curve(const Matrix& x, const Labels& y, int max_components, ModelFamily family,
                                         const CurveOptions& opts, const std::string& mqp = "") {
    const int classes = detail::class_count(y);
    const auto reps = static_cast<std::size_t>(opts.repeats);
    struct Prepared {
        Matrix train, test;
        Labels ytr, yte;
        std::uint64_t seed = 0;
    };
    std::vector<Prepared> prep(reps);
    int kmax = max_components;
    for (std::size_t r = 0; r < reps; ++r) {
        const auto seed = repeat_seed(opts.seed, static_cast<int>(r));
        const auto split = stratified_split(y, opts.test_frac, seed);
        const Matrix xtr = take_rows(x, split.train);
        kmax = static_cast<int>(std::min<Eigen::Index>({kmax, xtr.rows() - 1, xtr.cols()}));
        prep[r].seed = seed;
        prep[r].ytr = take_labels(y, split.train);
        prep[r].yte = take_labels(y, split.test);
        prep[r].train = xtr;
        prep[r].test = take_rows(x, split.test);
    }
    if (kmax < 1) throw Error("pca curve: no components available");
    for (auto& p : prep) {
        const auto proj = pca_fit(p.train, kmax);
        p.train = pca_transform(proj, p.train);
        p.test = pca_transform(proj, p.test);
    }
    const auto km = static_cast<std::size_t>(kmax);
    std::vector<RepeatResult> runs(km * reps);
    parallel_for(
        runs.size(),
        [&](std::size_t job) {
            const auto k = static_cast<Eigen::Index>(job / reps + 1);
            const auto& p = prep[job % reps];
            runs[job] = detail::evaluate_split(p.train.leftCols(k), p.ytr, p.test.leftCols(k), p.yte, family, opts,
                                               p.seed, classes);
        },
        opts.threads);
    std::vector<EvalReport> out;
    for (std::size_t k = 1; k <= km; ++k) {
        EvalReport rep;
        rep.mqp = mqp;
        rep.family = std::string(to_string(family));
        rep.feature_set = "pca";
        rep.feature_count = static_cast<int>(k);
        for (std::size_t j = 0; j < k; ++j) rep.features.push_back("PC" + std::to_string(j + 1));
        for (std::size_t r = 0; r < reps; ++r) rep.runs.push_back(runs[(k - 1) * reps + r]);
        detail::summarize(rep);
        out.push_back(std::move(rep));
    }
    return out;
}

}  // namespace wavescale::classify
