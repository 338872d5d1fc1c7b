#pragma once

#include <cmath>
#include <cstdint>
#include <tuple>
#include <utility>
#include <vector>

#include "wavescale/classify/models.hpp"
#include "wavescale/classify/validation.hpp"
#include "wavescale/rng.hpp"

namespace wavescale::classify {

struct SearchResult {
    ModelSpec best;
    double best_score = -1.0;
    std::vector<std::pair<ModelSpec, double>> trials;
};

inline ModelSpec sample_spec(ModelFamily family, int features, CounterRng& rng) {
    ModelSpec s;
    s.family = family;
    auto log_uniform = [&](double lo, double hi) { return std::exp(std::log(lo) + rng.uniform() * (std::log(hi) - std::log(lo))); };
    switch (family) {
        case ModelFamily::KNN:
            s.n_neighbors = 1 + static_cast<int>(rng.below(25));
            s.p = rng.below(2) == 0 ? 1 : 2;
            break;
        case ModelFamily::LDA: s.shrinkage = rng.uniform(); break;
        case ModelFamily::Logit:
            s.C = log_uniform(1e-3, 1e3);
            s.l1_ratio = rng.uniform();
            break;
        case ModelFamily::LinearSVM: s.C = log_uniform(1e-3, 1e3); break;
        case ModelFamily::PLSDA:
            s.n_components = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::max(1, std::min(12, features)))));
            break;
        case ModelFamily::GNB:
        case ModelFamily::QDA: break;
    }
    return s;
}

// Lexicographic complexity key; smaller is simpler.
inline std::tuple<double, double> complexity(const ModelSpec& s) {
    switch (s.family) {
        case ModelFamily::KNN: return {-static_cast<double>(s.n_neighbors), s.p == 2 ? 0.0 : 1.0};
        case ModelFamily::LDA: return {-s.shrinkage, 0.0};
        case ModelFamily::Logit: return {s.C, -s.l1_ratio};
        case ModelFamily::LinearSVM: return {s.C, 0.0};
        case ModelFamily::PLSDA: return {static_cast<double>(s.n_components), 0.0};
        case ModelFamily::GNB:
        case ModelFamily::QDA: break;
    }
    return {0.0, 0.0};
}

inline bool has_hyperparameters(ModelFamily f) noexcept { return f != ModelFamily::GNB && f != ModelFamily::QDA; }

// Seeded random search scored by stratified k-fold CV. All candidates share
// the same folds. Families without hyperparameters are evaluated once.
inline SearchResult hyperparam_search(const Matrix& x, const Labels& y, ModelFamily family, int budget,
                                      std::uint64_t seed, int folds = 10, int classes = 0) {
    if (budget < 1) throw Error("search budget must be >= 1");
    const std::uint64_t fold_seed = derive_seed(seed, 0);
    CounterRng rng(seed, 1);
    const int trials = has_hyperparameters(family) ? budget : 1;
    SearchResult res;
    for (int t = 0; t < trials; ++t) {
        const auto spec = sample_spec(family, static_cast<int>(x.cols()), rng);
        const double score = kfold_cv(x, y, spec, folds, fold_seed, classes);
        res.trials.emplace_back(spec, score);
        const bool better = score > res.best_score + 1e-12;
        const bool tie = std::abs(score - res.best_score) <= 1e-12 && complexity(spec) < complexity(res.best);
        if (t == 0 || better || tie) {
            res.best = spec;
            res.best_score = score;
        }
    }
    return res;
}

}  // namespace wavescale::classify
