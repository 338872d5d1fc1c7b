#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "wavescale/classify/models.hpp"
#include "wavescale/descriptors.hpp"
#include "wavescale/error.hpp"
#include "wavescale/rng.hpp"

namespace wavescale::pipeline {

enum class SpectrumMode { Transmittance, Absorbance };

inline std::string to_string(SpectrumMode m) { return m == SpectrumMode::Transmittance ? "transmittance" : "absorbance"; }

inline SpectrumMode mode_from_string(const std::string& s) {
    if (s == "transmittance") return SpectrumMode::Transmittance;
    if (s == "absorbance") return SpectrumMode::Absorbance;
    throw Error("unknown spectrum mode '" + s + "' (transmittance|absorbance)");
}

// The eighteen trait ids accepted in trait files.
inline const std::vector<std::string>& known_traits() {
    static const std::vector<std::string> ids = {"RCT",    "k20",    "a30",  "a60",  "CMS",   "pH",
                                                 "HS",     "aS1-CN", "aS2-CN", "b-CN", "k-CN",  "a-LA",
                                                 "b-LGA",  "b-LGB",  "TLC",  "TUC",  "TFC",   "TPC"};
    return ids;
}

// Traits split into quartiles; every other trait is split at the median.
inline bool uses_quartiles(const std::string& trait) {
    static const std::vector<std::string> q = {"aS1-CN", "aS2-CN", "b-CN", "k-CN", "a-LA", "b-LGA", "b-LGB", "TPC"};
    for (const auto& t : q) {
        if (t == trait) return true;
    }
    return false;
}

struct RunConfig {
    DescriptorConfig descriptors{};
    std::size_t truncate_length = 1024;
    SpectrumMode input_mode = SpectrumMode::Transmittance;
    SpectrumMode analyze_mode = SpectrumMode::Absorbance;
    std::uint64_t seed = 42;
    int repeats = 4;
    int search_budget = 32;
    int cv_folds = 10;
    double test_fraction = 0.2;
    std::vector<std::string> families = {"KNN", "GNB", "LDA", "QDA", "Logit", "LinearSVM", "PLSDA"};
    std::vector<std::string> traits = known_traits();
    int pca_max_components = 20;
    bool pca_baseline = true;
    double outlier_sigma = 3.0;
    std::size_t min_category_size = 5;
    bool ks_on_kde = false;
    unsigned threads = 0;
    std::string output_dir = "out";

    std::vector<classify::ModelFamily> model_families() const {
        std::vector<classify::ModelFamily> out;
        for (const auto& f : families) out.push_back(classify::family_from_string(f));
        return out;
    }

    void validate() const {
        filter_from_id(descriptors.wavelet);
        if (descriptors.window.j_min >= descriptors.window.j_max) throw Error("config: slope window is empty");
        if (descriptors.multifractal.fallback_qmax > descriptors.multifractal.primary_qmax) {
            throw Error("config: fallback q range wider than primary");
        }
        if (!is_power_of_two(truncate_length) || truncate_length < 256) {
            throw Error("config: truncate_length must be a power of two >= 256");
        }
        if (repeats < 1 || search_budget < 1 || cv_folds < 2) throw Error("config: repeats/budget/folds out of range");
        if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw Error("config: test_fraction must lie in (0, 1)");
        if (ks_on_kde) throw Error("config: ks_on_kde=true is not supported; KS runs on raw samples");
        model_families();
    }
};

inline nlohmann::ordered_json to_json(const RunConfig& c) {
    const auto& d = c.descriptors;
    const auto& m = d.multifractal;
    nlohmann::ordered_json j;
    j["wavelet"] = d.wavelet;
    j["j0"] = d.j0;
    j["slope_window"] = {d.window.j_min, d.window.j_max};
    j["q_primary_max"] = m.primary_qmax;
    j["q_fallback_max"] = m.fallback_qmax;
    j["q_step"] = m.q_step;
    j["r2_threshold"] = m.r2_threshold;
    j["alpha_monotone_tol"] = m.alpha_monotone_tol;
    j["cut_level"] = d.cut_level;
    j["detrend_endpoints"] = d.detrend_endpoints;
    j["truncate_length"] = c.truncate_length;
    j["input_mode"] = to_string(c.input_mode);
    j["analyze_mode"] = to_string(c.analyze_mode);
    j["seed"] = c.seed;
    j["rng"] = std::string(kRngIdentity);
    j["repeats"] = c.repeats;
    j["search_budget"] = c.search_budget;
    j["cv_folds"] = c.cv_folds;
    j["test_fraction"] = c.test_fraction;
    j["families"] = c.families;
    j["traits"] = c.traits;
    j["pca_max_components"] = c.pca_max_components;
    j["pca_baseline"] = c.pca_baseline;
    j["outlier_sigma"] = c.outlier_sigma;
    j["min_category_size"] = c.min_category_size;
    j["ks_on_kde"] = c.ks_on_kde;
    j["standardize_features"] = true;
    j["output_dir"] = c.output_dir;
    return j;
}

// Missing keys keep their defaults; unknown keys are rejected.
inline RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig c;
    auto& d = c.descriptors;
    auto& m = d.multifractal;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& k = it.key();
        const auto& v = it.value();
        try {
            if (k == "wavelet") d.wavelet = v.get<std::string>();
            else if (k == "j0") d.j0 = v.get<int>();
            else if (k == "slope_window") d.window = {v.at(0).get<int>(), v.at(1).get<int>()};
            else if (k == "q_primary_max") m.primary_qmax = v.get<double>();
            else if (k == "q_fallback_max") m.fallback_qmax = v.get<double>();
            else if (k == "q_step") m.q_step = v.get<double>();
            else if (k == "r2_threshold") m.r2_threshold = v.get<double>();
            else if (k == "alpha_monotone_tol") m.alpha_monotone_tol = v.get<double>();
            else if (k == "cut_level") d.cut_level = v.get<double>();
            else if (k == "detrend_endpoints") d.detrend_endpoints = v.get<bool>();
            else if (k == "truncate_length") c.truncate_length = v.get<std::size_t>();
            else if (k == "input_mode") c.input_mode = mode_from_string(v.get<std::string>());
            else if (k == "analyze_mode") c.analyze_mode = mode_from_string(v.get<std::string>());
            else if (k == "seed") c.seed = v.get<std::uint64_t>();
            else if (k == "repeats") c.repeats = v.get<int>();
            else if (k == "search_budget") c.search_budget = v.get<int>();
            else if (k == "cv_folds") c.cv_folds = v.get<int>();
            else if (k == "test_fraction") c.test_fraction = v.get<double>();
            else if (k == "families") c.families = v.get<std::vector<std::string>>();
            else if (k == "traits") c.traits = v.get<std::vector<std::string>>();
            else if (k == "pca_max_components") c.pca_max_components = v.get<int>();
            else if (k == "pca_baseline") c.pca_baseline = v.get<bool>();
            else if (k == "outlier_sigma") c.outlier_sigma = v.get<double>();
            else if (k == "min_category_size") c.min_category_size = v.get<std::size_t>();
            else if (k == "ks_on_kde") c.ks_on_kde = v.get<bool>();
            else if (k == "threads") c.threads = v.get<unsigned>();
            else if (k == "output_dir") c.output_dir = v.get<std::string>();
            else if (k == "rng" || k == "standardize_features") continue;  // informational
            else throw Error("unknown config key '" + k + "'");
        } catch (const nlohmann::json::exception& e) {
            throw Error("config key '" + k + "': " + e.what());
        }
    }
    c.validate();
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file '" + path + "'");
    try {
        return config_from_json(nlohmann::json::parse(in, nullptr, true, true));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("config file '" + path + "': " + e.what());
    }
}

}  // namespace wavescale::pipeline
