#pragma once

// Cleaning steps, applied in this order by the experiment driver:
// zero-removal, per-animal averaging, per-channel standardization,
// trait outlier filtering. Then categorization and power-of-two truncation.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "wavescale/detail/quantile.hpp"
#include "wavescale/error.hpp"
#include "wavescale/pipeline/table_io.hpp"

namespace wavescale::pipeline {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

struct StageCount {
    std::string stage;
    std::size_t in = 0;
    std::size_t used = 0;
    std::size_t dropped = 0;
    std::string detail;
};

inline SpectraTable to_absorbance(const SpectraTable& t) {
    if (t.mode != SpectrumMode::Transmittance) throw Error("to_absorbance: table is not in transmittance mode");
    SpectraTable out = t;
    for (std::size_t i = 0; i < t.samples(); ++i) {
        for (std::size_t c = 0; c < t.channels(); ++c) {
            const double v = t.values[i][c];
            if (!(v > 0.0)) {
                throw Error("to_absorbance: transmittance " + fmt_num(v) + " <= 0 at sample " + t.sample_id[i] +
                            " (row " + std::to_string(i + 1) + "), channel " + std::to_string(c + 1));
            }
            out.values[i][c] = -std::log10(v);
        }
    }
    out.mode = SpectrumMode::Absorbance;
    return out;
}

inline SpectraTable to_transmittance(const SpectraTable& t) {
    if (t.mode != SpectrumMode::Absorbance) throw Error("to_transmittance: table is not in absorbance mode");
    SpectraTable out = t;
    for (auto& row : out.values) {
        for (double& v : row) v = std::pow(10.0, -v);
    }
    out.mode = SpectrumMode::Transmittance;
    return out;
}

// Zero trait values are unrecorded measurements; they become missing.
inline TraitTable remove_zero_traits(const TraitTable& t, StageCount* count = nullptr) {
    TraitTable out = t;
    std::size_t cells = 0, zeroed = 0;
    for (auto& row : out.values) {
        for (double& v : row) {
            if (std::isnan(v)) continue;
            ++cells;
            if (v == 0.0) {
                v = kMissing;
                ++zeroed;
            }
        }
    }
    if (count) *count = {"zero_removal", cells, cells - zeroed, zeroed, "trait cells"};
    return out;
}

// Mean of the finite entries per column; NaN where a column has none.
inline std::vector<double> finite_mean(const std::vector<const std::vector<double>*>& rows, std::size_t width) {
    std::vector<double> sum(width, 0.0);
    std::vector<std::size_t> n(width, 0);
    for (const auto* r : rows) {
        for (std::size_t c = 0; c < width; ++c) {
            if (std::isfinite((*r)[c])) {
                sum[c] += (*r)[c];
                ++n[c];
            }
        }
    }
    for (std::size_t c = 0; c < width; ++c) sum[c] = n[c] ? sum[c] / static_cast<double>(n[c]) : kMissing;
    return sum;
}

struct AveragedData {
    SpectraTable spectra;  // one row per animal, sample_id = animal_id
    TraitTable traits;     // same animal order
    std::vector<std::vector<double>> extra;  // per-animal mean of per-sample extra rows
    std::vector<std::string> log;
};

// Joins spectra and traits on animal_id and averages each animal's rows.
// `extra` holds optional per-sample rows (e.g. descriptor records) that are
// averaged alongside the spectra.
inline AveragedData clean_and_average(const SpectraTable& spectra, const TraitTable& traits,
                                      const std::vector<std::vector<double>>& extra = {},
                                      StageCount* count = nullptr) {
    if (!extra.empty() && extra.size() != spectra.samples()) throw Error("averaging: extra rows do not match samples");
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::size_t>> by_animal;
    for (std::size_t i = 0; i < spectra.samples(); ++i) {
        auto& v = by_animal[spectra.animal_id[i]];
        if (v.empty()) order.push_back(spectra.animal_id[i]);
        v.push_back(i);
    }
    std::map<std::string, std::vector<std::size_t>> trait_rows;
    for (std::size_t i = 0; i < traits.rows(); ++i) trait_rows[traits.animal_id[i]].push_back(i);

    AveragedData out;
    out.spectra.wavenumbers = spectra.wavenumbers;
    out.spectra.mode = spectra.mode;
    out.traits.traits = traits.traits;
    std::size_t dropped_samples = 0;
    for (const auto& animal : order) {
        const auto& idx = by_animal[animal];
        const auto tr = trait_rows.find(animal);
        if (tr == trait_rows.end()) {
            out.log.push_back("animal " + animal + ": no trait row, " + std::to_string(idx.size()) + " sample(s) dropped");
            dropped_samples += idx.size();
            continue;
        }
        std::vector<const std::vector<double>*> srows, trows, xrows;
        for (auto i : idx) {
            srows.push_back(&spectra.values[i]);
            if (!extra.empty()) xrows.push_back(&extra[i]);
        }
        for (auto i : tr->second) trows.push_back(&traits.values[i]);
        out.spectra.sample_id.push_back(animal);
        out.spectra.animal_id.push_back(animal);
        out.spectra.values.push_back(finite_mean(srows, spectra.channels()));
        out.traits.animal_id.push_back(animal);
        out.traits.values.push_back(finite_mean(trows, traits.traits.size()));
        if (!extra.empty()) out.extra.push_back(finite_mean(xrows, extra.front().size()));
    }
    for (const auto& [animal, rows] : trait_rows) {
        if (!by_animal.contains(animal)) out.log.push_back("animal " + animal + ": traits without spectra, ignored");
    }
    if (count) {
        *count = {"averaging", spectra.samples(), spectra.samples() - dropped_samples, dropped_samples,
                  std::to_string(out.spectra.samples()) + " animals"};
    }
    return out;
}

struct StandardizeResult {
    SpectraTable table;
    std::vector<std::size_t> constant_channels;  // centred only
};

// Per-channel z-score with the sample (n - 1) standard deviation.
inline StandardizeResult standardize(const SpectraTable& t) {
    if (t.samples() < 2) throw Error("standardize: need at least 2 samples");
    StandardizeResult r;
    r.table = t;
    const auto n = static_cast<double>(t.samples());
    for (std::size_t c = 0; c < t.channels(); ++c) {
        double mean = 0.0;
        for (const auto& row : t.values) mean += row[c];
        mean /= n;
        double ss = 0.0;
        for (const auto& row : t.values) ss += (row[c] - mean) * (row[c] - mean);
        const double sd = std::sqrt(ss / (n - 1.0));
        if (sd == 0.0) r.constant_channels.push_back(c);
        for (auto& row : r.table.values) row[c] = sd > 0.0 ? (row[c] - mean) / sd : row[c] - mean;
    }
    return r;
}

// Single pass per trait: values with |x - mean| > sigma * std (n - 1) become missing.
inline TraitTable filter_trait_outliers(const TraitTable& t, double sigma = 3.0, std::vector<StageCount>* counts = nullptr) {
    TraitTable out = t;
    for (std::size_t k = 0; k < t.traits.size(); ++k) {
        std::vector<double> vals;
        for (const auto& row : t.values) {
            if (std::isfinite(row[k])) vals.push_back(row[k]);
        }
        std::size_t dropped = 0;
        if (vals.size() >= 3) {
            const double m = wavescale::detail::mean(vals);
            const double sd = wavescale::detail::sample_std(vals);
            for (auto& row : out.values) {
                if (std::isfinite(row[k]) && std::abs(row[k] - m) > sigma * sd) {
                    row[k] = kMissing;
                    ++dropped;
                }
            }
        }
        if (counts) counts->push_back({"outlier_filter", vals.size(), vals.size() - dropped, dropped, t.traits[k]});
    }
    return out;
}

inline std::vector<double> filter_outliers(const std::vector<double>& x, double sigma = 3.0) {
    TraitTable t;
    t.traits = {"x"};
    for (double v : x) {
        t.animal_id.emplace_back();
        t.values.push_back({v});
    }
    const auto f = filter_trait_outliers(t, sigma);
    std::vector<double> out;
    for (const auto& row : f.values) {
        if (std::isfinite(row[0])) out.push_back(row[0]);
    }
    return out;
}

enum class CategoryScheme { Median, Quartile };

// Category per value (-1 for missing). Values equal to a cut point go to the
// lower category. Cut points are type-7 quantiles of the finite values.
inline std::vector<int> categorize(std::span<const double> values, CategoryScheme scheme) {
    std::vector<double> finite;
    for (double v : values) {
        if (std::isfinite(v)) finite.push_back(v);
    }
    if (finite.size() < 2) throw Error("categorize: fewer than 2 values");
    std::sort(finite.begin(), finite.end());
    if (finite.front() == finite.back()) throw Error("categorize: degenerate trait (all values equal)");
    std::vector<double> cuts;
    if (scheme == CategoryScheme::Median) {
        cuts = {wavescale::detail::quantile_sorted(finite, 0.5)};
    } else {
        cuts = {wavescale::detail::quantile_sorted(finite, 0.25), wavescale::detail::quantile_sorted(finite, 0.5),
                wavescale::detail::quantile_sorted(finite, 0.75)};
    }
    std::vector<int> labels;
    for (double v : values) {
        if (!std::isfinite(v)) {
            labels.push_back(-1);
            continue;
        }
        int c = 0;
        while (c < static_cast<int>(cuts.size()) && v > cuts[static_cast<std::size_t>(c)]) ++c;
        labels.push_back(c);
    }
    return labels;
}

inline CategoryScheme scheme_for(const std::string& trait) {
    return uses_quartiles(trait) ? CategoryScheme::Quartile : CategoryScheme::Median;
}

inline std::vector<std::string> category_names(CategoryScheme s) {
    if (s == CategoryScheme::Median) return {"Q Low", "Q High"};
    return {"Q1", "Q2", "Q3", "Q4"};
}

inline std::vector<double> truncate_pow2(std::span<const double> spectrum, std::size_t len = 1024) {
    if (!is_power_of_two(len)) throw Error("truncation length must be a power of two");
    if (spectrum.size() < len) {
        throw Error("spectrum has " + std::to_string(spectrum.size()) + " channels, need " + std::to_string(len));
    }
    return {spectrum.begin(), spectrum.begin() + static_cast<std::ptrdiff_t>(len)};
}

}  // namespace wavescale::pipeline
