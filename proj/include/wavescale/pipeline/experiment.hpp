#pragma once

// End-to-end experiment: ingest, convert, extract descriptors, clean,
// categorize each trait, rank descriptors, run classifier curves, and write
// the report bundle.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "wavescale/classify/curves.hpp"
#include "wavescale/descriptors.hpp"
#include "wavescale/mono_spectrum.hpp"
#include "wavescale/multi_spectrum.hpp"
#include "wavescale/parallel.hpp"
#include "wavescale/pipeline/config.hpp"
#include "wavescale/pipeline/preprocess.hpp"
#include "wavescale/pipeline/table_io.hpp"
#include "wavescale/stats.hpp"
#include "wavescale/synth.hpp"

namespace wavescale::pipeline {

using DescriptorRow = std::array<double, kDescriptorCount>;

struct DescriptorRecord {
    std::string id;
    std::string animal_id;
    DescriptorRow values{};
    std::uint32_t flags = 0;
    std::string note;
};

struct CategoryStats {
    std::string category;
    std::size_t n = 0;
    DescriptorRow mean{};
    DescriptorRow std{};
};

struct KdeCurve {
    std::string descriptor;
    std::string category;
    KdeEstimate kde;
};

struct TraitResult {
    std::string trait;
    std::string skipped;  // non-empty when the trait was not analysed
    std::vector<std::string> categories;
    std::vector<std::size_t> category_counts;
    std::size_t rows = 0;
    std::optional<DescriptorRanking> ranking;
    std::vector<classify::EvalReport> descriptor_curves;
    std::vector<classify::EvalReport> pca_curves;
    std::vector<CategoryStats> stats;
    std::vector<KdeCurve> kdes;
    std::vector<std::string> log;
};

struct SpectrumPlot {
    std::string sample_id;
    WaveletSpectrum mono;
    std::optional<SlopeFit> slope;
    std::optional<MultifractalSpectrum> multi;
};

struct ReportBundle {
    RunConfig config;
    std::vector<std::string> trace;
    std::vector<StageCount> accounting;
    std::vector<DescriptorRecord> sample_descriptors;
    std::vector<DescriptorRecord> animal_descriptors;
    std::vector<TraitResult> traits;
    std::optional<SpectrumPlot> example_spectrum;
    std::vector<std::string> log;
    std::size_t sample_failures = 0;
    std::size_t hard_errors = 0;
};

// Best (family, feature count) by mean test accuracy; ties go to fewer features.
inline const classify::EvalReport* best_report(const std::vector<classify::EvalReport>& curves) {
    const classify::EvalReport* best = nullptr;
    for (const auto& r : curves) {
        if (!best || r.test_acc_mean > best->test_acc_mean + 1e-12 ||
            (std::abs(r.test_acc_mean - best->test_acc_mean) <= 1e-12 && r.feature_count < best->feature_count)) {
            best = &r;
        }
    }
    return best;
}

// Best family at exactly k features.
inline const classify::EvalReport* best_at(const std::vector<classify::EvalReport>& curves, int k) {
    const classify::EvalReport* best = nullptr;
    for (const auto& r : curves) {
        if (r.feature_count != k) continue;
        if (!best || r.test_acc_mean > best->test_acc_mean + 1e-12) best = &r;
    }
    return best;
}

namespace detail {

inline bool all_finite(const DescriptorRow& r) {
    return std::all_of(r.begin(), r.end(), [](double v) { return std::isfinite(v); });
}

inline std::vector<DescriptorRecord> extract_all(const SpectraTable& t, const RunConfig& cfg, std::size_t& failures,
                                                 std::vector<std::string>& log) {
    std::vector<DescriptorRecord> out(t.samples());
    parallel_for(
        t.samples(),
        [&](std::size_t i) {
            auto& rec = out[i];
            rec.id = t.sample_id[i];
            rec.animal_id = t.animal_id[i];
            rec.values.fill(std::numeric_limits<double>::quiet_NaN());
            try {
                const auto x = truncate_pow2(t.values[i], cfg.truncate_length);
                const auto d = extract_descriptors(x, cfg.descriptors);
                rec.values = d.values();
                rec.flags = d.flags;
                rec.note = d.note;
            } catch (const Error& e) {
                rec.flags = kFlagMultifractalUnavailable;
                rec.note = e.what();
            }
        },
        cfg.threads);
    for (const auto& rec : out) {
        if (!rec.note.empty() && !all_finite(rec.values)) {
            ++failures;
            log.push_back("sample " + rec.id + ": " + rec.note);
        }
    }
    return out;
}

inline std::vector<CategoryStats> category_stats(const std::vector<DescriptorRow>& rows, const std::vector<int>& labels,
                                                 const std::vector<std::string>& names) {
    std::vector<CategoryStats> out;
    for (std::size_t c = 0; c < names.size(); ++c) {
        CategoryStats s;
        s.category = names[c];
        for (std::size_t d = 0; d < kDescriptorCount; ++d) {
            std::vector<double> v;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (labels[i] == static_cast<int>(c) && std::isfinite(rows[i][d])) v.push_back(rows[i][d]);
            }
            s.n = std::max(s.n, v.size());
            s.mean[d] = v.empty() ? std::numeric_limits<double>::quiet_NaN() : wavescale::detail::mean(v);
            s.std[d] = v.size() < 2 ? std::numeric_limits<double>::quiet_NaN() : wavescale::detail::sample_std(v);
        }
        out.push_back(s);
    }
    return out;
}

}  // namespace detail

// Ranking and classifier curves for one trait. `descriptors` and `spectra`
// rows are aligned with `trait_values`; `spectra` may be empty (no PCA).
inline TraitResult analyse_trait(const RunConfig& cfg, const std::string& trait,
                                 const std::vector<DescriptorRow>& descriptors,
                                 const std::vector<double>& trait_values,
                                 const std::vector<std::vector<double>>& spectra, bool with_curves = true) {
    TraitResult res;
    res.trait = trait;
    const auto scheme = scheme_for(trait);
    res.categories = category_names(scheme);
    std::vector<int> labels;
    try {
        labels = categorize(trait_values, scheme);
    } catch (const Error& e) {
        res.skipped = e.what();
        return res;
    }
    res.category_counts.assign(res.categories.size(), 0);
    for (int l : labels) {
        if (l >= 0) ++res.category_counts[static_cast<std::size_t>(l)];
    }
    res.stats = detail::category_stats(descriptors, labels, res.categories);

    std::vector<DescriptorRow> rrows;
    std::vector<int> rlabels;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0) continue;
        rrows.push_back(descriptors[i]);
        rlabels.push_back(labels[i]);
    }
    res.rows = rrows.size();
    try {
        res.ranking = rank_descriptors(rrows, rlabels, trait, cfg.min_category_size);
    } catch (const Error& e) {
        res.skipped = e.what();
        return res;
    }
    for (std::size_t d = 0; d < kDescriptorCount; ++d) {
        for (std::size_t c = 0; c < res.categories.size(); ++c) {
            std::vector<double> v;
            for (std::size_t i = 0; i < rrows.size(); ++i) {
                if (rlabels[i] == static_cast<int>(c) && std::isfinite(rrows[i][d])) v.push_back(rrows[i][d]);
            }
            try {
                res.kdes.push_back({std::string(kDescriptorNames[d]), res.categories[c], kde(v)});
            } catch (const Error& e) {
                res.log.push_back("kde " + std::string(kDescriptorNames[d]) + "/" + res.categories[c] + ": " + e.what());
            }
        }
    }

    if (!with_curves) return res;

    // Classification uses rows whose twelve descriptors are all finite.
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= 0 && detail::all_finite(descriptors[i])) keep.push_back(i);
    }
    if (keep.size() < rrows.size()) {
        res.log.push_back(std::to_string(rrows.size() - keep.size()) + " row(s) with missing descriptors left out of classification");
    }
    classify::Matrix x(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(kDescriptorCount));
    classify::Labels y;
    for (std::size_t r = 0; r < keep.size(); ++r) {
        for (std::size_t d = 0; d < kDescriptorCount; ++d) x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(d)) = descriptors[keep[r]][d];
        y.push_back(labels[keep[r]]);
    }
    classify::CurveOptions opts;
    opts.repeats = cfg.repeats;
    opts.budget = cfg.search_budget;
    opts.folds = cfg.cv_folds;
    opts.test_frac = cfg.test_fraction;
    opts.seed = derive_seed(cfg.seed, std::hash<std::string>{}(trait) & 0xffffffffULL);
    opts.threads = cfg.threads;
    std::vector<std::string> names(kDescriptorNames.begin(), kDescriptorNames.end());
    for (auto family : cfg.model_families()) {
        try {
            auto c = classify::feature_curve(x, y, res.ranking->feature_order(), names, family, opts, trait);
            res.descriptor_curves.insert(res.descriptor_curves.end(), c.begin(), c.end());
        } catch (const Error& e) {
            res.log.push_back(std::string(classify::to_string(family)) + " descriptor curve: " + e.what());
        }
    }
    if (cfg.pca_baseline && !spectra.empty()) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] >= 0) rows.push_back(i);
        }
        classify::Matrix xs(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(spectra.front().size()));
        classify::Labels ys;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            for (std::size_t c = 0; c < spectra[rows[r]].size(); ++c) xs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = spectra[rows[r]][c];
            ys.push_back(labels[rows[r]]);
        }
        for (auto family : cfg.model_families()) {
            try {
                auto c = classify::pca_curve(xs, ys, cfg.pca_max_components, family, opts, trait);
                res.pca_curves.insert(res.pca_curves.end(), c.begin(), c.end());
            } catch (const Error& e) {
                res.log.push_back(std::string(classify::to_string(family)) + " pca curve: " + e.what());
            }
        }
    }
    return res;
}

inline ReportBundle run_experiment_tables(const RunConfig& cfg, SpectraTable spectra, const TraitTable& traits) {
    cfg.validate();
    ReportBundle b;
    b.config = cfg;
    b.trace.push_back("ingest");
    b.accounting.push_back({"ingest", spectra.samples(), spectra.samples(), 0, "spectra rows"});
    if (spectra.mode != cfg.analyze_mode) {
        spectra = cfg.analyze_mode == SpectrumMode::Absorbance ? to_absorbance(spectra) : to_transmittance(spectra);
        b.trace.push_back(cfg.analyze_mode == SpectrumMode::Absorbance ? "absorbance" : "transmittance");
    }

    b.trace.push_back("descriptors");
    b.sample_descriptors = detail::extract_all(spectra, cfg, b.sample_failures, b.log);
    std::size_t complete = 0;
    for (const auto& r : b.sample_descriptors) complete += detail::all_finite(r.values) ? 1 : 0;
    b.accounting.push_back({"descriptors", spectra.samples(), complete, spectra.samples() - complete,
                            "samples with all twelve descriptors"});
    if (!b.sample_descriptors.empty()) {
        SpectrumPlot plot;
        plot.sample_id = spectra.sample_id.front();
        try {
            const auto x = prepare_signal(truncate_pow2(spectra.values.front(), cfg.truncate_length),
                                          cfg.descriptors.detrend_endpoints);
            const auto dec = dwt(x, filter_from_id(cfg.descriptors.wavelet), cfg.descriptors.j0);
            plot.mono = wavelet_spectrum(dec);
            plot.slope = fit_spectrum_slope(plot.mono, cfg.descriptors.window.j_min, cfg.descriptors.window.j_max);
            plot.multi = multifractal_spectrum(dec, cfg.descriptors.window, cfg.descriptors.multifractal);
        } catch (const Error& e) {
            b.log.push_back("example spectrum: " + std::string(e.what()));
        }
        b.example_spectrum = std::move(plot);
    }

    b.trace.push_back("zero_removal");
    StageCount zc;
    const auto nonzero = remove_zero_traits(traits, &zc);
    b.accounting.push_back(zc);

    b.trace.push_back("averaging");
    std::vector<std::vector<double>> extra;
    for (const auto& r : b.sample_descriptors) extra.emplace_back(r.values.begin(), r.values.end());
    StageCount ac;
    auto avg = clean_and_average(spectra, nonzero, extra, &ac);
    b.accounting.push_back(ac);
    b.log.insert(b.log.end(), avg.log.begin(), avg.log.end());
    for (std::size_t i = 0; i < avg.spectra.samples(); ++i) {
        DescriptorRecord rec;
        rec.id = avg.spectra.animal_id[i];
        rec.animal_id = rec.id;
        std::copy(avg.extra[i].begin(), avg.extra[i].end(), rec.values.begin());
        b.animal_descriptors.push_back(rec);
    }

    b.trace.push_back("standardization");
    std::vector<std::vector<double>> standardized;
    if (avg.spectra.samples() >= 2) {
        const auto st = standardize(avg.spectra);
        standardized = st.table.values;
        b.accounting.push_back({"standardization", avg.spectra.channels(),
                                avg.spectra.channels() - st.constant_channels.size(), st.constant_channels.size(),
                                "channels; constant channels centred only"});
    }

    b.trace.push_back("outlier_filter");
    std::vector<StageCount> oc;
    const auto filtered = filter_trait_outliers(avg.traits, cfg.outlier_sigma, &oc);
    b.accounting.insert(b.accounting.end(), oc.begin(), oc.end());

    std::vector<DescriptorRow> rows;
    for (const auto& r : b.animal_descriptors) rows.push_back(r.values);
    for (const auto& trait : cfg.traits) {
        const auto k = filtered.trait_index(trait);
        if (!k) continue;
        b.trace.push_back("trait:" + trait);
        std::vector<double> vals;
        std::size_t present = 0;
        for (const auto& row : filtered.values) {
            vals.push_back(row[*k]);
            present += std::isfinite(row[*k]) ? 1 : 0;
        }
        if (present == 0) {
            TraitResult skipped;
            skipped.trait = trait;
            skipped.skipped = "no values";
            b.traits.push_back(std::move(skipped));
            continue;
        }
        b.traits.push_back(analyse_trait(cfg, trait, rows, vals, standardized));
    }
    return b;
}

inline ReportBundle run_experiment(const RunConfig& cfg, const std::string& spectra_path, const std::string& traits_path) {
    return run_experiment_tables(cfg, load_spectra_csv(spectra_path, cfg.input_mode), load_traits_csv(traits_path));
}

// Descriptor records averaged per animal and inner-joined with the trait
// table; rows of the returned pair are aligned.
inline std::pair<std::vector<DescriptorRow>, TraitTable> join_by_animal(const std::vector<DescriptorRecord>& records,
                                                                       const TraitTable& traits) {
    std::map<std::string, std::vector<const std::vector<double>*>> groups;
    std::vector<std::vector<double>> storage;
    storage.reserve(records.size());
    for (const auto& r : records) storage.emplace_back(r.values.begin(), r.values.end());
    for (std::size_t i = 0; i < records.size(); ++i) groups[records[i].animal_id].push_back(&storage[i]);
    std::pair<std::vector<DescriptorRow>, TraitTable> out;
    out.second.traits = traits.traits;
    for (std::size_t i = 0; i < traits.rows(); ++i) {
        const auto it = groups.find(traits.animal_id[i]);
        if (it == groups.end()) continue;
        const auto m = finite_mean(it->second, kDescriptorCount);
        DescriptorRow row;
        std::copy(m.begin(), m.end(), row.begin());
        out.first.push_back(row);
        out.second.animal_id.push_back(traits.animal_id[i]);
        out.second.values.push_back(traits.values[i]);
    }
    return out;
}

// Two fBm classes (H = 0.4 and 0.6) as absorbance-mode spectra, one sample per
// animal, with a TLC trait whose median split reproduces the classes.
struct SurrogateData {
    SpectraTable spectra;
    TraitTable traits;
    std::vector<int> truth;
};

inline SurrogateData make_surrogate(std::uint64_t seed, std::size_t per_class = 100, std::size_t n = 1024,
                                    double h_low = 0.4, double h_high = 0.6) {
    SurrogateData s;
    s.spectra.mode = SpectrumMode::Absorbance;
    for (std::size_t c = 0; c < n; ++c) s.spectra.wavenumbers.push_back(925.0 + 3.853 * static_cast<double>(c));
    s.traits.traits = {"TLC"};
    CounterRng trait_rng(seed, 0x71c);
    for (std::size_t i = 0; i < 2 * per_class; ++i) {
        const int cls = static_cast<int>(i % 2);
        char id[32];
        std::snprintf(id, sizeof id, "%04zu", i + 1);
        s.spectra.sample_id.push_back(std::string("S") + id);
        s.spectra.animal_id.push_back(std::string("A") + id);
        s.spectra.values.push_back(gen_fbm({cls == 0 ? h_low : h_high, n, derive_seed(seed, i)}));
        s.traits.animal_id.push_back(std::string("A") + id);
        s.traits.values.push_back({(cls == 0 ? 4.0 : 5.0) + 0.5 * trait_rng.uniform()});
        s.truth.push_back(cls);
    }
    return s;
}

// ---------------------------------------------------------------- output

inline std::string config_comment(const RunConfig& cfg) {
    return "# config: " + to_json(cfg).dump() + "\n";
}

inline std::string descriptor_header() {
    std::string h = "id,animal_id";
    for (auto n : kDescriptorNames) h += "," + std::string(n);
    return h + ",flags,note\n";
}

inline std::string descriptors_to_csv(const std::vector<DescriptorRecord>& rows, const std::string& comment) {
    std::ostringstream o;
    o << comment << descriptor_header();
    for (const auto& r : rows) {
        o << r.id << ',' << r.animal_id;
        for (double v : r.values) o << ',' << fmt_num(v);
        std::string note = r.note;
        std::replace(note.begin(), note.end(), ',', ';');
        o << ',' << flags_to_string(r.flags) << ',' << note << '\n';
    }
    return o.str();
}

inline std::vector<DescriptorRecord> load_descriptor_csv(const std::string& path) {
    const auto lines = detail::read_lines(path);
    if (lines.empty()) throw Error(path + ": empty descriptor file");
    const auto header = detail::split_csv(lines[0].second);
    if (header.size() < 2 + kDescriptorCount) throw Error(path + ": descriptor header too short");
    for (std::size_t d = 0; d < kDescriptorCount; ++d) {
        if (header[2 + d] != kDescriptorNames[d]) throw Error(path + ": column " + std::to_string(3 + d) + " should be " + std::string(kDescriptorNames[d]));
    }
    std::vector<DescriptorRecord> out;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto cells = detail::split_csv(lines[r].second);
        if (cells.size() < 2 + kDescriptorCount) throw Error(path + ": row " + std::to_string(lines[r].first) + " too short");
        DescriptorRecord rec;
        rec.id = cells[0];
        rec.animal_id = cells[1];
        for (std::size_t d = 0; d < kDescriptorCount; ++d) {
            const auto v = detail::parse_number(cells[2 + d]);
            if (!v && !cells[2 + d].empty()) {
                throw Error(path + ": row " + std::to_string(lines[r].first) + ", column " + std::to_string(3 + d) + ": not a number");
            }
            rec.values[d] = v ? *v : std::numeric_limits<double>::quiet_NaN();
        }
        out.push_back(rec);
    }
    return out;
}

inline nlohmann::ordered_json ranking_to_json(const DescriptorRanking& r) {
    nlohmann::ordered_json j;
    j["mqp"] = r.mqp;
    j["categories_used"] = r.categories_used;
    nlohmann::ordered_json ordered = nlohmann::ordered_json::array();
    for (const auto& e : r.ordered) ordered.push_back({{"descriptor", e.name}, {"p_value", e.p_value}});
    j["ordered"] = ordered;
    j["warnings"] = r.warnings;
    return j;
}

inline nlohmann::ordered_json report_to_json(const classify::EvalReport& r) {
    nlohmann::ordered_json j;
    j["mqp"] = r.mqp;
    j["family"] = r.family;
    j["feature_set"] = r.feature_set;
    j["feature_count"] = r.feature_count;
    j["features"] = r.features;
    j["train_acc_mean"] = r.train_acc_mean;
    j["train_acc_std"] = r.train_acc_std;
    j["test_acc_mean"] = r.test_acc_mean;
    j["test_acc_std"] = r.test_acc_std;
    j["repeats"] = r.repeats;
    nlohmann::ordered_json runs = nlohmann::ordered_json::array();
    for (const auto& run : r.runs) {
        runs.push_back({{"split_seed", run.split_seed},
                        {"train_acc", run.train_acc},
                        {"test_acc", run.test_acc},
                        {"cv_score", run.cv_score},
                        {"spec", run.spec},
                        {"error", run.error}});
    }
    j["runs"] = runs;
    return j;
}

inline std::string curves_to_csv(const std::vector<classify::EvalReport>& curves, const std::string& comment) {
    std::ostringstream o;
    o << comment << "mqp,feature_set,family,feature_count,train_acc_mean,train_acc_std,test_acc_mean,test_acc_std,repeats,features\n";
    for (const auto& r : curves) {
        std::string feats;
        for (const auto& f : r.features) feats += (feats.empty() ? "" : " ") + f;
        o << r.mqp << ',' << r.feature_set << ',' << r.family << ',' << r.feature_count << ','
          << fmt_num(r.train_acc_mean) << ',' << fmt_num(r.train_acc_std) << ',' << fmt_num(r.test_acc_mean) << ','
          << fmt_num(r.test_acc_std) << ',' << r.repeats << ',' << feats << '\n';
    }
    return o.str();
}

inline std::string acc_pm(const classify::EvalReport& r) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f+-%.2f", r.test_acc_mean, r.test_acc_std);
    return buf;
}

// One row per trait: best descriptor model and best PCA model.
inline std::string summary_to_csv(const ReportBundle& b) {
    std::ostringstream o;
    o << config_comment(b.config)
      << "MQP,Model,Acc+-Std,#Descriptors,PCA Model,PCA Acc+-Std,#Components,note\n";
    for (const auto& t : b.traits) {
        o << t.trait << ',';
        const auto* d = best_report(t.descriptor_curves);
        const auto* p = best_report(t.pca_curves);
        if (d) o << d->family << ',' << acc_pm(*d) << ',' << d->feature_count << ',';
        else o << ",,,";
        if (p) o << p->family << ',' << acc_pm(*p) << ',' << p->feature_count << ',';
        else o << ",,,";
        std::string note = t.skipped;
        std::replace(note.begin(), note.end(), ',', ';');
        o << note << '\n';
    }
    return o.str();
}

inline std::string category_stats_to_csv(const ReportBundle& b) {
    std::ostringstream o;
    o << config_comment(b.config) << "MQP,Category,n";
    for (auto n : kDescriptorNames) o << ',' << n << "_mean," << n << "_std";
    o << '\n';
    for (const auto& t : b.traits) {
        for (const auto& s : t.stats) {
            o << t.trait << ',' << s.category << ',' << s.n;
            for (std::size_t d = 0; d < kDescriptorCount; ++d) o << ',' << fmt_num(s.mean[d]) << ',' << fmt_num(s.std[d]);
            o << '\n';
        }
    }
    return o.str();
}

inline std::string kde_to_csv(const ReportBundle& b) {
    std::ostringstream o;
    o << config_comment(b.config) << "mqp,descriptor,category,bandwidth,x,density\n";
    for (const auto& t : b.traits) {
        for (const auto& k : t.kdes) {
            for (std::size_t i = 0; i < k.kde.grid.size(); ++i) {
                o << t.trait << ',' << k.descriptor << ',' << k.category << ',' << fmt_num(k.kde.bandwidth) << ','
                  << fmt_num(k.kde.grid[i]) << ',' << fmt_num(k.kde.density[i]) << '\n';
            }
        }
    }
    return o.str();
}

inline std::string accounting_to_csv(const ReportBundle& b) {
    std::ostringstream o;
    o << config_comment(b.config) << "stage,in,used,dropped,detail\n";
    for (const auto& s : b.accounting) o << s.stage << ',' << s.in << ',' << s.used << ',' << s.dropped << ',' << s.detail << '\n';
    return o.str();
}

inline nlohmann::ordered_json bundle_to_json(const ReportBundle& b) {
    nlohmann::ordered_json j;
    j["config"] = to_json(b.config);
    j["trace"] = b.trace;
    nlohmann::ordered_json acc = nlohmann::ordered_json::array();
    for (const auto& s : b.accounting) {
        acc.push_back({{"stage", s.stage}, {"in", s.in}, {"used", s.used}, {"dropped", s.dropped}, {"detail", s.detail}});
    }
    j["accounting"] = acc;
    j["sample_failures"] = b.sample_failures;
    j["hard_errors"] = b.hard_errors;
    j["log"] = b.log;
    nlohmann::ordered_json traits = nlohmann::ordered_json::array();
    for (const auto& t : b.traits) {
        nlohmann::ordered_json tj;
        tj["mqp"] = t.trait;
        tj["skipped"] = t.skipped;
        tj["categories"] = t.categories;
        tj["category_counts"] = t.category_counts;
        tj["rows"] = t.rows;
        if (t.ranking) tj["ranking"] = ranking_to_json(*t.ranking);
        nlohmann::ordered_json curves = nlohmann::ordered_json::array();
        for (const auto& r : t.descriptor_curves) curves.push_back(report_to_json(r));
        for (const auto& r : t.pca_curves) curves.push_back(report_to_json(r));
        tj["reports"] = curves;
        tj["log"] = t.log;
        traits.push_back(tj);
    }
    j["traits"] = traits;
    return j;
}

inline void write_bundle(const ReportBundle& b, const std::filesystem::path& dir) {
    const auto comment = config_comment(b.config);
    write_file_atomic(dir / "descriptors_samples.csv", descriptors_to_csv(b.sample_descriptors, comment));
    write_file_atomic(dir / "descriptors_animals.csv", descriptors_to_csv(b.animal_descriptors, comment));
    nlohmann::ordered_json dj;
    dj["config"] = to_json(b.config);
    nlohmann::ordered_json recs = nlohmann::ordered_json::array();
    for (const auto& r : b.sample_descriptors) {
        nlohmann::ordered_json rj;
        rj["id"] = r.id;
        rj["animal_id"] = r.animal_id;
        for (std::size_t d = 0; d < kDescriptorCount; ++d) {
            if (std::isfinite(r.values[d])) rj[std::string(kDescriptorNames[d])] = r.values[d];
            else rj[std::string(kDescriptorNames[d])] = nullptr;
        }
        rj["flags"] = flags_to_string(r.flags);
        rj["note"] = r.note;
        recs.push_back(rj);
    }
    dj["samples"] = recs;
    write_file_atomic(dir / "descriptors.json", dj.dump(2) + "\n");

    nlohmann::ordered_json rj;
    rj["config"] = to_json(b.config);
    nlohmann::ordered_json ranks = nlohmann::ordered_json::array();
    for (const auto& t : b.traits) {
        if (t.ranking) ranks.push_back(ranking_to_json(*t.ranking));
    }
    rj["rankings"] = ranks;
    write_file_atomic(dir / "ranking.json", rj.dump(2) + "\n");

    std::vector<classify::EvalReport> all;
    for (const auto& t : b.traits) {
        all.insert(all.end(), t.descriptor_curves.begin(), t.descriptor_curves.end());
        all.insert(all.end(), t.pca_curves.begin(), t.pca_curves.end());
    }
    write_file_atomic(dir / "eval_curves.csv", curves_to_csv(all, comment));
    write_file_atomic(dir / "eval_summary.csv", summary_to_csv(b));
    write_file_atomic(dir / "eval_report.json", bundle_to_json(b).dump(2) + "\n");
    write_file_atomic(dir / "category_stats.csv", category_stats_to_csv(b));
    write_file_atomic(dir / "plot_kde.csv", kde_to_csv(b));
    write_file_atomic(dir / "accounting.csv", accounting_to_csv(b));
    if (b.example_spectrum) {
        const auto& s = *b.example_spectrum;
        std::ostringstream mono;
        mono << comment << "# sample: " << s.sample_id << "\n";
        if (s.slope) mono << "# slope: " << fmt_num(s.slope->slope) << " intercept: " << fmt_num(s.slope->intercept) << "\n";
        mono << "j,log2_energy\n";
        for (std::size_t i = 0; i < s.mono.levels.size(); ++i) mono << s.mono.levels[i] << ',' << fmt_num(s.mono.log_energy[i]) << '\n';
        write_file_atomic(dir / "plot_spectrum_mono.csv", mono.str());
        if (s.multi) {
            std::ostringstream multi;
            multi << comment << "# sample: " << s.sample_id << " q_range: " << to_string(s.multi->q_range_used) << "\n"
                  << "q,tau,alpha,f_alpha\n";
            for (std::size_t i = 0; i < s.multi->size(); ++i) {
                multi << fmt_num(s.multi->grid[i]) << ',' << fmt_num(s.multi->tau[i]) << ',' << fmt_num(s.multi->alpha[i])
                      << ',' << fmt_num(s.multi->f_alpha[i]) << '\n';
            }
            write_file_atomic(dir / "plot_spectrum_multi.csv", multi.str());
        }
    }
}

}  // namespace wavescale::pipeline
