#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "wavescale/pipeline/experiment.hpp"

using namespace wavescale;
using namespace wavescale::pipeline;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("wavescale_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string write(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
    return p.string();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string error_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

RunConfig quick_config() {
    RunConfig c;
    c.input_mode = SpectrumMode::Absorbance;
    c.analyze_mode = SpectrumMode::Absorbance;
    c.traits = {"TLC"};
    c.families = {"GNB", "LDA"};
    c.repeats = 2;
    c.search_budget = 2;
    c.cv_folds = 3;
    c.pca_max_components = 3;
    return c;
}

}  // namespace

TEST(Config, JsonRoundTrip) {
    RunConfig c;
    c.seed = 77;
    c.families = {"KNN", "PLSDA"};
    c.descriptors.window = {2, 6};
    const auto back = config_from_json(nlohmann::json::parse(to_json(c).dump()));
    EXPECT_EQ(back.seed, 77u);
    EXPECT_EQ(back.families, c.families);
    EXPECT_EQ(back.descriptors.window.j_min, 2);
    EXPECT_EQ(to_json(back).dump(), to_json(c).dump());
}

TEST(Config, RejectsUnknownAndInvalid) {
    EXPECT_NE(error_of([] { config_from_json(nlohmann::json{{"sede", 1}}); }).find("unknown config key 'sede'"),
              std::string::npos);
    EXPECT_THROW(config_from_json(nlohmann::json{{"wavelet", "coif2"}}), Error);
    EXPECT_THROW(config_from_json(nlohmann::json{{"truncate_length", 1000}}), Error);
    EXPECT_THROW(config_from_json(nlohmann::json{{"ks_on_kde", true}}), Error);
    EXPECT_THROW(config_from_json(nlohmann::json{{"families", {"Tree"}}}), Error);
    EXPECT_THROW(config_from_json(nlohmann::json{{"repeats", "four"}}), Error);
}

TEST(Config, FileAllowsComments) {
    const auto dir = scratch_dir("config");
    const auto path = write(dir / "c.json", "{\n  // quick run\n  \"repeats\": 2\n}\n");
    EXPECT_EQ(load_config(path).repeats, 2);
}

TEST(Traits, SplitSchemes) {
    EXPECT_EQ(scheme_for("TPC"), CategoryScheme::Quartile);
    EXPECT_EQ(scheme_for("b-LGB"), CategoryScheme::Quartile);
    EXPECT_EQ(scheme_for("RCT"), CategoryScheme::Median);
    EXPECT_EQ(known_traits().size(), 18u);
}

TEST(Categorize, MedianAndQuartiles) {
    const std::vector<double> v{1, 2, 3, 4, std::nan(""), 5, 6, 7, 8};
    const auto m = categorize(v, CategoryScheme::Median);
    EXPECT_EQ(m, (std::vector<int>{0, 0, 0, 0, -1, 1, 1, 1, 1}));
    const auto q = categorize(v, CategoryScheme::Quartile);
    EXPECT_EQ(q, (std::vector<int>{0, 0, 1, 1, -1, 2, 2, 3, 3}));
    // A value on the cut goes to the lower category.
    EXPECT_EQ(categorize(std::vector<double>{1, 2, 3}, CategoryScheme::Median), (std::vector<int>{0, 0, 1}));
    EXPECT_THROW(categorize(std::vector<double>{4, 4, 4}, CategoryScheme::Median), Error);
}

TEST(Outliers, SinglePassThreeSigma) {
    std::vector<double> x(30, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i % 3);
    x.push_back(100.0);
    const auto kept = filter_outliers(x);
    EXPECT_EQ(kept.size(), 30u);
    EXPECT_EQ(filter_outliers(std::vector<double>{1, 2, 3}).size(), 3u);
}

TEST(Modes, AbsorbanceRoundTripAndErrors) {
    SpectraTable t;
    t.sample_id = {"s1"};
    t.animal_id = {"a1"};
    t.wavenumbers = {1.0, 2.0, 3.0};
    t.values = {{1.0, 0.1, 0.01}};
    const auto a = to_absorbance(t);
    EXPECT_NEAR(a.values[0][1], 1.0, 1e-15);
    EXPECT_NEAR(a.values[0][2], 2.0, 1e-15);
    const auto back = to_transmittance(a);
    EXPECT_NEAR(back.values[0][2], 0.01, 1e-15);
    t.values[0][1] = 0.0;
    const auto msg = error_of([&] { to_absorbance(t); });
    EXPECT_NE(msg.find("s1"), std::string::npos);
    EXPECT_NE(msg.find("channel 2"), std::string::npos);
    EXPECT_THROW(to_absorbance(a), Error);
}

TEST(TableIo, SpectraCsvRoundTrip) {
    const auto dir = scratch_dir("io");
    SpectraTable t;
    t.sample_id = {"s1", "s2"};
    t.animal_id = {"a1", "a1"};
    t.wavenumbers = {925.5, 929.25};
    t.values = {{0.5, 0.25}, {0.125, 1e-7}};
    write_file_atomic(dir / "s.csv", spectra_to_csv(t, "# note\n"));
    const auto back = load_spectra_csv((dir / "s.csv").string(), SpectrumMode::Transmittance);
    EXPECT_EQ(back.sample_id, t.sample_id);
    EXPECT_EQ(back.wavenumbers, t.wavenumbers);
    EXPECT_EQ(back.values, t.values);
    EXPECT_FALSE(fs::exists(dir / "s.csv.tmp"));
}

TEST(TableIo, ErrorsCarryCoordinates) {
    const auto dir = scratch_dir("io_err");
    auto msg = error_of([&] {
        load_spectra_csv(write(dir / "a.csv", "sample_id,animal_id,1,2\ns1,a1,0.5,x\n"), SpectrumMode::Transmittance);
    });
    EXPECT_NE(msg.find("row 2, column 4"), std::string::npos) << msg;
    msg = error_of([&] {
        load_spectra_csv(write(dir / "b.csv", "sample_id,animal_id,1,2\ns1,a1,0.5\n"), SpectrumMode::Transmittance);
    });
    EXPECT_NE(msg.find("row 2"), std::string::npos) << msg;
    msg = error_of([&] {
        load_spectra_csv(write(dir / "c.csv", "sample_id,animal_id,2,1\n"), SpectrumMode::Transmittance);
    });
    EXPECT_NE(msg.find("strictly increasing"), std::string::npos) << msg;
    msg = error_of([&] {
        load_spectra_csv(write(dir / "d.csv", "sample_id,animal_id,1\ns1,a,1\ns1,b,2\n"), SpectrumMode::Transmittance);
    });
    EXPECT_NE(msg.find("duplicate"), std::string::npos) << msg;
    msg = error_of([&] { load_traits_csv(write(dir / "t.csv", "animal_id,RCT,Fat\na1,1,2\n")); });
    EXPECT_NE(msg.find("unknown trait 'Fat'"), std::string::npos) << msg;
    const auto t = load_traits_csv(write(dir / "u.csv", "animal_id,RCT,pH\na1,,6.6\na2,NA,6.7\n"));
    EXPECT_TRUE(std::isnan(t.values[0][0]));
    EXPECT_TRUE(std::isnan(t.values[1][0]));
    EXPECT_DOUBLE_EQ(t.values[1][1], 6.7);
}

TEST(Preprocess, ZerosBecomeMissingAndAnimalsAverage) {
    SpectraTable s;
    s.sample_id = {"s1", "s2", "s3", "s4"};
    s.animal_id = {"a1", "a1", "a2", "a9"};
    s.wavenumbers = {1.0, 2.0};
    s.values = {{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}, {7.0, 8.0}};
    TraitTable t;
    t.traits = {"RCT", "pH"};
    t.animal_id = {"a1", "a2", "a3"};
    t.values = {{0.0, 6.5}, {12.0, 6.7}, {1.0, 1.0}};
    StageCount zc, ac;
    const auto nz = remove_zero_traits(t, &zc);
    EXPECT_TRUE(std::isnan(nz.values[0][0]));
    EXPECT_EQ(zc.dropped, 1u);
    const auto avg = clean_and_average(s, nz, {{1.0}, {2.0}, {3.0}, {4.0}}, &ac);
    ASSERT_EQ(avg.spectra.samples(), 2u);
    EXPECT_EQ(avg.spectra.animal_id, (std::vector<std::string>{"a1", "a2"}));
    EXPECT_EQ(avg.spectra.values[0], (std::vector<double>{2.0, 3.0}));
    EXPECT_DOUBLE_EQ(avg.extra[0][0], 1.5);
    EXPECT_EQ(ac.in, 4u);
    EXPECT_EQ(ac.dropped, 1u);
    EXPECT_EQ(avg.log.size(), 2u);  // a9 without traits, a3 without spectra
}

TEST(Preprocess, StandardizeAndTruncate) {
    SpectraTable s;
    s.wavenumbers = {1.0, 2.0};
    s.values = {{1.0, 5.0}, {3.0, 5.0}, {5.0, 5.0}};
    s.sample_id = s.animal_id = {"a", "b", "c"};
    const auto r = standardize(s);
    EXPECT_EQ(r.constant_channels, (std::vector<std::size_t>{1}));
    EXPECT_DOUBLE_EQ(r.table.values[0][0], -1.0);
    EXPECT_DOUBLE_EQ(r.table.values[2][1], 0.0);
    EXPECT_EQ(truncate_pow2(std::vector<double>(1200, 1.0)).size(), 1024u);
    EXPECT_THROW(truncate_pow2(std::vector<double>(1000, 1.0)), Error);
}

TEST(Experiment, SurrogateShape) {
    const auto s = make_surrogate(3, 10, 256);
    EXPECT_EQ(s.spectra.samples(), 20u);
    EXPECT_EQ(s.spectra.channels(), 256u);
    EXPECT_EQ(s.spectra.mode, SpectrumMode::Absorbance);
    const auto labels = categorize(std::vector<double>([&] {
        std::vector<double> v;
        for (const auto& r : s.traits.values) v.push_back(r[0]);
        return v;
    }()), CategoryScheme::Median);
    EXPECT_EQ(labels, s.truth);
}

TEST(Experiment, TraceAccountingAndArtifacts) {
    auto cfg = quick_config();
    const auto s = make_surrogate(5, 20, 1024);
    const auto b = run_experiment_tables(cfg, s.spectra, s.traits);
    const std::vector<std::string> expected{"ingest", "descriptors", "zero_removal", "averaging", "standardization",
                                            "outlier_filter", "trait:TLC"};
    EXPECT_EQ(b.trace, expected);
    for (const auto& st : b.accounting) EXPECT_EQ(st.in, st.used + st.dropped) << st.stage;
    ASSERT_EQ(b.traits.size(), 1u);
    const auto& t = b.traits.front();
    EXPECT_TRUE(t.skipped.empty()) << t.skipped;
    ASSERT_TRUE(t.ranking.has_value());
    EXPECT_EQ(t.descriptor_curves.size(), 2u * kDescriptorCount);
    EXPECT_EQ(t.pca_curves.size(), 2u * 3u);
    EXPECT_EQ(t.stats.size(), 2u);

    const auto dir = scratch_dir("bundle");
    write_bundle(b, dir);
    for (const char* f : {"descriptors_samples.csv", "descriptors_animals.csv", "descriptors.json", "ranking.json",
                          "eval_curves.csv", "eval_summary.csv", "eval_report.json", "category_stats.csv", "plot_kde.csv",
                          "accounting.csv", "plot_spectrum_mono.csv"}) {
        ASSERT_TRUE(fs::exists(dir / f)) << f;
    }
    EXPECT_EQ(slurp(dir / "eval_summary.csv").rfind("# config: {", 0), 0u);
    const auto j = nlohmann::json::parse(slurp(dir / "eval_report.json"));
    EXPECT_EQ(j.at("config").at("seed").get<std::uint64_t>(), cfg.seed);
    const auto desc = load_descriptor_csv((dir / "descriptors_samples.csv").string());
    EXPECT_EQ(desc.size(), 40u);
}

TEST(Experiment, TransmittanceInputConverted) {
    auto cfg = quick_config();
    cfg.truncate_length = 256;
    cfg.input_mode = SpectrumMode::Transmittance;
    cfg.pca_baseline = false;
    auto s = make_surrogate(6, 8, 256);
    s.spectra = to_transmittance(s.spectra);
    const auto b = run_experiment_tables(cfg, s.spectra, s.traits);
    EXPECT_EQ(b.trace.at(1), "absorbance");
}

TEST(Experiment, MissingTraitColumnSkipped) {
    auto cfg = quick_config();
    cfg.truncate_length = 256;
    cfg.traits = {"TLC", "RCT"};
    const auto s = make_surrogate(7, 8, 256);
    const auto b = run_experiment_tables(cfg, s.spectra, s.traits);
    EXPECT_EQ(b.traits.size(), 1u);
}

TEST(Experiment, ByteIdenticalReruns) {
    auto cfg = quick_config();
    const auto s = make_surrogate(8, 15, 1024);
    const auto d1 = scratch_dir("rerun1");
    const auto d2 = scratch_dir("rerun2");
    write_bundle(run_experiment_tables(cfg, s.spectra, s.traits), d1);
    cfg.threads = 3;  // thread count must not change results
    write_bundle(run_experiment_tables(cfg, s.spectra, s.traits), d2);
    for (const auto& e : fs::directory_iterator(d1)) {
        const auto name = e.path().filename();
        EXPECT_EQ(slurp(e.path()), slurp(d2 / name)) << name;
    }
}
