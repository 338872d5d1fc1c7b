// wavescale command-line driver.
//
//   wavescale synth fbm|cascade|surrogate ...
//   wavescale descriptors --spectra in.csv --out desc.csv
//   wavescale rank --descriptors desc.csv --traits traits.csv --trait RCT
//   wavescale classify --descriptors desc.csv --traits traits.csv --trait RCT
//   wavescale run --spectra in.csv --traits traits.csv --out dir
//   wavescale report --in dir

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "wavescale/wavescale.hpp"

namespace ws = wavescale;
namespace wp = wavescale::pipeline;
namespace fs = std::filesystem;

namespace {

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string mode;
    std::string out;
    int threads = -1;
};

wp::RunConfig resolve(const Common& c) {
    wp::RunConfig cfg = c.config_path.empty() ? wp::RunConfig{} : wp::load_config(c.config_path);
    if (c.seed) cfg.seed = *c.seed;
    if (!c.mode.empty()) cfg.input_mode = wp::mode_from_string(c.mode);
    if (!c.out.empty()) cfg.output_dir = c.out;
    if (c.threads >= 0) cfg.threads = static_cast<unsigned>(c.threads);
    cfg.validate();
    return cfg;
}

void add_common(CLI::App* app, Common& c, bool with_out = true) {
    app->add_option("--config", c.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app->add_option("--seed", c.seed, "master seed (overrides config)");
    app->add_option("--mode", c.mode, "input spectrum mode: transmittance or absorbance");
    app->add_option("--threads", c.threads, "worker threads, 0 = hardware");
    if (with_out) app->add_option("--out", c.out, "output path");
}

std::vector<wp::DescriptorRecord> descriptors_for(const wp::SpectraTable& input, const wp::RunConfig& cfg,
                                                  std::size_t& failures) {
    auto spectra = input;
    if (spectra.mode != cfg.analyze_mode) {
        spectra = cfg.analyze_mode == wp::SpectrumMode::Absorbance ? wp::to_absorbance(spectra) : wp::to_transmittance(spectra);
    }
    std::vector<std::string> log;
    auto rows = wp::detail::extract_all(spectra, cfg, failures, log);
    for (const auto& l : log) std::cerr << "warning: " << l << "\n";
    return rows;
}

wp::TraitResult trait_from_files(const wp::RunConfig& cfg, const std::string& desc_path, const std::string& traits_path,
                                 const std::string& trait, bool with_curves) {
    const auto records = wp::load_descriptor_csv(desc_path);
    const auto traits = wp::remove_zero_traits(wp::load_traits_csv(traits_path));
    auto [rows, joined] = wp::join_by_animal(records, traits);
    const auto filtered = wp::filter_trait_outliers(joined, cfg.outlier_sigma);
    const auto k = filtered.trait_index(trait);
    if (!k) throw ws::Error("trait '" + trait + "' not present in " + traits_path);
    std::vector<double> vals;
    for (const auto& r : filtered.values) vals.push_back(r[*k]);
    auto res = wp::analyse_trait(cfg, trait, rows, vals, {}, with_curves);
    if (!res.skipped.empty()) throw ws::Error(trait + ": " + res.skipped);
    return res;
}

void print_table(const nlohmann::json& j) {
    std::cout << std::left << std::setw(8) << "MQP" << std::setw(11) << "Model" << std::setw(13) << "Acc+-Std"
              << std::setw(6) << "#D" << std::setw(11) << "PCA Model" << std::setw(13) << "Acc+-Std" << "#C\n";
    for (const auto& t : j.at("traits")) {
        const nlohmann::json* best_d = nullptr;
        const nlohmann::json* best_p = nullptr;
        for (const auto& r : t.at("reports")) {
            auto*& slot = r.at("feature_set") == "pca" ? best_p : best_d;
            if (!slot || r.at("test_acc_mean").get<double>() > slot->at("test_acc_mean").get<double>() + 1e-12) slot = &r;
        }
        auto cell = [](const nlohmann::json* r) {
            if (!r) return std::string("-");
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.2f+-%.2f", r->at("test_acc_mean").get<double>(), r->at("test_acc_std").get<double>());
            return std::string(buf);
        };
        std::cout << std::setw(8) << t.at("mqp").get<std::string>() << std::setw(11)
                  << (best_d ? best_d->at("family").get<std::string>() : "-") << std::setw(13) << cell(best_d) << std::setw(6)
                  << (best_d ? std::to_string(best_d->at("feature_count").get<int>()) : "-") << std::setw(11)
                  << (best_p ? best_p->at("family").get<std::string>() : "-") << std::setw(13) << cell(best_p)
                  << (best_p ? std::to_string(best_p->at("feature_count").get<int>()) : "-");
        if (!t.at("skipped").get<std::string>().empty()) std::cout << "  (" << t.at("skipped").get<std::string>() << ")";
        std::cout << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wavelet scaling descriptors for 1-D spectra"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate synthetic signals");
    synth->require_subcommand(1);
    Common synth_c;
    ws::FbmSpec fbm;
    auto* s_fbm = synth->add_subcommand("fbm", "fractional Brownian motion path");
    s_fbm->add_option("--hurst", fbm.hurst)->check(CLI::Range(0.0, 1.0));
    s_fbm->add_option("--n", fbm.n, "length (power of two)");
    s_fbm->add_option("--seed", fbm.seed);
    s_fbm->add_option("--out", synth_c.out, "CSV path (stdout if omitted)");
    ws::CascadeSpec cas;
    auto* s_cas = synth->add_subcommand("cascade", "binomial multiplicative cascade");
    s_cas->add_option("--m0", cas.m0);
    s_cas->add_option("--depth", cas.depth);
    s_cas->add_option("--seed", cas.seed);
    s_cas->add_option("--out", synth_c.out, "CSV path (stdout if omitted)");
    std::size_t per_class = 100;
    std::size_t sur_n = 1024;
    std::uint64_t sur_seed = 42;
    auto* s_sur = synth->add_subcommand("surrogate", "two-class fBm spectra and TLC traits (H 0.4 vs 0.6)");
    s_sur->add_option("--per-class", per_class);
    s_sur->add_option("--n", sur_n);
    s_sur->add_option("--seed", sur_seed);
    s_sur->add_option("--out", synth_c.out, "output directory")->required();

    // descriptors
    Common desc_c;
    std::string spectra_path;
    auto* desc = app.add_subcommand("descriptors", "per-sample scaling descriptors");
    add_common(desc, desc_c);
    desc->add_option("--spectra", spectra_path)->required()->check(CLI::ExistingFile);

    // rank / classify
    Common rank_c;
    std::string desc_path, traits_path, trait;
    auto* rank = app.add_subcommand("rank", "KS ranking of descriptors for one trait");
    add_common(rank, rank_c);
    rank->add_option("--descriptors", desc_path)->required()->check(CLI::ExistingFile);
    rank->add_option("--traits", traits_path)->required()->check(CLI::ExistingFile);
    rank->add_option("--trait", trait)->required();

    Common cls_c;
    std::vector<std::string> families;
    auto* cls = app.add_subcommand("classify", "accuracy curves over ranked descriptors for one trait");
    add_common(cls, cls_c);
    cls->add_option("--descriptors", desc_path)->required()->check(CLI::ExistingFile);
    cls->add_option("--traits", traits_path)->required()->check(CLI::ExistingFile);
    cls->add_option("--trait", trait)->required();
    cls->add_option("--family", families, "model families (default: config)");

    // run
    Common run_c;
    std::vector<std::string> run_traits;
    auto* run = app.add_subcommand("run", "full experiment, writes the report bundle");
    add_common(run, run_c);
    run->add_option("--spectra", spectra_path)->required()->check(CLI::ExistingFile);
    run->add_option("--traits", traits_path)->required()->check(CLI::ExistingFile);
    run->add_option("--trait", run_traits, "restrict to these traits");

    // report
    std::string report_dir;
    auto* report = app.add_subcommand("report", "summary table from a report bundle");
    report->add_option("--in", report_dir)->required()->check(CLI::ExistingDirectory);

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            if (s_sur->parsed()) {
                const auto s = wp::make_surrogate(sur_seed, per_class, sur_n);
                const std::string comment = "# surrogate seed " + std::to_string(sur_seed) + ", absorbance mode\n";
                wp::write_file_atomic(fs::path(synth_c.out) / "spectra.csv", wp::spectra_to_csv(s.spectra, comment));
                wp::write_file_atomic(fs::path(synth_c.out) / "traits.csv", wp::traits_to_csv(s.traits, comment));
                std::cout << "wrote " << s.spectra.samples() << " spectra to " << synth_c.out << "\n";
                return 0;
            }
            const auto x = s_fbm->parsed() ? ws::gen_fbm(fbm) : ws::gen_cascade(cas);
            std::ostringstream o;
            o << "index,value\n";
            for (std::size_t i = 0; i < x.size(); ++i) o << i << ',' << wp::fmt_num(x[i]) << '\n';
            if (synth_c.out.empty()) std::cout << o.str();
            else wp::write_file_atomic(synth_c.out, o.str());
            return 0;
        }
        if (desc->parsed()) {
            const auto cfg = resolve(desc_c);
            std::size_t failures = 0;
            const auto rows = descriptors_for(wp::load_spectra_csv(spectra_path, cfg.input_mode), cfg, failures);
            const auto csv = wp::descriptors_to_csv(rows, wp::config_comment(cfg));
            if (desc_c.out.empty()) std::cout << csv;
            else wp::write_file_atomic(desc_c.out, csv);
            std::cerr << rows.size() << " samples, " << failures << " without a multifractal spectrum\n";
            return 0;
        }
        if (rank->parsed()) {
            const auto cfg = resolve(rank_c);
            const auto res = trait_from_files(cfg, desc_path, traits_path, trait, false);
            nlohmann::ordered_json j;
            j["config"] = wp::to_json(cfg);
            j["ranking"] = wp::ranking_to_json(*res.ranking);
            if (rank_c.out.empty()) std::cout << j.dump(2) << "\n";
            else wp::write_file_atomic(rank_c.out, j.dump(2) + "\n");
            return 0;
        }
        if (cls->parsed()) {
            auto cfg = resolve(cls_c);
            if (!families.empty()) cfg.families = families;
            cfg.validate();
            const auto res = trait_from_files(cfg, desc_path, traits_path, trait, true);
            for (const auto& l : res.log) std::cerr << "warning: " << l << "\n";
            const auto csv = wp::curves_to_csv(res.descriptor_curves, wp::config_comment(cfg));
            if (cls_c.out.empty()) std::cout << csv;
            else wp::write_file_atomic(cls_c.out, csv);
            return 0;
        }
        if (run->parsed()) {
            auto cfg = resolve(run_c);
            if (!run_traits.empty()) cfg.traits = run_traits;
            cfg.validate();
            const auto bundle = wp::run_experiment(cfg, spectra_path, traits_path);
            wp::write_bundle(bundle, cfg.output_dir);
            for (const auto& l : bundle.log) std::cerr << "warning: " << l << "\n";
            print_table(nlohmann::json::parse(wp::bundle_to_json(bundle).dump()));
            std::cerr << "report written to " << cfg.output_dir << "\n";
            return bundle.hard_errors == 0 ? 0 : 2;
        }
        if (report->parsed()) {
            std::ifstream in(fs::path(report_dir) / "eval_report.json");
            if (!in) throw ws::Error("no eval_report.json in " + report_dir);
            print_table(nlohmann::json::parse(in));
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
