#include <CLI11.hpp>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "noisegate/complexity.hpp"
#include "noisegate/dataset.hpp"
#include "noisegate/discretize.hpp"
#include "noisegate/errors.hpp"
#include "noisegate/pipeline.hpp"
#include "noisegate/preprocess.hpp"
#include "noisegate/report.hpp"

namespace {

using namespace noisegate;

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitDataError = 2;
constexpr int kExitInfeasible = 3;

struct RunConfig {
    std::string input;
    std::string target;
    std::string threshold_method = "median";
    std::optional<double> cutpoint;  // expert override skips estimation
    double step_size_pct = 5.0;
    double extremes_fraction = 0.10;
    std::string classifier = "rf";
    int n_boot = 100;
    int top_k = 3;
    int n_rep = 100;
    int n_bins = 5;
    std::uint64_t seed = 42;
    bool seed_given = false;
    std::string out_dir = ".";
    double rho_threshold = 0.7;
    double r2_threshold = 0.9;
    bool reuse_x0_params = false;
    bool absolute_rank_diff = false;
};

void add_common_options(CLI::App* cmd, RunConfig& cfg, bool with_model_options) {
    cmd->add_option("--input", cfg.input, "Input CSV file")->required();
    cmd->add_option("--target", cfg.target, "Name of the dependent-variable column")->required();
    cmd->add_option("--threshold-method", cfg.threshold_method,
                    "Discretization threshold estimator")
        ->check(CLI::IsMember({"median", "ckmeans", "cart"}));
    cmd->add_option("--cutpoint", cfg.cutpoint,
                    "Expert-supplied cutpoint; skips threshold estimation");
    cmd->add_option("--step-size", cfg.step_size_pct, "Window increment in percent")
        ->check(CLI::Range(1e-6, 100.0));
    cmd->add_option("--seed", cfg.seed, "Random seed (NOISEGATE_SEED is the fallback)");
    cmd->add_option("--out", cfg.out_dir, "Output directory");
    cmd->set_config("--config", "", "TOML/INI config file (CLI flags take precedence)");
    if (with_model_options) {
        cmd->add_option("--extremes", cfg.extremes_fraction, "Extremes fraction per tail")
            ->check(CLI::Range(1e-6, 0.4999));
        cmd->add_option("--classifier", cfg.classifier, "Classifier family")
            ->check(CLI::IsMember({"rf", "lr", "cart", "knn"}));
        cmd->add_option("--bootstraps", cfg.n_boot, "Out-of-sample bootstrap iterations")
            ->check(CLI::Range(1, 100000));
        cmd->add_option("--top-k", cfg.top_k, "Top ranks for the rank-shift analysis")
            ->check(CLI::Range(1, 100));
        cmd->add_option("--rank-reps", cfg.n_rep, "Rank-shift resampling repetitions")
            ->check(CLI::Range(1, 100000));
        cmd->add_option("--rho-threshold", cfg.rho_threshold, "Correlation-filter threshold")
            ->check(CLI::Range(1e-6, 1.0));
        cmd->add_option("--r2-threshold", cfg.r2_threshold, "Redundancy-filter threshold")
            ->check(CLI::Range(1e-6, 1.0));
        cmd->add_flag("--reuse-x0-params", cfg.reuse_x0_params,
                      "Reuse the x = 0 hyper-parameters at every window");
        cmd->add_flag("--absolute-rank-diff", cfg.absolute_rank_diff,
                      "Test absolute instead of signed rank differences");
    }
}

void apply_seed_fallback(const CLI::App* cmd, RunConfig& cfg) {
    cfg.seed_given = cmd->count("--seed") > 0;
    if (!cfg.seed_given) {
        if (const char* env = std::getenv("NOISEGATE_SEED")) {
            std::uint64_t value = 0;
            const auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), value);
            if (ec == std::errc{} && *ptr == '\0') {
                cfg.seed = value;
                cfg.seed_given = true;
            }
        }
    }
}

Json config_echo(const RunConfig& cfg) {
    Json j;
    j["input"] = cfg.input;
    j["target"] = cfg.target;
    j["threshold_method"] = cfg.threshold_method;
    if (cfg.cutpoint)
        j["cutpoint"] = *cfg.cutpoint;
    else
        j["cutpoint"] = Json();
    j["step_size_pct"] = cfg.step_size_pct;
    j["extremes_fraction"] = cfg.extremes_fraction;
    j["classifier"] = cfg.classifier;
    j["bootstraps"] = cfg.n_boot;
    j["top_k"] = cfg.top_k;
    j["rank_reps"] = cfg.n_rep;
    j["rho_threshold"] = cfg.rho_threshold;
    j["r2_threshold"] = cfg.r2_threshold;
    j["reuse_x0_params"] = cfg.reuse_x0_params;
    j["absolute_rank_diff"] = cfg.absolute_rank_diff;
    j["seed_defaulted"] = !cfg.seed_given;
    return j;
}

double estimate_threshold(const Dataset& data, ThresholdMethod method) {
    switch (method) {
        case ThresholdMethod::Median: return threshold_median(data.target);
        case ThresholdMethod::Ckmeans: return threshold_ckmeans(data.target);
        case ThresholdMethod::CartStump: return threshold_cart(data.target);
    }
    throw ConfigError("unknown threshold method");
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path.string());
    out << text;
}

std::string fixed(double v, int precision = 4) {
    char buf[64];
    const int written = std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return std::string(buf, static_cast<std::size_t>(written));
}

int cmd_analyze(const RunConfig& cfg) {
    const Dataset raw = load_csv(cfg.input, cfg.target);
    auto [data, reduction] = reduce_features(raw, cfg.rho_threshold, cfg.r2_threshold);

    const ThresholdMethod method = *threshold_method_from_string(cfg.threshold_method);
    const double cutpoint = cfg.cutpoint ? *cfg.cutpoint : estimate_threshold(data, method);
    const DiscretizationSpec spec = discretize(data, cutpoint, method);
    const NoisyAreaSpec noisy = estimate_noisy_area(data, cutpoint, cfg.step_size_pct, cfg.seed);

    std::filesystem::create_directories(cfg.out_dir);
    const std::filesystem::path out_dir(cfg.out_dir);

    std::cout << "dataset: " << cfg.input << " (" << data.n_rows() << " rows, "
              << data.n_features() << " of " << raw.n_features() << " features retained)\n";
    std::cout << "threshold (" << cfg.threshold_method << "): " << fixed(cutpoint)
              << (cfg.cutpoint ? " [expert override]" : "") << "\n";

    if (!noisy.has_noisy_area()) {
        const Json report = build_report(config_echo(cfg), cfg.seed, reduction, spec, noisy,
                                         std::nullopt, std::nullopt);
        write_text_file(out_dir / "report.json", report.dump(2) + "\n");
        std::cout << "noisy area: none found (empty candidate band)\n";
        std::cout << "recommendation: use whole dataset\n";
        std::cerr << "no noisy area: skipping the incremental analysis\n";
        return kExitInfeasible;
    }

    std::cout << "noisy area: limit " << fixed(*noisy.limit_pct, 1) << "%, "
              << fixed(100.0 * noisy.noisy_fraction, 1) << "% of rows, step "
              << fixed(cfg.step_size_pct, 1) << "\n";

    const ClassifierKind kind = *classifier_kind_from_string(cfg.classifier);
    const std::vector<IncrementalPoint> points = incremental_analysis(
        data, spec, noisy, kind, cfg.n_boot, cfg.seed, cfg.reuse_x0_params);

    std::size_t feasible = 0;
    for (const auto& point : points) feasible += !point.infeasible;
    if (feasible < 2) {
        const Json report = build_report(config_echo(cfg), cfg.seed, reduction, spec, noisy,
                                         std::nullopt, std::nullopt);
        write_text_file(out_dir / "report.json", report.dump(2) + "\n");
        std::cerr << "every window left a single-class dataset; no comparisons possible\n";
        return kExitInfeasible;
    }

    const PerformanceImpactTable impacts = performance_impact(points);
    const InterpretationImpact interpretation = interpretation_impact(
        points, cfg.top_k, cfg.n_rep, cfg.seed, cfg.absolute_rank_diff);

    const Json report = build_report(config_echo(cfg), cfg.seed, reduction, spec, noisy,
                                     impacts, interpretation);
    const std::vector<std::string> problems = validate_report(report);
    if (!problems.empty()) {
        for (const auto& problem : problems) std::cerr << "report problem: " << problem << "\n";
        return kExitDataError;
    }
    write_text_file(out_dir / "report.json", report.dump(2) + "\n");
    write_perf_curves_csv((out_dir / "perf_curves.csv").string(), points);
    write_ranks_csv((out_dir / "ranks.csv").string(), points);

    std::cout << "\nclassifier: " << cfg.classifier << ", " << cfg.n_boot << " bootstraps\n";
    std::cout << "measure     magnitude%   x_first   p-value   effect\n";
    for (const auto& impact : impacts.impacts) {
        std::cout << impact.measure;
        for (std::size_t s = impact.measure.size(); s < 12; ++s) std::cout << ' ';
        std::cout << (impact.undefined_magnitude ? "   n/a  " : fixed(impact.magnitude_pct, 2))
                  << "       " << fixed(impact.x_first, 1) << "      " << fixed(impact.p_value, 3)
                  << "     " << to_string(impact.effect) << "\n";
    }
    std::cout << "interpretation: p = " << fixed(interpretation.overall_p, 3)
              << ", d = " << fixed(interpretation.overall_d, 2) << " ("
              << to_string(interpretation.effect) << ")\n";
    std::cout << "rank-shift likelihood:";
    for (const auto& [rank, likelihood] : interpretation.rank_shift)
        std::cout << " rank" << rank << " = " << fixed(likelihood, 2);
    std::cout << "\nrecommendation: " << impacts.recommendation << "\n";
    return kExitOk;
}

int cmd_discretize(const RunConfig& cfg) {
    const Dataset data = load_csv(cfg.input, cfg.target);

    std::cout << "method    threshold      noisy_area%   limit    step_size\n";
    auto print_row = [&](const std::string& name, double cutpoint) {
        const NoisyAreaSpec noisy =
            estimate_noisy_area(data, cutpoint, cfg.step_size_pct, cfg.seed);
        std::cout << name;
        for (std::size_t s = name.size(); s < 10; ++s) std::cout << ' ';
        std::cout << fixed(cutpoint) << "        ";
        if (noisy.has_noisy_area())
            std::cout << fixed(100.0 * noisy.noisy_fraction, 1) << "         "
                      << fixed(*noisy.limit_pct, 1);
        else
            std::cout << "*            *  ";
        std::cout << "     " << fixed(cfg.step_size_pct, 1) << "\n";
    };

    for (const auto method :
         {ThresholdMethod::Median, ThresholdMethod::Ckmeans, ThresholdMethod::CartStump}) {
        try {
            print_row(to_string(method), estimate_threshold(data, method));
        } catch (const DegenerateTarget& e) {
            std::cout << to_string(method) << "    (degenerate: " << e.what() << ")\n";
        }
    }
    if (cfg.cutpoint) print_row("expert", *cfg.cutpoint);
    return kExitOk;
}

int cmd_complexity(const RunConfig& cfg) {
    const Dataset data = load_csv(cfg.input, cfg.target);
    const ThresholdMethod method = *threshold_method_from_string(cfg.threshold_method);
    const double cutpoint = cfg.cutpoint ? *cfg.cutpoint : estimate_threshold(data, method);
    const DiscretizationSpec spec = discretize(data, cutpoint, method);

    const QuantaAssignment quanta = bin_into_quanta(data, spec.labels, cfg.n_bins);
    const auto profile = quanta_profile(data, spec.labels, quanta, cfg.seed);

    std::filesystem::create_directories(cfg.out_dir);
    const std::filesystem::path out =
        std::filesystem::path(cfg.out_dir) / "complexity_profile.csv";
    write_quanta_csv(out.string(), std::filesystem::path(cfg.input).stem().string(), profile);

    std::cout << "bin   f1        l2        n2        n4\n";
    for (const auto& [bin, report] : profile) {
        std::cout << bin << "     " << fixed(report.f1) << "    " << fixed(report.l2) << "    "
                  << fixed(report.n2) << "    " << fixed(report.n4)
                  << (report.single_class ? "   (degenerate quantum)" : "") << "\n";
    }
    std::cout << "wrote " << out.string() << "\n";
    return kExitOk;
}

int cmd_experiment(const RunConfig& cfg) {
    const Dataset raw = load_csv(cfg.input, cfg.target);
    auto [data, reduction] = reduce_features(raw, cfg.rho_threshold, cfg.r2_threshold);

    const ThresholdMethod method = *threshold_method_from_string(cfg.threshold_method);
    const double cutpoint = cfg.cutpoint ? *cfg.cutpoint : estimate_threshold(data, method);
    const DiscretizationSpec spec = discretize(data, cutpoint, method);
    const NoisyAreaSpec noisy = estimate_noisy_area(data, cutpoint, cfg.step_size_pct, cfg.seed);
    if (!noisy.has_noisy_area()) {
        std::cerr << "no noisy area: experiments need a non-empty noisy area\n";
        return kExitInfeasible;
    }
    const ExtremesSpec ext = extremes(data, cfg.extremes_fraction);
    const ClassifierKind kind = *classifier_kind_from_string(cfg.classifier);

    const std::vector<OversampleRow> table = oversample_experiment(
        data, spec, noisy, ext, kind, OversampleConfig{}, cfg.n_boot, cfg.seed);
    const double noisy_auc =
        noisy_to_extremes_experiment(data, spec, noisy, ext, cfg.n_boot, cfg.seed);

    Json experiments;
    Json oversample = Json::array();
    std::cout << "oversample%   median AUC   delta AUC\n";
    for (const auto& row : table) {
        std::cout << row.pct << "           " << fixed(row.median_auc) << "      "
                  << fixed(row.delta_auc) << "\n";
        oversample.push_back({{"pct", row.pct},
                              {"median_auc", row.median_auc},
                              {"delta_auc", row.delta_auc}});
    }
    experiments["oversample"] = oversample;
    experiments["noisy_to_extremes_auc"] = noisy_auc;
    std::cout << "noisy area -> extremes median AUC: " << fixed(noisy_auc) << "\n";

    std::filesystem::create_directories(cfg.out_dir);
    const Json report = build_report(config_echo(cfg), cfg.seed, reduction, spec, noisy,
                                     std::nullopt, std::nullopt, experiments);
    write_text_file(std::filesystem::path(cfg.out_dir) / "report.json", report.dump(2) + "\n");
    return kExitOk;
}

struct SynthConfig {
    std::size_t n = 2000;
    std::size_t p = 5;
    double noise_band_pct = 10.0;
    double signal_strength = 4.0;
    std::uint64_t seed = 42;
    std::string out = "synthetic.csv";
};

int cmd_synth(const SynthConfig& cfg) {
    const Dataset data =
        generate_synthetic(cfg.n, cfg.p, cfg.noise_band_pct, cfg.signal_strength, cfg.seed);
    write_csv(data, cfg.out, "y");
    std::cout << "wrote " << cfg.out << " (" << data.n_rows() << " rows, " << data.n_features()
              << " features)\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantifies how discretization noise near an artificial cutpoint affects "
                 "classifier performance and interpretation"};
    app.require_subcommand(1);

    RunConfig cfg;
    SynthConfig synth_cfg;

    CLI::App* analyze = app.add_subcommand(
        "analyze", "Run the full workflow: reduce, discretize, estimate the noisy area, "
                   "incremental analysis, impact report");
    add_common_options(analyze, cfg, true);

    CLI::App* disc = app.add_subcommand(
        "discretize", "Print thresholds, noisy-area sizes and limits for all methods");
    add_common_options(disc, cfg, false);

    CLI::App* complexity = app.add_subcommand(
        "complexity", "Per-quantum data-complexity profile of the dependent variable");
    add_common_options(complexity, cfg, false);
    complexity->add_option("--bins", cfg.n_bins, "Number of quanta per class")
        ->check(CLI::Range(2, 100));

    CLI::App* experiment = app.add_subcommand(
        "experiment", "Oversampling and noisy-area-to-extremes experiments");
    add_common_options(experiment, cfg, true);

    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic benchmark CSV");
    synth->add_option("--n", synth_cfg.n, "Rows")->check(CLI::Range(50, 10000000));
    synth->add_option("--p", synth_cfg.p, "Features")->check(CLI::Range(2, 1000));
    synth->add_option("--noise-band", synth_cfg.noise_band_pct,
                      "Planted noisy band half-width in percent of the median")
        ->check(CLI::Range(0.0, 100.0));
    synth->add_option("--signal", synth_cfg.signal_strength, "Signal strength");
    synth->add_option("--seed", synth_cfg.seed, "Random seed");
    synth->add_option("--out", synth_cfg.out, "Output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (synth->parsed()) return cmd_synth(synth_cfg);
        CLI::App* active = analyze->parsed()      ? analyze
                           : disc->parsed()       ? disc
                           : complexity->parsed() ? complexity
                                                  : experiment;
        apply_seed_fallback(active, cfg);
        if (analyze->parsed()) return cmd_analyze(cfg);
        if (disc->parsed()) return cmd_discretize(cfg);
        if (complexity->parsed()) return cmd_complexity(cfg);
        return cmd_experiment(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataError;
    }
}
