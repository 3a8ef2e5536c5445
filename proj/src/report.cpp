#include "noisegate/report.hpp"

#include <charconv>
#include <fstream>

#include "noisegate/complexity.hpp"
#include "noisegate/errors.hpp"

namespace noisegate {

namespace {

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void check(bool condition, const std::string& message, std::vector<std::string>& problems) {
    if (!condition) problems.push_back(message);
}

}  // namespace

Json reduction_to_json(const ReductionReport& report) {
    Json j;
    j["retained"] = report.retained;
    Json dropped_corr = Json::object();
    for (const auto& [feature, representative] : report.dropped_correlated)
        dropped_corr[feature] = representative;
    j["dropped_correlated"] = dropped_corr;
    Json dropped_red = Json::array();
    for (const auto& [feature, r2] : report.dropped_redundant)
        dropped_red.push_back({{"feature", feature}, {"r_squared", r2}});
    j["dropped_redundant"] = dropped_red;
    j["constant_features"] = report.constant_features;
    j["ridge_jitter_used"] = report.ridge_jitter_used;
    return j;
}

Json noisy_area_to_json(const NoisyAreaSpec& noisy) {
    if (!noisy.has_noisy_area()) return Json();
    Json j;
    j["limit"] = *noisy.limit_pct;
    j["noisy_pct"] = 100.0 * noisy.noisy_fraction;
    j["lower"] = noisy.lower;
    j["upper"] = noisy.upper;
    Json steps = Json::array();
    for (const auto& [x, n4] : noisy.per_step_nonlinearity)
        steps.push_back({{"x", x}, {"n4", n4}});
    j["per_step_nonlinearity"] = steps;
    return j;
}

Json performance_impacts_to_json(const PerformanceImpactTable& table) {
    Json impacts = Json::array();
    for (const auto& impact : table.impacts) {
        Json j;
        j["measure"] = impact.measure;
        if (impact.undefined_magnitude)
            j["magnitude_pct"] = Json();
        else
            j["magnitude_pct"] = impact.magnitude_pct;
        j["x_first"] = impact.x_first;
        j["p_value"] = impact.p_value;
        j["cohens_d"] = impact.cohens_d;
        j["effect"] = to_string(impact.effect);
        Json steps = Json::array();
        for (const auto& step : impact.steps)
            steps.push_back({{"x", step.x_pct}, {"p_value", step.p_value},
                             {"cohens_d", step.cohens_d}});
        j["steps"] = steps;
        impacts.push_back(j);
    }
    return impacts;
}

Json interpretation_to_json(const InterpretationImpact& impact) {
    Json j;
    j["overall_p"] = impact.overall_p;
    j["overall_d"] = impact.overall_d;
    j["effect"] = to_string(impact.effect);
    j["absolute_differences"] = impact.absolute_differences;
    Json shift = Json::object();
    for (const auto& [rank, likelihood] : impact.rank_shift)
        shift[std::to_string(rank)] = likelihood;
    j["rank_shift"] = shift;
    Json whole = Json::object();
    for (const auto& [name, rank] : impact.ranks_whole) whole[name] = rank;
    j["ranks_whole"] = whole;
    Json removed = Json::object();
    for (const auto& [name, rank] : impact.ranks_removed) removed[name] = rank;
    j["ranks_removed"] = removed;
    return j;
}

Json build_report(const Json& config_echo, std::uint64_t seed, const ReductionReport& reduction,
                  const DiscretizationSpec& spec, const NoisyAreaSpec& noisy,
                  const std::optional<PerformanceImpactTable>& impacts,
                  const std::optional<InterpretationImpact>& interpretation,
                  const Json& experiments) {
    Json report;
    report["schema"] = kReportSchemaVersion;
    report["seed"] = seed;
    report["config_echo"] = config_echo;
    report["preprocessing"] = reduction_to_json(reduction);

    Json discretization;
    discretization["method"] = to_string(spec.method);
    discretization["threshold"] = spec.cutpoint;
    discretization["step_size"] = noisy.step_size_pct;
    if (noisy.has_noisy_area()) {
        discretization["limit"] = *noisy.limit_pct;
        discretization["noisy_pct"] = 100.0 * noisy.noisy_fraction;
    } else {
        discretization["limit"] = Json();
        discretization["noisy_pct"] = Json();
    }
    discretization["noisy_area"] = noisy_area_to_json(noisy);
    report["discretization"] = discretization;

    report["performance_impacts"] = impacts ? performance_impacts_to_json(*impacts) : Json();
    if (impacts) report["recommendation"] = impacts->recommendation;
    else report["recommendation"] = Json();
    report["interpretation"] = interpretation ? interpretation_to_json(*interpretation) : Json();
    report["experiments"] = experiments;
    return report;
}

std::vector<std::string> validate_report(const Json& report) {
    std::vector<std::string> problems;
    check(report.is_object(), "report is not an object", problems);
    if (!report.is_object()) return problems;

    check(report.value("schema", -1) == kReportSchemaVersion, "schema must be 1", problems);
    check(report.contains("seed") && report["seed"].is_number_unsigned(),
          "seed must be an unsigned number", problems);
    check(report.contains("config_echo") && report["config_echo"].is_object(),
          "config_echo must be an object", problems);

    if (report.contains("preprocessing") && report["preprocessing"].is_object()) {
        const Json& pre = report["preprocessing"];
        check(pre.contains("retained") && pre["retained"].is_array() && !pre["retained"].empty(),
              "preprocessing.retained must be a non-empty array", problems);
    } else {
        problems.push_back("preprocessing must be an object");
    }

    if (report.contains("discretization") && report["discretization"].is_object()) {
        const Json& disc = report["discretization"];
        check(disc.contains("method") && disc["method"].is_string(),
              "discretization.method must be a string", problems);
        check(disc.contains("threshold") && disc["threshold"].is_number(),
              "discretization.threshold must be a number", problems);
        check(disc.contains("limit"), "discretization.limit is required (may be null)", problems);
        check(disc.contains("noisy_area"), "discretization.noisy_area is required", problems);
    } else {
        problems.push_back("discretization must be an object");
    }

    if (report.contains("performance_impacts") && report["performance_impacts"].is_array()) {
        for (const Json& impact : report["performance_impacts"]) {
            if (!impact.is_object()) {
                problems.push_back("performance impact entries must be objects");
                continue;
            }
            const double p = impact.value("p_value", -1.0);
            check(p >= 0.0 && p <= 1.0, "impact p_value out of [0, 1]", problems);
            check(impact.contains("measure") && impact["measure"].is_string(),
                  "impact measure must be a string", problems);
        }
    } else {
        check(report.contains("performance_impacts") && report["performance_impacts"].is_null(),
              "performance_impacts must be an array or null", problems);
    }

    if (report.contains("interpretation") && report["interpretation"].is_object()) {
        const Json& interp = report["interpretation"];
        const double p = interp.value("overall_p", -1.0);
        check(p >= 0.0 && p <= 1.0, "interpretation overall_p out of [0, 1]", problems);
        if (interp.contains("rank_shift") && interp["rank_shift"].is_object()) {
            for (const auto& [rank, likelihood] : interp["rank_shift"].items()) {
                const double v = likelihood.is_number() ? likelihood.get<double>() : -1.0;
                check(v >= 0.0 && v <= 1.0, "rank_shift likelihood out of [0, 1]", problems);
            }
        } else {
            problems.push_back("interpretation.rank_shift must be an object");
        }
    } else {
        check(report.contains("interpretation") && report["interpretation"].is_null(),
              "interpretation must be an object or null", problems);
    }

    check(report.contains("experiments"), "experiments key is required (may be null)", problems);
    return problems;
}

void write_perf_curves_csv(const std::string& path, const std::vector<IncrementalPoint>& points) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << "x_pct,measure,iteration,value\n";
    const auto& names = PerfVector::measure_names();
    for (const auto& point : points) {
        if (point.infeasible) continue;
        for (std::size_t m = 0; m < names.size(); ++m)
            for (std::size_t i = 0; i < point.boot.perf.size(); ++i)
                out << format_double(point.x_pct) << ',' << names[m] << ',' << i << ','
                    << format_double(point.boot.perf[i].measure(m)) << '\n';
    }
}

void write_ranks_csv(const std::string& path, const std::vector<IncrementalPoint>& points) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << "feature,x_pct,iteration,rank\n";
    for (const auto& point : points) {
        if (point.infeasible) continue;
        const auto& features = point.boot.feature_names;
        for (std::size_t i = 0; i < point.boot.iteration_ranks.size(); ++i)
            for (std::size_t j = 0; j < features.size(); ++j)
                out << features[j] << ',' << format_double(point.x_pct) << ',' << i << ','
                    << point.boot.iteration_ranks[i][j] << '\n';
    }
}

void write_quanta_csv(const std::string& path, const std::string& dataset_name,
                      const std::vector<std::pair<int, ComplexityReport>>& profile) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << "dataset,bin,measure,value\n";
    for (const auto& [bin, report] : profile) {
        out << dataset_name << ',' << bin << ",f1," << format_double(report.f1) << '\n';
        out << dataset_name << ',' << bin << ",l2," << format_double(report.l2) << '\n';
        out << dataset_name << ',' << bin << ",n2," << format_double(report.n2) << '\n';
        out << dataset_name << ',' << bin << ",n4," << format_double(report.n4) << '\n';
    }
}

}  // namespace noisegate
