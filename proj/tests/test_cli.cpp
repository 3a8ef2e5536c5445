// Integration tests for the command-line surface: exit codes, file outputs,
// the expert cutpoint override, and the seed fallback.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "noisegate/dataset.hpp"
#include "noisegate/pipeline.hpp"
#include "noisegate/report.hpp"

using namespace noisegate;

namespace {

const std::string cli = NOISEGATE_CLI_PATH;

struct RunResult {
    int exit_code = -1;
    std::string stdout_text;
};

RunResult run_cli(const std::string& args, const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path();
    const std::string out_file = (dir / ("ng_cli_" + tag + ".out")).string();
    const std::string command = cli + " " + args + " > " + out_file + " 2> " + out_file + ".err";
    const int status = std::system(command.c_str());
    RunResult result;
    result.exit_code = WEXITSTATUS(status);
    std::ifstream in(out_file);
    std::ostringstream os;
    os << in.rdbuf();
    result.stdout_text = os.str();
    return result;
}

std::string small_dataset_path() {
    static std::string path = [] {
        const Dataset data = generate_synthetic(400, 3, 10.0, 4.0, 11);
        const std::string p =
            (std::filesystem::temp_directory_path() / "ng_cli_data.csv").string();
        write_csv(data, p, "y");
        return p;
    }();
    return path;
}

std::string crossing_zero_dataset_path() {
    static std::string path = [] {
        Dataset data;
        data.feature_names = {"x"};
        for (int i = 0; i < 60; ++i) {
            data.features.push_back(static_cast<double>(i));
            data.target.push_back(static_cast<double>(i) - 30.0);  // spans negatives
        }
        const std::string p =
            (std::filesystem::temp_directory_path() / "ng_cli_neg.csv").string();
        write_csv(data, p, "y");
        return p;
    }();
    return path;
}

Json load_json(const std::string& path) {
    std::ifstream in(path);
    return Json::parse(in);
}

}  // namespace

TEST_CASE("analyze happy path writes a valid report and plot data") {
    const auto out_dir = std::filesystem::temp_directory_path() / "ng_cli_run";
    const RunResult result = run_cli(
        "analyze --input " + small_dataset_path() +
            " --target y --threshold-method median --classifier knn --bootstraps 10 "
            "--rank-reps 20 --seed 5 --out " + out_dir.string(),
        "happy");
    CHECK(result.exit_code == 0);
    CHECK(result.stdout_text.find("recommendation:") != std::string::npos);

    const Json report = load_json((out_dir / "report.json").string());
    CHECK(validate_report(report).empty());
    CHECK(report["schema"] == 1);
    CHECK(report["seed"] == 5);
    CHECK(std::filesystem::exists(out_dir / "perf_curves.csv"));
    CHECK(std::filesystem::exists(out_dir / "ranks.csv"));
}

TEST_CASE("an expert cutpoint skips estimation and is echoed") {
    const auto out_dir = std::filesystem::temp_directory_path() / "ng_cli_cut";
    const RunResult result = run_cli(
        "analyze --input " + small_dataset_path() +
            " --target y --cutpoint 5.1 --classifier knn --bootstraps 8 --rank-reps 10 "
            "--seed 5 --out " + out_dir.string(),
        "cutpoint");
    CHECK(result.exit_code == 0);
    const Json report = load_json((out_dir / "report.json").string());
    CHECK(report["discretization"]["threshold"] == 5.1);
    CHECK(report["config_echo"]["cutpoint"] == 5.1);
}

TEST_CASE("a non-positive cutpoint yields exit 3 and a null noisy area") {
    const auto out_dir = std::filesystem::temp_directory_path() / "ng_cli_none";
    const RunResult result = run_cli(
        "analyze --input " + crossing_zero_dataset_path() +
            " --target y --cutpoint -1 --classifier knn --bootstraps 5 --seed 5 --out " +
            out_dir.string(),
        "noarea");
    CHECK(result.exit_code == 3);
    const Json report = load_json((out_dir / "report.json").string());
    CHECK(validate_report(report).empty());
    CHECK(report["discretization"]["noisy_area"].is_null());
    CHECK(report["performance_impacts"].is_null());
}

TEST_CASE("configuration and data errors use distinct exit codes") {
    CHECK(run_cli("analyze --input x.csv", "conf").exit_code == 1);  // missing --target
    CHECK(run_cli("analyze --input /nonexistent.csv --target y --seed 1", "missing")
              .exit_code == 2);
    CHECK(run_cli("analyze --input " + small_dataset_path() + " --target nope --seed 1",
                  "badcol")
              .exit_code == 2);
    CHECK(run_cli("analyze --input " + small_dataset_path() +
                      " --target y --classifier svm --seed 1",
                  "badkind")
              .exit_code == 1);
}

TEST_CASE("discretize prints one row per threshold method") {
    const RunResult result =
        run_cli("discretize --input " + small_dataset_path() + " --target y --seed 3", "disc");
    CHECK(result.exit_code == 0);
    CHECK(result.stdout_text.find("median") != std::string::npos);
    CHECK(result.stdout_text.find("ckmeans") != std::string::npos);
    CHECK(result.stdout_text.find("cart") != std::string::npos);
}

TEST_CASE("complexity emits the quanta profile with bins x measures rows") {
    const auto out_dir = std::filesystem::temp_directory_path() / "ng_cli_cx";
    const RunResult result = run_cli("complexity --input " + small_dataset_path() +
                                         " --target y --bins 5 --seed 3 --out " +
                                         out_dir.string(),
                                     "cx");
    CHECK(result.exit_code == 0);
    std::ifstream in((out_dir / "complexity_profile.csv").string());
    std::string line;
    std::getline(in, line);
    CHECK(line == "dataset,bin,measure,value");
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 5 * 4);
}

TEST_CASE("experiment reports the oversample table and transfer AUC") {
    const auto out_dir = std::filesystem::temp_directory_path() / "ng_cli_exp";
    const RunResult result = run_cli(
        "experiment --input " + small_dataset_path() +
            " --target y --classifier knn --bootstraps 5 --seed 3 --out " + out_dir.string(),
        "exp");
    CHECK(result.exit_code == 0);
    CHECK(result.stdout_text.find("300") != std::string::npos);
    const Json report = load_json((out_dir / "report.json").string());
    CHECK(report["experiments"]["oversample"].size() == 4);
    CHECK(report["experiments"].contains("noisy_to_extremes_auc"));
}

TEST_CASE("the seed falls back to the environment variable") {
    const auto out_dir = std::filesystem::temp_directory_path() / "ng_cli_env";
    const std::string command =
        "NOISEGATE_SEED=123 " + cli + " analyze --input " + small_dataset_path() +
        " --target y --classifier knn --bootstraps 5 --rank-reps 10 --out " +
        out_dir.string() + " > /dev/null 2>&1";
    REQUIRE(std::system(command.c_str()) == 0);
    const Json report = load_json((out_dir / "report.json").string());
    CHECK(report["seed"] == 123);
    CHECK(report["config_echo"]["seed_defaulted"] == false);
}
