#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "noisegate/complexity.hpp"
#include "noisegate/pipeline.hpp"
#include "noisegate/preprocess.hpp"

namespace noisegate {

/// Stable key order keeps serialized reports byte-identical across runs.
using Json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;

Json reduction_to_json(const ReductionReport& report);
Json noisy_area_to_json(const NoisyAreaSpec& noisy);
Json performance_impacts_to_json(const PerformanceImpactTable& table);
Json interpretation_to_json(const InterpretationImpact& impact);

/// Assembles the versioned run report. Optional sections are emitted as null.
Json build_report(const Json& config_echo, std::uint64_t seed, const ReductionReport& reduction,
                  const DiscretizationSpec& spec, const NoisyAreaSpec& noisy,
                  const std::optional<PerformanceImpactTable>& impacts,
                  const std::optional<InterpretationImpact>& interpretation,
                  const Json& experiments = Json());

/// Structural validation of a schema-1 report; returns human-readable
/// problems, empty when the document conforms.
std::vector<std::string> validate_report(const Json& report);

/// Long-format plot data: x_pct,measure,iteration,value.
void write_perf_curves_csv(const std::string& path, const std::vector<IncrementalPoint>& points);

/// Long-format rank data: feature,x_pct,iteration,rank.
void write_ranks_csv(const std::string& path, const std::vector<IncrementalPoint>& points);

/// Long-format complexity profile: dataset,bin,measure,value.
void write_quanta_csv(const std::string& path, const std::string& dataset_name,
                      const std::vector<std::pair<int, ComplexityReport>>& profile);

}  // namespace noisegate
