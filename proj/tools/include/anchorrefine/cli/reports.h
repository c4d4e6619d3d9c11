#ifndef ANCHORREFINE_CLI_REPORTS_H_
#define ANCHORREFINE_CLI_REPORTS_H_

// Report objects and flat tables written by the commands.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "anchorrefine/evalanalysis/evalanalysis.h"
#include "anchorrefine/pipeline/pipeline.h"

namespace anchorrefine::cli {

nlohmann::json ToJson(const evalanalysis::SuccessSummary& s);
nlohmann::json ToJson(const evalanalysis::TransitionCounts& c);
nlohmann::json ToJson(const evalanalysis::ResidualStats& s);
nlohmann::json ToJson(const evalanalysis::GripperErrorProfile& p);
nlohmann::json ToJson(const evalanalysis::LossDynamicsComparison& c);

// Stable text form: sorted keys, two-space indent, trailing newline.
std::string Dump(const nlohmann::json& j);

// seed,outcome,steps or, with `full`, paired anchor/full columns.
std::string OutcomesCsv(const std::vector<evalanalysis::RolloutResult>& anchor,
                        const std::vector<evalanalysis::RolloutResult>* full);
std::string ProfileCsv(const evalanalysis::GripperErrorProfile& p);
// '#' crossing table, then step,smoothed_a,smoothed_b.
std::string LossDynamicsCsv(const evalanalysis::LossDynamicsComparison& c);

// Success rates (percent) were originally published for each variant.
// Annotation only.
double PublishedSuccessRate(pipeline::Variant v);

struct AblationCell {
  pipeline::Variant variant = pipeline::Variant::kFull;
  uint64_t seed = 0;
  std::optional<double> success_rate;  // empty when the sub-run failed
  std::string error;
};

struct AblationRow {
  pipeline::Variant variant = pipeline::Variant::kFull;
  int n_ok = 0;
  int n_failed = 0;
  std::optional<double> mean_success;
  // Mean over seeds of (variant - Full), on seeds where both ran.
  std::optional<double> mean_delta_vs_full;
  double published_success = 0.0;
  double published_delta = 0.0;
};

std::vector<AblationRow> AblationTable(
    const std::vector<pipeline::Variant>& variants,
    const std::vector<AblationCell>& cells);
std::string AblationCsv(const std::vector<AblationRow>& rows);
std::string AblationCellsCsv(const std::vector<AblationCell>& cells);

}  // namespace anchorrefine::cli

#endif  // ANCHORREFINE_CLI_REPORTS_H_
