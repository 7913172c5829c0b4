#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "confheat/report.hpp"

namespace confheat::experiment {

using Json = nlohmann::ordered_json;

/// Names accepted in the "experiment" field.
const std::vector<std::string>& experiment_names();

/// A fully resolved experiment: every parameter present, defaults applied.
struct ExperimentConfig {
  std::string experiment;
  Json params = Json::object();
  std::uint64_t seed = 1;
  std::uint64_t replicas = 10'000;
  std::string output = "confheat";

  /// Document echoed into reports. `output` is a run option and is left out.
  Json effective() const;
};

struct Validation {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;  // every problem found, not only the first
  bool ok() const { return config.has_value(); }
};

Validation validate_config(std::string_view text);
Validation validate_document(const Json& document);

/// Applies one `key=value` override. Top-level keys (experiment, seed,
/// replicas, output) are set directly; anything else, optionally written as
/// params.<key>, goes into params. The value is parsed as JSON, falling back
/// to a plain string. InputError on malformed assignments.
void apply_override(Json& document, std::string_view assignment);

/// Runs the experiment; replicas run on `threads` workers and results do not
/// depend on it.
report::Report run(const ExperimentConfig& config, unsigned threads = 1);

/// run() plus <output>.csv and <output>.json. Returns 0 iff the verdict is pass.
int run_experiment(const ExperimentConfig& config, unsigned threads = 1);

}  // namespace confheat::experiment
