#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "confheat/error.hpp"
#include "confheat/experiment.hpp"
#include "confheat/parallel.hpp"

namespace {

namespace ex = confheat::experiment;

// exit codes: 0 pass, 1 fail or inconclusive, 2 invalid config, 3 runtime error
constexpr int kInvalid = 2;
constexpr int kRuntime = 3;

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw confheat::IoError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int report_errors(const std::vector<std::string>& errors) {
  for (const auto& e : errors) std::cerr << "error: " << e << '\n';
  return kInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"confheat: Monte Carlo and exact checks for independent heat flow of point configurations"};
  app.require_subcommand(1);

  std::string run_path;
  std::optional<std::uint64_t> seed, replicas;
  std::optional<std::string> out;
  unsigned threads = 1;
  std::vector<std::string> sets;
  auto* run = app.add_subcommand("run", "Run an experiment config and write <prefix>.csv / <prefix>.json");
  run->add_option("config", run_path, "Experiment config (JSON)")->required();
  run->add_option("--seed", seed, "Override the seed");
  run->add_option("--replicas", replicas, "Override the replica count");
  run->add_option("--out", out, "Output prefix");
  run->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
  run->add_option("--set", sets, "Override a key: key=value or params.key=value");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a config and print it with defaults applied");
  validate->add_option("config", validate_path, "Experiment config (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      const ex::Validation v = ex::validate_config(slurp(validate_path));
      if (!v.ok()) return report_errors(v.errors);
      std::cout << v.config->effective().dump(2) << '\n';
      return 0;
    }

    ex::Json doc;
    try {
      doc = ex::Json::parse(slurp(run_path));
    } catch (const nlohmann::json::parse_error& e) {
      return report_errors({std::string("syntax error: ") + e.what()});
    }
    if (!doc.is_object()) return report_errors({"config must be a JSON object"});
    for (const auto& s : sets) ex::apply_override(doc, s);
    if (seed) doc["seed"] = *seed;
    if (replicas) doc["replicas"] = *replicas;
    if (out) doc["output"] = *out;
    const ex::Validation v = ex::validate_document(doc);
    if (!v.ok()) return report_errors(v.errors);
    const unsigned workers = threads == 0 ? confheat::default_threads() : threads;
    const confheat::report::Report rep = ex::run(*v.config, workers);
    rep.write(v.config->output);
    std::cout << v.config->experiment << ": " << confheat::to_string(rep.verdict()) << " (" << v.config->output
              << ".csv, " << v.config->output << ".json)\n";
    return rep.verdict() == confheat::Verdict::kPass ? 0 : 1;
  } catch (const confheat::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
}
