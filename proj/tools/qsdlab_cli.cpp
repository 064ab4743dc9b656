// qsdlab <experiment> [--config PATH] [--out PATH] [--format csv|json] [--seed N]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical tolerance failure.

#include "qsdlab/experiments.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitTolerance = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Run a named state-difference experiment and emit CSV or JSON rows."};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string format_text;
  std::optional<std::uint64_t> seed;

  for (const auto& name : qsd::experiment_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config_path, "key=value or JSON config file")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "output file (stdout when omitted)");
    sub->add_option("--format", format_text, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", seed, "PRNG seed (overrides the config)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  const std::string experiment = app.get_subcommands().front()->get_name();
  try {
    const qsd::ExperimentConfig config =
        config_path.empty() ? qsd::ExperimentConfig{} : qsd::ExperimentConfig::from_file(config_path);
    const qsd::OutputFormat format =
        format_text.empty() ? qsd::default_format(experiment) : qsd::parse_output_format(format_text);
    const qsd::ExperimentOutput out = qsd::run_experiment(experiment, config, format, seed);

    if (out_path.empty()) {
      std::cout << out.text << std::flush;
    } else {
      std::ofstream file(out_path, std::ios::binary);
      if (!file) {
        std::cerr << "qsdlab: cannot write '" << out_path << "'\n";
        return kExitConfig;
      }
      file << out.text;
    }
    if (!out.tolerance_ok) {
      std::cerr << "qsdlab " << experiment << ": tolerance failure: " << out.message << "\n";
      return kExitTolerance;
    }
  } catch (const qsd::ConfigError& e) {
    std::cerr << "qsdlab " << experiment << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "qsdlab " << experiment << ": invalid parameter: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "qsdlab " << experiment << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}
