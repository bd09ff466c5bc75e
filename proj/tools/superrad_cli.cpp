// superrad: run scenario configs or built-in presets and write data files.
//
//   superrad presets
//   superrad print-preset fig4 > fig4.json
//   superrad run --preset fig4 --out results/fig4 --plot
//   superrad run --config my.json --out results/my --seed 7 --jobs 4
//
// Exit status: 0 on success, 2 for config or validation errors, 3 for solver
// errors, 1 for anything else.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "superrad/errors.hpp"
#include "superrad/plot.hpp"
#include "superrad/runner.hpp"
#include "superrad/scenario.hpp"

namespace {

int report_failure(const std::string& what, int code) {
  std::cerr << "superrad: error: " << what << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cavity superradiance simulator"};
  app.require_subcommand(1);

  auto* presets_cmd = app.add_subcommand("presets", "List built-in scenario presets");

  std::string print_name;
  auto* print_cmd = app.add_subcommand("print-preset", "Print a preset as a JSON config");
  print_cmd->add_option("name", print_name, "Preset name")->required();

  std::string config_path, preset_name, out_dir;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 0;
  bool plot = false;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write its data files");
  auto* config_opt = run_cmd->add_option("-c,--config", config_path, "Scenario config (JSON)");
  auto* preset_opt = run_cmd->add_option("-p,--preset", preset_name, "Built-in preset name");
  config_opt->excludes(preset_opt);
  preset_opt->excludes(config_opt);
  run_cmd->add_option("-o,--out", out_dir, "Output directory")->required();
  run_cmd->add_option("-s,--seed", seed, "Seed override for stochastic tipping");
  run_cmd->add_option("-j,--jobs", jobs, "Parallel runs (0 = available cores)");
  run_cmd->add_flag("--plot", plot, "Render SVG plots from the written data files");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*presets_cmd) {
      for (const auto& p : superrad::list_presets()) std::cout << p.name << "\t" << p.description << '\n';
      return 0;
    }
    if (*print_cmd) {
      std::cout << superrad::emit_scenario(superrad::preset(print_name));
      return 0;
    }
    if (config_path.empty() == preset_name.empty())
      return report_failure("run needs exactly one of --config or --preset", 2);

    const auto scenario =
        config_path.empty() ? superrad::preset(preset_name) : superrad::load_scenario(config_path);
    superrad::RunOptions options;
    options.jobs = jobs;
    options.seed_override = seed;
    const auto artifacts = superrad::execute_scenario(scenario, options);
    if (!artifacts.fast_cavity.passed) {
      const auto& c = artifacts.fast_cavity.tightest();
      std::cerr << "superrad: warning: fast-cavity condition not met (kappa / " << c.name << " = " << c.margin
                << ")\n";
    }
    for (const auto& r : artifacts.runs)
      if (r.bin_check && !r.bin_check->converged)
        std::cerr << "superrad: warning: " << r.label << ": peak changes by " << 100 * r.bin_check->relative_change
                  << "% at " << r.bin_check->doubled_bins << " bins\n";
    for (const auto& path : superrad::write_artifacts(artifacts, out_dir)) std::cout << path.string() << '\n';
    if (plot)
      for (const auto& path : superrad::plot::render_directory(out_dir)) std::cout << path.string() << '\n';
    return 0;
  } catch (const superrad::ConfigError& e) {
    return report_failure(e.what(), 2);
  } catch (const superrad::ValidationError& e) {
    return report_failure(e.what(), 2);
  } catch (const superrad::StiffnessError& e) {
    return report_failure(e.what(), 3);
  } catch (const superrad::ClosureInstabilityError& e) {
    return report_failure(e.what(), 3);
  } catch (const superrad::CapacityError& e) {
    return report_failure(e.what(), 3);
  } catch (const std::exception& e) {
    return report_failure(e.what(), 1);
  }
}
