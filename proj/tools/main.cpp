#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "commands.hpp"
#include "manifest.hpp"
#include "mnfret/error.hpp"

namespace {

unsigned default_jobs() {
  if (const char* env = std::getenv("MNF_RETRIEVE_JOBS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring MNF_RETRIEVE_JOBS='" << env << "'\n";
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

int main(int argc, char** argv) {
  using namespace mnfret::cli;

  CLI::App app{"Noise-aware PCA/MNF feature extraction and linear profile retrieval"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic spectral and profile cubes");
  synth_cmd->add_option("--config", synth.config, "Scene config JSON (default scene if omitted)");
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--orbits", synth.orbits, "Number of orbits to generate");
  synth_cmd->add_option("--train-orbits", synth.train_orbits, "Orbits meant for training");
  synth_cmd->add_option("--seed", synth.seed, "Override the scene seed");

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a PCA or MNF basis on training cubes");
  fit_cmd->add_option("--method", fit.method, "pca or mnf")->required()->check(CLI::IsMember({"pca", "mnf"}));
  fit_cmd->add_option("--train", fit.train, "Training spectral cubes")->required();
  fit_cmd->add_option("--k", fit.k, "Number of components")->required();
  fit_cmd->add_option("--ridge", fit.ridge, "Relative ridge on the noise covariance (MNF)");
  fit_cmd->add_option("--noise-scaling", fit.noise_scaling, "raw or unit")
      ->check(CLI::IsMember({"raw", "unit"}));
  fit_cmd->add_option("--out", fit.out, "Output directory")->required();

  RetrieveOptions retrieve;
  auto* retrieve_cmd =
      app.add_subcommand("retrieve", "Fit a linear retrieval model, or apply one with --model");
  retrieve_cmd->add_option("--basis", retrieve.basis, "Basis written by fit")->required();
  retrieve_cmd->add_option("--model", retrieve.model, "Trained model; predicts instead of fitting");
  retrieve_cmd->add_option("--cubes", retrieve.cubes, "Spectral cubes")->required();
  retrieve_cmd->add_option("--targets", retrieve.targets, "Profile cubes aligned with --cubes");
  retrieve_cmd->add_option("--w", retrieve.window, "Odd neighbourhood window");
  retrieve_cmd->add_option("--k", retrieve.k, "Leading components to use");
  retrieve_cmd->add_option("--ridge", retrieve.ridge, "Regression ridge");
  retrieve_cmd->add_option("--padding", retrieve.padding, "mirror or replicate")
      ->check(CLI::IsMember({"mirror", "replicate"}));
  retrieve_cmd->add_option("--out", retrieve.out, "Output directory")->required();

  SweepCommandOptions sweep;
  sweep.jobs = default_jobs();
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the method x k x w x seed experiment grid");
  sweep_cmd->add_option("--config", sweep.config, "Sweep config JSON")->required();
  sweep_cmd->add_option("--out", sweep.out, "Output directory")->required();
  sweep_cmd->add_option("--jobs", sweep.jobs, "Worker threads (default MNF_RETRIEVE_JOBS or all cores)")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_flag("--resume", sweep.resume, "Skip cells already present in --out");
  sweep_cmd->add_flag("--no-timing", sweep.no_timing, "Write wall_ms as 0 for byte-stable output");

  ExportOptions export_opts;
  auto* export_cmd =
      app.add_subcommand("export-components", "Write component score maps as 16-bit PGM images");
  export_cmd->add_option("--basis", export_opts.basis, "Basis written by fit")->required();
  export_cmd->add_option("--cube", export_opts.cube, "Spectral cube to project")->required();
  export_cmd->add_option("--indices", export_opts.indices, "e.g. 0-49 or 0,3,7")->required();
  export_cmd->add_option("--row-begin", export_opts.row_begin, "First grid row to export");
  export_cmd->add_option("--row-end", export_opts.row_end, "One past the last grid row");
  export_cmd->add_option("--out", export_opts.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*synth_cmd) return cmd_synth(synth);
    if (*fit_cmd) return cmd_fit(fit);
    if (*retrieve_cmd) return cmd_retrieve(retrieve);
    if (*sweep_cmd) return cmd_sweep(sweep);
    if (*export_cmd) return cmd_export_components(export_opts);
  } catch (const mnfret::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const mnfret::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const mnfret::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
