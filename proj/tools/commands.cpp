#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "manifest.hpp"
#include "mnfret/cube.hpp"
#include "mnfret/decomposition.hpp"
#include "mnfret/error.hpp"
#include "mnfret/evaluation.hpp"
#include "mnfret/features.hpp"
#include "mnfret/noise.hpp"
#include "mnfret/retrieval.hpp"
#include "mnfret/serialization.hpp"
#include "mnfret/sweep.hpp"
#include "mnfret/synth.hpp"

namespace mnfret::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

nlohmann::json read_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

fs::path json_of(const fs::path& base) { return fs::path(cube_base_path(base).string() + ".json"); }
fs::path bin_of(const fs::path& base) { return fs::path(cube_base_path(base).string() + ".bin"); }

void add_pair(std::vector<fs::path>& list, const fs::path& base) {
  list.push_back(json_of(base));
  list.push_back(bin_of(base));
}

std::string level_rmse_csv(const std::vector<double>& rmse, const std::vector<double>& pressure) {
  std::string out = "level,pressure,rmse\n";
  for (std::size_t l = 0; l < rmse.size(); ++l) {
    const double p = l < pressure.size() ? pressure[l] : 0.0;
    out += std::to_string(l) + "," + format_double(p) + "," + format_double(rmse[l]) + "\n";
  }
  return out;
}

Padding parse_padding(const std::string& text) {
  if (text == "mirror") return Padding::mirror;
  if (text == "replicate") return Padding::replicate;
  throw UsageError("unknown padding '" + text + "' (expected mirror or replicate)");
}

}  // namespace

std::vector<std::size_t> parse_indices(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string part;
  auto number = [](const std::string& s) {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      throw UsageError("bad component index '" + s + "'");
    }
    return static_cast<std::size_t>(std::stoull(s));
  };
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      out.push_back(number(part));
    } else {
      const auto lo = number(part.substr(0, dash));
      const auto hi = number(part.substr(dash + 1));
      if (hi < lo) throw UsageError("bad index range '" + part + "'");
      for (auto i = lo; i <= hi; ++i) out.push_back(i);
    }
  }
  if (out.empty()) throw UsageError("empty component index list");
  return out;
}

// ---------------------------------------------------------------------------

int cmd_synth(const SynthOptions& options) {
  SceneConfig config;
  if (!options.config.empty()) config = scene_config_from_json(read_config(options.config));
  if (options.seed) config.seed = *options.seed;
  config.validate();
  if (options.train_orbits == 0 || options.train_orbits >= options.orbits) {
    throw UsageError("need 0 < --train-orbits < --orbits");
  }

  fs::create_directories(options.out);
  RunManifest manifest;
  manifest.subcommand = "synth";
  manifest.seed = config.seed;
  manifest.config = scene_config_to_json(config);
  manifest.config["orbits"] = options.orbits;
  manifest.config["train_orbits"] = options.train_orbits;
  if (!options.config.empty()) manifest.inputs.push_back(options.config);

  for (std::size_t i = 0; i < options.orbits; ++i) {
    const auto scene = generate_scene(orbit_config(config, i));
    const auto stem = "orbit" + std::to_string(i);
    const auto spectra = options.out / (stem + "_spectra");
    const auto profiles = options.out / (stem + "_profiles");
    save_cube(scene.spectra, spectra);
    save_cube(scene.profiles, profiles);
    add_pair(manifest.outputs, spectra);
    add_pair(manifest.outputs, profiles);
  }
  const auto scene_json = options.out / "scene.json";
  write_text(scene_json, scene_config_to_json(config).dump(2) + "\n");
  manifest.outputs.push_back(scene_json);
  manifest.write(options.out);
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_fit(const FitOptions& options) {
  const Method method = parse_method(options.method);
  if (options.train.empty()) throw UsageError("fit needs at least one --train cube");
  std::vector<SpectralCube> cubes;
  for (const auto& p : options.train) cubes.push_back(load_spectral_cube(p));
  const auto d = cubes.front().bands();
  if (options.k < 1 || options.k > d) {
    throw UsageError("--k " + std::to_string(options.k) + " outside [1, " + std::to_string(d) + "]");
  }
  const auto signal = signal_covariance(cubes);

  LinearBasis basis;
  if (method == Method::pca) {
    basis = fit_pca(signal, options.k);
  } else {
    const auto scaling = parse_noise_scaling(options.noise_scaling);
    std::vector<NoiseCube> noise;
    for (const auto& c : cubes) noise.push_back(paraboloid_residual_filter(c, scaling));
    const auto noise_cov = noise_covariance(noise);
    if (noise_cov.underdetermined) {
      std::cerr << "warning: " << noise_cov.samples << " interior noise samples for " << d
                << " bands; relying on the ridge\n";
    }
    basis = fit_mnf(signal, noise_cov, options.k, options.ridge);
  }

  fs::create_directories(options.out);
  const auto basis_path = options.out / "basis";
  save_basis(basis, basis_path);

  const auto curve = eigenvalue_curve(basis);
  std::string csv = "index,eigenvalue,cumulative_normalized_eigenvalue";
  std::vector<double> fractions;
  if (method == Method::mnf) {
    csv += ",signal_fraction,cumulative_mean_signal_fraction";
    fractions = signal_fraction(basis);
  }
  csv += "\n";
  double running = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    csv += std::to_string(i) + "," + format_double(basis.eigenvalues(static_cast<Eigen::Index>(i))) +
           "," + format_double(curve.cumulative[i]);
    if (method == Method::mnf) {
      running += fractions[i];
      csv += "," + format_double(fractions[i]) + "," + format_double(running / static_cast<double>(i + 1));
    }
    csv += "\n";
  }
  const auto csv_path = options.out / "eigenvalues.csv";
  write_text(csv_path, csv);

  RunManifest manifest;
  manifest.subcommand = "fit";
  manifest.config = {{"method", options.method},
                     {"k", options.k},
                     {"ridge", method == Method::mnf ? options.ridge : 0.0},
                     {"noise_scaling", method == Method::mnf ? options.noise_scaling : "n/a"},
                     {"eigenvalue_curve_partial", curve.partial},
                     {"basis_id", basis.id()}};
  for (const auto& p : options.train) add_pair(manifest.inputs, p);
  add_pair(manifest.outputs, basis_path);
  manifest.outputs.push_back(csv_path);
  manifest.write(options.out);
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_retrieve(const RetrieveOptions& options) {
  if (options.cubes.empty()) throw UsageError("retrieve needs at least one --cubes entry");
  if (options.window && (*options.window == 0 || *options.window % 2 == 0)) {
    throw UsageError("--w must be odd and positive");
  }
  const Padding padding = parse_padding(options.padding);
  LinearBasis basis = load_basis(options.basis);
  std::optional<RetrievalModel> model;
  if (options.model) model = load_model(*options.model);

  std::size_t k = options.k.value_or(model ? model->info.components : basis.size());
  if (k < 1 || k > basis.size()) {
    throw UsageError("k=" + std::to_string(k) + " exceeds the " + std::to_string(basis.size()) +
                     " basis components");
  }
  const std::size_t w = options.window.value_or(model ? model->info.window : 1);
  if (model && (model->info.window != w || model->info.components != k)) {
    throw UsageError("model was trained with k=" + std::to_string(model->info.components) + ", w=" +
                     std::to_string(model->info.window) + "; got k=" + std::to_string(k) +
                     ", w=" + std::to_string(w));
  }
  if (!model && options.targets.empty()) {
    throw UsageError("retrieve needs --targets to fit a model, or --model to predict");
  }
  if (!options.targets.empty() && options.targets.size() != options.cubes.size()) {
    throw UsageError("--targets must list one profile cube per --cubes entry");
  }
  basis = basis.leading(k);

  std::vector<SpectralCube> cubes;
  for (const auto& p : options.cubes) cubes.push_back(load_spectral_cube(p));
  std::vector<ProfileCube> targets;
  for (const auto& p : options.targets) targets.push_back(load_profile_cube(p));
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (!cubes[i].same_grid(targets[i])) {
      throw UsageError(options.cubes[i].string() + " and " + options.targets[i].string() +
                       " have different grids");
    }
  }

  std::vector<DesignMatrix> designs;
  for (const auto& c : cubes) designs.push_back(extract_neighborhood(project(c, basis), w, padding));

  fs::create_directories(options.out);
  RunManifest manifest;
  manifest.subcommand = "retrieve";
  manifest.config = {{"basis", options.basis.string()}, {"k", k}, {"w", w},
                     {"padding", options.padding}, {"ridge", options.ridge},
                     {"mode", model ? "predict" : "fit"}};
  add_pair(manifest.inputs, options.basis);
  if (options.model) add_pair(manifest.inputs, *options.model);
  for (const auto& p : options.cubes) add_pair(manifest.inputs, p);
  for (const auto& p : options.targets) add_pair(manifest.inputs, p);

  if (!model) {
    const auto design = stack_rows(designs);
    const RowMatrix y = target_matrix(targets);
    RetrievalModel fitted = fit_linear(design, y, options.ridge);
    fitted.info.method = to_string(basis.method);
    std::vector<fs::path> data_files;
    for (const auto& p : options.cubes) data_files.push_back(bin_of(p));
    for (const auto& p : options.targets) data_files.push_back(bin_of(p));
    fitted.info.data_hash = sha256_files(data_files);
    fitted.pressure_axis = targets.front().pressure_axis();
    const auto model_path = options.out / "model";
    save_model(fitted, model_path);
    const auto csv_path = options.out / "train_rmse.csv";
    write_text(csv_path, level_rmse_csv(rmse_profile(y, predict(fitted, design)), fitted.pressure_axis));
    add_pair(manifest.outputs, model_path);
    manifest.outputs.push_back(csv_path);
  } else {
    if (designs.front().features() != model->features()) {
      throw UsageError("model expects " + std::to_string(model->features()) + " features, got " +
                       std::to_string(designs.front().features()));
    }
    std::vector<RowMatrix> predictions;
    for (std::size_t i = 0; i < cubes.size(); ++i) {
      predictions.push_back(predict(*model, designs[i]));
      const auto stem = cube_base_path(options.cubes[i]).filename().string() + "_pred";
      const auto out_path = options.out / stem;
      save_cube(to_profile_cube(predictions.back(), cubes[i].rows(), cubes[i].cols(), model->pressure_axis),
                out_path);
      add_pair(manifest.outputs, out_path);
    }
    if (!targets.empty()) {
      RowMatrix all_pred(target_matrix(targets).rows(), static_cast<Eigen::Index>(model->levels()));
      Eigen::Index row = 0;
      for (const auto& p : predictions) {
        all_pred.middleRows(row, p.rows()) = p;
        row += p.rows();
      }
      const RowMatrix truth = target_matrix(targets);
      if (truth.cols() != all_pred.cols()) {
        throw UsageError("targets have " + std::to_string(truth.cols()) + " levels, model " +
                         std::to_string(all_pred.cols()));
      }
      const auto csv_path = options.out / "rmse.csv";
      write_text(csv_path, level_rmse_csv(rmse_profile(truth, all_pred), model->pressure_axis));
      manifest.outputs.push_back(csv_path);
    }
  }
  manifest.write(options.out);
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_sweep(const SweepCommandOptions& options) {
  SweepConfig config = sweep_config_from_json(read_config(options.config));
  if (options.no_timing) config.options.timing = false;

  CompletedCells completed;
  if (options.resume) completed = read_completed_cells(options.out);
  SweepResult fresh = run_experiment(config, options.jobs, options.resume ? &completed : nullptr);
  const auto failures = fresh.failures;
  SweepResult result = merge_results(completed, std::move(fresh));

  fs::create_directories(options.out);
  const auto sweep_path = options.out / "sweep.csv";
  const auto level_path = options.out / "levels.csv";
  const auto info_path = options.out / "information.csv";
  const auto fail_path = options.out / "failures.csv";
  write_text(sweep_path, sweep_csv(result));
  write_text(level_path, level_csv(result));
  write_text(info_path, information_csv(result));
  std::string fail_csv = "method,k,w,seed,message\n";
  for (const auto& f : failures) {
    std::string msg = f.message;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    fail_csv += to_string(f.method) + "," + std::to_string(f.k) + "," + std::to_string(f.w) + "," +
                std::to_string(f.seed) + "," + msg + "\n";
    std::cerr << "cell failed: " << f.message << "\n";
  }
  write_text(fail_path, fail_csv);

  RunManifest manifest;
  manifest.subcommand = "sweep";
  manifest.config = sweep_config_to_json(config);
  manifest.config["resume"] = options.resume;
  manifest.seed = config.seeds.empty() ? 0 : config.seeds.front();
  manifest.inputs.push_back(options.config);
  for (const auto& p : config.train_files) {
    add_pair(manifest.inputs, p.spectra);
    add_pair(manifest.inputs, p.profiles);
  }
  for (const auto& p : config.test_files) {
    add_pair(manifest.inputs, p.spectra);
    add_pair(manifest.inputs, p.profiles);
  }
  manifest.outputs = {sweep_path, level_path, info_path, fail_path};
  manifest.write(options.out);
  return failures.empty() ? kExitOk : kExitPartialSweep;
}

// ---------------------------------------------------------------------------

int cmd_export_components(const ExportOptions& options) {
  const auto indices = parse_indices(options.indices);
  const LinearBasis basis = load_basis(options.basis);
  for (auto i : indices) {
    if (i >= basis.size()) {
      throw UsageError("component index " + std::to_string(i) + " not below k=" +
                       std::to_string(basis.size()));
    }
  }
  const SpectralCube cube = load_spectral_cube(options.cube);
  const ScoreCube scores = project(cube, basis);
  const std::size_t row_begin = options.row_begin.value_or(0);
  const std::size_t row_end = options.row_end.value_or(scores.rows());
  if (row_begin >= row_end || row_end > scores.rows()) {
    throw UsageError("row range [" + std::to_string(row_begin) + ", " + std::to_string(row_end) +
                     ") outside the " + std::to_string(scores.rows()) + "-row grid");
  }
  const std::size_t rows = row_end - row_begin;
  const std::size_t cols = scores.cols();

  fs::create_directories(options.out);
  RunManifest manifest;
  manifest.subcommand = "export-components";
  manifest.config = {{"basis", options.basis.string()}, {"cube", options.cube.string()},
                     {"indices", indices}, {"row_begin", row_begin}, {"row_end", row_end}};
  add_pair(manifest.inputs, options.basis);
  add_pair(manifest.inputs, options.cube);

  ordered_json sidecar;
  sidecar["bit_depth"] = 16;
  sidecar["rows"] = rows;
  sidecar["cols"] = cols;
  sidecar["row_begin"] = row_begin;
  sidecar["scaling"] = "min-max per component";
  sidecar["components"] = ordered_json::array();

  for (auto index : indices) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t r = row_begin; r < row_end; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        const double v = scores.at(r, c, index);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    const bool degenerate = !(hi > lo);
    std::string image = "P5\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n65535\n";
    image.reserve(image.size() + rows * cols * 2);
    for (std::size_t r = row_begin; r < row_end; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        unsigned level = 32768;
        if (!degenerate) {
          level = static_cast<unsigned>(std::lround((scores.at(r, c, index) - lo) / (hi - lo) * 65535.0));
        }
        image.push_back(static_cast<char>((level >> 8) & 0xff));
        image.push_back(static_cast<char>(level & 0xff));
      }
    }
    char name[32];
    std::snprintf(name, sizeof name, "component_%03zu.pgm", index);
    const auto path = options.out / name;
    write_text(path, image);
    manifest.outputs.push_back(path);
    sidecar["components"].push_back(
        {{"index", index}, {"file", name}, {"min", lo}, {"max", hi}, {"degenerate", degenerate}});
  }
  const auto sidecar_path = options.out / "scaling.json";
  write_text(sidecar_path, sidecar.dump(2) + "\n");
  manifest.outputs.push_back(sidecar_path);
  manifest.write(options.out);
  return kExitOk;
}

}  // namespace mnfret::cli
