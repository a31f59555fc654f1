#include "mnfret/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "mnfret/error.hpp"
#include "mnfret/noise.hpp"
#include "mnfret/retrieval.hpp"

namespace mnfret {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Data

void Dataset::validate() const {
  if (train_spectra.empty() || test_spectra.empty()) {
    throw UsageError("dataset needs at least one training and one test cube");
  }
  if (train_spectra.size() != train_profiles.size() || test_spectra.size() != test_profiles.size()) {
    throw UsageError("every spectral cube needs a matching profile cube");
  }
  const auto bands = train_spectra.front().bands();
  const auto levels = train_profiles.front().levels();
  auto check = [&](const SpectralCube& s, const ProfileCube& p) {
    if (s.bands() != bands) throw UsageError("spectral cubes disagree on band count");
    if (p.levels() != levels) throw UsageError("profile cubes disagree on level count");
    if (!s.same_grid(p)) throw UsageError("spectral and profile cube grids differ");
  };
  for (std::size_t i = 0; i < train_spectra.size(); ++i) check(train_spectra[i], train_profiles[i]);
  for (std::size_t i = 0; i < test_spectra.size(); ++i) check(test_spectra[i], test_profiles[i]);
}

Dataset synthetic_dataset(const SceneConfig& base, std::size_t orbits, std::size_t train_orbits) {
  if (train_orbits == 0 || train_orbits >= orbits) {
    throw UsageError("need 0 < train_orbits < orbits, got " + std::to_string(train_orbits) + " of " +
                     std::to_string(orbits));
  }
  Dataset data;
  for (std::size_t i = 0; i < orbits; ++i) {
    auto scene = generate_scene(orbit_config(base, i));
    if (i < train_orbits) {
      data.train_spectra.push_back(std::move(scene.spectra));
      data.train_profiles.push_back(std::move(scene.profiles));
    } else {
      data.test_spectra.push_back(std::move(scene.spectra));
      data.test_profiles.push_back(std::move(scene.profiles));
    }
  }
  return data;
}

// ---------------------------------------------------------------------------
// Sweep

namespace {

using CellKey = std::tuple<std::string, std::size_t, std::size_t, std::uint64_t>;
using InfoKey = std::tuple<std::string, std::size_t, std::uint64_t>;

std::vector<std::size_t> sorted_unique(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::string cell_label(Method m, std::size_t k, std::size_t w, std::uint64_t seed) {
  return "[" + to_string(m) + " k=" + std::to_string(k) + " w=" + std::to_string(w) +
         " seed=" + std::to_string(seed) + "] ";
}

struct Completion {
  std::set<std::tuple<std::string, std::size_t, std::size_t, std::uint64_t, std::string>> rows;
  std::set<InfoKey> info;

  bool cell_done(Method m, std::size_t k, std::size_t w, std::uint64_t seed, bool with_train) const {
    const auto name = to_string(m);
    if (!rows.contains({name, k, w, seed, "test"})) return false;
    return !with_train || rows.contains({name, k, w, seed, "train"});
  }
  bool info_done(Method m, std::size_t k, std::uint64_t seed) const {
    return info.contains({to_string(m), k, seed});
  }
};

Completion completion_of(const CompletedCells* completed) {
  Completion c;
  if (!completed) return c;
  for (const auto& r : completed->rows) c.rows.insert({to_string(r.method), r.k, r.w, r.seed, r.split});
  for (const auto& r : completed->information) c.info.insert({to_string(r.method), r.k, r.seed});
  return c;
}

LinearBasis fit_training_basis(const Dataset& data, Method method, std::size_t k,
                               const SweepOptions& options) {
  const auto signal = signal_covariance(data.train_spectra);
  if (method == Method::pca) return fit_pca(signal, k);
  std::vector<NoiseCube> noise;
  noise.reserve(data.train_spectra.size());
  for (const auto& cube : data.train_spectra) {
    noise.push_back(paraboloid_residual_filter(cube, options.noise_scaling));
  }
  return fit_mnf(signal, noise_covariance(noise), k, options.mnf_ridge);
}

DesignMatrix stacked_design(const std::vector<ScoreCube>& scores, std::size_t k, std::size_t w,
                            Padding padding) {
  std::vector<DesignMatrix> parts;
  parts.reserve(scores.size());
  for (const auto& s : scores) parts.push_back(extract_neighborhood(s.leading(k), w, padding));
  return stack_rows(parts);
}

RowMatrix stacked_scores(const std::vector<ScoreCube>& scores, std::size_t k) {
  Eigen::Index total = 0;
  for (const auto& s : scores) total += static_cast<Eigen::Index>(s.pixels());
  RowMatrix out(total, static_cast<Eigen::Index>(k));
  Eigen::Index row = 0;
  for (const auto& s : scores) {
    const auto m = s.as_matrix();
    out.middleRows(row, m.rows()) = m.leftCols(static_cast<Eigen::Index>(k));
    row += m.rows();
  }
  return out;
}

}  // namespace

void SweepResult::canonicalize() {
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::make_tuple(to_string(a.method), a.k, a.w, a.seed, a.split) <
           std::make_tuple(to_string(b.method), b.k, b.w, b.seed, b.split);
  });
  std::sort(information.begin(), information.end(),
            [](const InformationRow& a, const InformationRow& b) {
              return std::make_tuple(to_string(a.method), a.k, a.seed) <
                     std::make_tuple(to_string(b.method), b.k, b.seed);
            });
  std::sort(failures.begin(), failures.end(), [](const CellFailure& a, const CellFailure& b) {
    return std::make_tuple(to_string(a.method), a.k, a.w, a.seed) <
           std::make_tuple(to_string(b.method), b.k, b.w, b.seed);
  });
}

SweepResult run_sweep(const Dataset& data, const SweepOptions& options, std::uint64_t seed,
                      const CompletedCells* completed) {
  data.validate();
  const auto k_grid = sorted_unique(options.k_grid);
  const auto w_grid = sorted_unique(options.w_grid);
  if (k_grid.empty() || w_grid.empty() || options.methods.empty()) {
    throw UsageError("sweep needs at least one method, k and w");
  }
  const std::size_t d = data.train_spectra.front().bands();
  const std::size_t k_max = k_grid.back();
  if (k_grid.front() == 0 || k_max > d) {
    throw UsageError("k grid must lie in [1, " + std::to_string(d) + "]");
  }
  for (auto w : w_grid) {
    if (w % 2 == 0) throw UsageError("window sizes must be odd, got " + std::to_string(w));
  }
  const Completion done = completion_of(completed);

  SweepResult result;
  result.pressure_axis = data.test_profiles.front().pressure_axis();
  const RowMatrix y_train = target_matrix(data.train_profiles);
  const RowMatrix y_test = target_matrix(data.test_profiles);

  std::vector<Method> methods = options.methods;
  std::sort(methods.begin(), methods.end());
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());

  for (const Method method : methods) {
    bool anything = false;
    for (auto k : k_grid) {
      if (options.information && !done.info_done(method, k, seed)) anything = true;
      for (auto w : w_grid) {
        if (!done.cell_done(method, k, w, seed, options.include_train)) anything = true;
      }
    }
    if (!anything) continue;

    std::vector<ScoreCube> train_scores;
    std::vector<ScoreCube> test_scores;
    try {
      const auto basis = fit_training_basis(data, method, k_max, options);
      for (const auto& c : data.train_spectra) train_scores.push_back(project(c, basis));
      for (const auto& c : data.test_spectra) test_scores.push_back(project(c, basis));
    } catch (const Error& e) {
      for (auto k : k_grid) {
        for (auto w : w_grid) {
          if (done.cell_done(method, k, w, seed, options.include_train)) continue;
          result.failures.push_back({method, k, w, seed, cell_label(method, k, w, seed) + e.what()});
        }
      }
      continue;
    }

    for (auto k : k_grid) {
      if (options.information && !done.info_done(method, k, seed)) {
        try {
          const auto info = gaussian_information(stacked_scores(test_scores, k), y_test,
                                                 options.information_shrinkage);
          result.information.push_back({method, k, seed, info.joint, info.inputs});
        } catch (const Error& e) {
          result.failures.push_back(
              {method, k, 0, seed, cell_label(method, k, 0, seed) + "information: " + e.what()});
        }
      }
      for (auto w : w_grid) {
        if (done.cell_done(method, k, w, seed, options.include_train)) continue;
        try {
          const auto start = std::chrono::steady_clock::now();
          const auto train_design = stacked_design(train_scores, k, w, options.padding);
          auto model = fit_linear(train_design, y_train, options.regression_ridge);
          const auto test_design = stacked_design(test_scores, k, w, options.padding);
          const auto test_rmse = rmse_profile(y_test, predict(model, test_design));
          std::vector<double> train_rmse;
          if (options.include_train) train_rmse = rmse_profile(y_train, predict(model, train_design));
          const double elapsed =
              options.timing ? std::chrono::duration<double, std::milli>(
                                   std::chrono::steady_clock::now() - start)
                                   .count()
                             : 0.0;
          result.rows.push_back({method, k, w, seed, "test", mean_rmse(test_rmse), test_rmse, elapsed});
          if (options.include_train) {
            result.rows.push_back(
                {method, k, w, seed, "train", mean_rmse(train_rmse), train_rmse, elapsed});
          }
        } catch (const Error& e) {
          result.failures.push_back({method, k, w, seed, cell_label(method, k, w, seed) + e.what()});
        }
      }
    }
  }
  result.canonicalize();
  return result;
}

// ---------------------------------------------------------------------------
// Experiments over seeds

SweepResult run_experiment(const SweepConfig& config, unsigned jobs, const CompletedCells* completed) {
  if (config.seeds.empty()) throw UsageError("sweep needs at least one seed");
  const bool from_files = !config.train_files.empty();
  if (from_files && config.scene) throw UsageError("sweep config gives both a scene and data files");

  std::optional<Dataset> fixed;
  if (from_files) {
    Dataset data;
    for (const auto& pair : config.train_files) {
      data.train_spectra.push_back(load_spectral_cube(pair.spectra));
      data.train_profiles.push_back(load_profile_cube(pair.profiles));
    }
    for (const auto& pair : config.test_files) {
      data.test_spectra.push_back(load_spectral_cube(pair.spectra));
      data.test_profiles.push_back(load_profile_cube(pair.profiles));
    }
    data.validate();
    fixed = std::move(data);
  }
  const SceneConfig scene_template = config.scene.value_or(SceneConfig{});

  struct Task {
    std::uint64_t seed;
    Method method;
  };
  std::vector<Task> tasks;
  std::vector<std::uint64_t> seeds = config.seeds;
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  for (auto s : seeds) {
    for (auto m : config.options.methods) tasks.push_back({s, m});
  }

  std::vector<SweepResult> partial(tasks.size());
  std::vector<std::string> fatal(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const auto& task = tasks[i];
      SweepOptions options = config.options;
      options.methods = {task.method};
      try {
        if (fixed) {
          partial[i] = run_sweep(*fixed, options, task.seed, completed);
        } else {
          SceneConfig base = scene_template;
          base.seed = task.seed;
          base.mixing_seed = task.seed;
          const auto data = synthetic_dataset(base, config.orbits, config.train_orbits);
          partial[i] = run_sweep(data, options, task.seed, completed);
        }
      } catch (const Error& e) {
        fatal[i] = e.what();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(tasks.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  SweepResult merged;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!fatal[i].empty()) {
      // A setup error (bad grid, unreadable data) is not a per-cell failure.
      throw UsageError(fatal[i]);
    }
    auto& p = partial[i];
    if (merged.pressure_axis.empty()) merged.pressure_axis = p.pressure_axis;
    std::move(p.rows.begin(), p.rows.end(), std::back_inserter(merged.rows));
    std::move(p.information.begin(), p.information.end(), std::back_inserter(merged.information));
    std::move(p.failures.begin(), p.failures.end(), std::back_inserter(merged.failures));
  }
  merged.canonicalize();
  return merged;
}

// ---------------------------------------------------------------------------
// JSON config

namespace {

template <typename T>
T get_field(const nlohmann::json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw UsageError(std::string("sweep config field '") + key + "' has the wrong type");
  }
}

std::vector<SweepConfig::CubePair> read_pairs(const nlohmann::json& list, const char* key) {
  if (!list.is_array()) throw UsageError(std::string("sweep config field 'data.") + key + "' must be a list");
  std::vector<SweepConfig::CubePair> out;
  for (const auto& item : list) {
    if (!item.is_object() || !item.contains("spectra") || !item.contains("profiles") ||
        !item.at("spectra").is_string() || !item.at("profiles").is_string()) {
      throw UsageError(std::string("sweep config field 'data.") + key +
                       "' entries need string 'spectra' and 'profiles' paths");
    }
    out.push_back({item.at("spectra").get<std::string>(), item.at("profiles").get<std::string>()});
  }
  return out;
}

}  // namespace

SweepConfig sweep_config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw UsageError("sweep config must be a JSON object");
  static const std::set<std::string> known{
      "methods", "k",          "w",     "seeds", "scene", "data",
      "orbits",  "train_orbits", "regression_ridge", "mnf_ridge", "noise_scaling",
      "padding", "include_train", "information", "information_shrinkage", "timing"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) throw UsageError("sweep config field '" + key + "' is not recognized");
  }
  SweepConfig c;
  auto& o = c.options;
  if (doc.contains("methods")) {
    o.methods.clear();
    for (const auto& m : get_field<std::vector<std::string>>(doc, "methods")) {
      try {
        o.methods.push_back(parse_method(m));
      } catch (const UsageError& e) {
        throw UsageError(std::string("sweep config field 'methods': ") + e.what());
      }
    }
  }
  for (const char* key : {"k", "w"}) {
    if (!doc.contains(key)) continue;
    const auto& list = doc.at(key);
    if (!list.is_array() || list.empty() ||
        !std::all_of(list.begin(), list.end(), [](const auto& v) { return v.is_number_unsigned(); })) {
      throw UsageError(std::string("sweep config field '") + key +
                       "' must be a non-empty list of non-negative integers");
    }
    (std::string(key) == "k" ? o.k_grid : o.w_grid) = list.get<std::vector<std::size_t>>();
  }
  if (doc.contains("seeds")) {
    const auto& seeds = doc.at("seeds");
    if (seeds.is_number_unsigned()) {
      c.seeds.clear();
      for (std::uint64_t s = 0; s < seeds.get<std::uint64_t>(); ++s) c.seeds.push_back(s);
    } else if (seeds.is_array() &&
               std::all_of(seeds.begin(), seeds.end(), [](const auto& v) { return v.is_number_unsigned(); })) {
      c.seeds = seeds.get<std::vector<std::uint64_t>>();
    } else {
      throw UsageError("sweep config field 'seeds' must be a count or a list of non-negative integers");
    }
  }
  if (doc.contains("scene")) {
    try {
      c.scene = scene_config_from_json(doc.at("scene"));
    } catch (const UsageError& e) {
      throw UsageError(std::string("sweep config field 'scene': ") + e.what());
    }
  }
  if (doc.contains("data")) {
    const auto& data = doc.at("data");
    if (!data.is_object() || !data.contains("train") || !data.contains("test")) {
      throw UsageError("sweep config field 'data' needs 'train' and 'test' lists");
    }
    c.train_files = read_pairs(data.at("train"), "train");
    c.test_files = read_pairs(data.at("test"), "test");
    if (c.train_files.empty() || c.test_files.empty()) {
      throw UsageError("sweep config field 'data' needs non-empty 'train' and 'test' lists");
    }
    if (c.scene) throw UsageError("sweep config fields 'scene' and 'data' are exclusive");
  }
  if (doc.contains("orbits")) c.orbits = get_field<std::size_t>(doc, "orbits");
  if (doc.contains("train_orbits")) c.train_orbits = get_field<std::size_t>(doc, "train_orbits");
  if (doc.contains("regression_ridge")) o.regression_ridge = get_field<double>(doc, "regression_ridge");
  if (doc.contains("mnf_ridge")) o.mnf_ridge = get_field<double>(doc, "mnf_ridge");
  if (doc.contains("noise_scaling")) {
    o.noise_scaling = parse_noise_scaling(get_field<std::string>(doc, "noise_scaling"));
  }
  if (doc.contains("padding")) {
    const auto p = get_field<std::string>(doc, "padding");
    if (p == "mirror") {
      o.padding = Padding::mirror;
    } else if (p == "replicate") {
      o.padding = Padding::replicate;
    } else {
      throw UsageError("sweep config field 'padding' must be mirror or replicate");
    }
  }
  if (doc.contains("include_train")) o.include_train = get_field<bool>(doc, "include_train");
  if (doc.contains("information")) o.information = get_field<bool>(doc, "information");
  if (doc.contains("information_shrinkage")) {
    o.information_shrinkage = get_field<double>(doc, "information_shrinkage");
  }
  if (doc.contains("timing")) o.timing = get_field<bool>(doc, "timing");

  if (c.train_files.empty() && !c.scene) c.scene = SceneConfig{};
  if (c.train_orbits == 0 || c.train_orbits >= c.orbits) {
    throw UsageError("sweep config fields 'orbits'/'train_orbits' need 0 < train_orbits < orbits");
  }
  if (o.regression_ridge < 0.0) throw UsageError("sweep config field 'regression_ridge' must be >= 0");
  if (o.mnf_ridge < 0.0) throw UsageError("sweep config field 'mnf_ridge' must be >= 0");
  for (auto w : o.w_grid) {
    if (w % 2 == 0) throw UsageError("sweep config field 'w' must hold odd window sizes");
  }
  for (auto k : o.k_grid) {
    if (k == 0) throw UsageError("sweep config field 'k' must hold positive counts");
  }
  if (o.methods.empty()) throw UsageError("sweep config field 'methods' must not be empty");
  return c;
}

nlohmann::ordered_json sweep_config_to_json(const SweepConfig& c) {
  nlohmann::ordered_json doc;
  std::vector<std::string> methods;
  for (auto m : c.options.methods) methods.push_back(to_string(m));
  doc["methods"] = methods;
  doc["k"] = c.options.k_grid;
  doc["w"] = c.options.w_grid;
  doc["seeds"] = c.seeds;
  if (c.scene) {
    doc["scene"] = scene_config_to_json(*c.scene);
    doc["orbits"] = c.orbits;
    doc["train_orbits"] = c.train_orbits;
  } else {
    auto pairs = [](const std::vector<SweepConfig::CubePair>& list) {
      nlohmann::ordered_json out = nlohmann::ordered_json::array();
      for (const auto& p : list) {
        out.push_back({{"spectra", p.spectra.string()}, {"profiles", p.profiles.string()}});
      }
      return out;
    };
    doc["data"] = {{"train", pairs(c.train_files)}, {"test", pairs(c.test_files)}};
  }
  doc["regression_ridge"] = c.options.regression_ridge;
  doc["mnf_ridge"] = c.options.mnf_ridge;
  doc["noise_scaling"] = to_string(c.options.noise_scaling);
  doc["padding"] = c.options.padding == Padding::mirror ? "mirror" : "replicate";
  doc["include_train"] = c.options.include_train;
  doc["information"] = c.options.information;
  doc["information_shrinkage"] = c.options.information_shrinkage;
  doc["timing"] = c.options.timing;
  return doc;
}

// ---------------------------------------------------------------------------
// CSV

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string sweep_csv(const SweepResult& result) {
  std::string out = std::string(kSweepCsvHeader) + "\n";
  for (const auto& r : result.rows) {
    out += to_string(r.method) + "," + std::to_string(r.k) + "," + std::to_string(r.w) + "," +
           std::to_string(r.seed) + "," + r.split + "," + format_double(r.mean_rmse) + "," +
           format_double(r.wall_ms) + "\n";
  }
  return out;
}

std::string level_csv(const SweepResult& result) {
  std::string out = std::string(kLevelCsvHeader) + "\n";
  for (const auto& r : result.rows) {
    if (r.split != "test") continue;
    for (std::size_t l = 0; l < r.level_rmse.size(); ++l) {
      const double pressure = l < result.pressure_axis.size() ? result.pressure_axis[l] : 0.0;
      out += to_string(r.method) + "," + std::to_string(r.k) + "," + std::to_string(r.w) + "," +
             std::to_string(r.seed) + "," + std::to_string(l) + "," + format_double(pressure) + "," +
             format_double(r.level_rmse[l]) + "\n";
    }
  }
  return out;
}

std::string information_csv(const SweepResult& result) {
  std::string out = std::string(kInformationCsvHeader) + "\n";
  for (const auto& r : result.information) {
    out += to_string(r.method) + "," + std::to_string(r.k) + "," + std::to_string(r.seed) + "," +
           format_double(r.joint) + "," + format_double(r.inputs) + "," +
           format_double(r.joint - r.inputs) + "\n";
  }
  return out;
}

namespace {

std::vector<std::vector<std::string>> read_csv(const fs::path& path, const std::string& header) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(path);
  if (!in) return rows;
  std::string line;
  if (!std::getline(in, line)) return rows;
  if (line != header) throw IoError("unexpected header in " + path.string());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    rows.push_back(std::move(fields));
  }
  return rows;
}

template <typename T>
T parse_number(const std::string& text, const fs::path& where) {
  T value{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw IoError("bad number '" + text + "' in " + where.string());
  }
  return value;
}

}  // namespace

SweepResult merge_results(const CompletedCells& earlier, SweepResult fresh) {
  std::set<std::tuple<std::string, std::size_t, std::size_t, std::uint64_t, std::string>> fresh_rows;
  for (const auto& r : fresh.rows) fresh_rows.insert({to_string(r.method), r.k, r.w, r.seed, r.split});
  std::set<InfoKey> fresh_info;
  for (const auto& r : fresh.information) fresh_info.insert({to_string(r.method), r.k, r.seed});
  for (const auto& r : earlier.rows) {
    if (!fresh_rows.contains({to_string(r.method), r.k, r.w, r.seed, r.split})) fresh.rows.push_back(r);
  }
  for (const auto& r : earlier.information) {
    if (!fresh_info.contains({to_string(r.method), r.k, r.seed})) fresh.information.push_back(r);
  }
  if (fresh.pressure_axis.empty()) fresh.pressure_axis = earlier.pressure_axis;
  fresh.canonicalize();
  return fresh;
}

CompletedCells read_completed_cells(const fs::path& dir) {
  CompletedCells out;
  const auto sweep_path = dir / "sweep.csv";
  const auto level_path = dir / "levels.csv";
  const auto info_path = dir / "information.csv";

  std::map<CellKey, std::vector<std::pair<std::size_t, double>>> levels;
  for (const auto& f : read_csv(level_path, kLevelCsvHeader)) {
    if (f.size() != 7) throw IoError("malformed row in " + level_path.string());
    const CellKey key{f[0], parse_number<std::size_t>(f[1], level_path),
                      parse_number<std::size_t>(f[2], level_path),
                      parse_number<std::uint64_t>(f[3], level_path)};
    const auto level = parse_number<std::size_t>(f[4], level_path);
    levels[key].push_back({level, parse_number<double>(f[6], level_path)});
    if (out.pressure_axis.size() <= level) out.pressure_axis.resize(level + 1, 0.0);
    out.pressure_axis[level] = parse_number<double>(f[5], level_path);
  }
  for (const auto& f : read_csv(sweep_path, kSweepCsvHeader)) {
    if (f.size() != 7) throw IoError("malformed row in " + sweep_path.string());
    SweepRow r;
    r.method = parse_method(f[0]);
    r.k = parse_number<std::size_t>(f[1], sweep_path);
    r.w = parse_number<std::size_t>(f[2], sweep_path);
    r.seed = parse_number<std::uint64_t>(f[3], sweep_path);
    r.split = f[4];
    r.mean_rmse = parse_number<double>(f[5], sweep_path);
    r.wall_ms = parse_number<double>(f[6], sweep_path);
    if (r.split == "test") {
      auto it = levels.find({f[0], r.k, r.w, r.seed});
      if (it == levels.end()) continue;  // incomplete cell: recompute
      auto lv = it->second;
      std::sort(lv.begin(), lv.end());
      for (const auto& [index, value] : lv) r.level_rmse.push_back(value);
    }
    out.rows.push_back(std::move(r));
  }
  for (const auto& f : read_csv(info_path, kInformationCsvHeader)) {
    if (f.size() != 6) throw IoError("malformed row in " + info_path.string());
    out.information.push_back({parse_method(f[0]), parse_number<std::size_t>(f[1], info_path),
                               parse_number<std::uint64_t>(f[2], info_path),
                               parse_number<double>(f[3], info_path),
                               parse_number<double>(f[4], info_path)});
  }
  return out;
}

}  // namespace mnfret
