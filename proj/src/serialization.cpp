#include "mnfret/serialization.hpp"

#include <algorithm>

#include "binary_io.hpp"
#include "mnfret/error.hpp"

namespace mnfret {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double kOrthonormalityTolerance = 1e-10;

fs::path with_suffix(const fs::path& path, const char* suffix) {
  return fs::path(cube_base_path(path).string() + suffix);
}

template <typename T>
T field(const json& doc, const char* key, const fs::path& where) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw IoError("malformed header " + where.string() + ": field '" + key +
                  "' missing or of the wrong type");
  }
}

void prepare_parent(const fs::path& path) {
  const auto base = cube_base_path(path);
  if (base.has_parent_path()) fs::create_directories(base.parent_path());
}

}  // namespace

void save_basis(const LinearBasis& basis, const fs::path& path) {
  prepare_parent(path);
  ordered_json doc;
  doc["format"] = "linear-basis";
  doc["method"] = to_string(basis.method);
  doc["k"] = basis.size();
  doc["d"] = basis.dimension();
  doc["eigenvalues"] = std::vector<double>(basis.eigenvalues.data(),
                                           basis.eigenvalues.data() + basis.eigenvalues.size());
  doc["eigenvalue_total"] = basis.eigenvalue_total;
  doc["ridge"] = basis.noise_ridge;
  doc["sign"] = kSignConvention;
  doc["noise_scaling"] = to_string(basis.noise_scaling);
  doc["dtype"] = "f64";
  doc["order"] = "little";
  doc["payload"] = "mean,components-column-major";

  std::vector<double> payload(basis.mean.data(), basis.mean.data() + basis.mean.size());
  payload.insert(payload.end(), basis.components.data(),
                 basis.components.data() + basis.components.size());
  detail::write_f64_payload(with_suffix(path, ".bin"), payload);
  detail::write_json(with_suffix(path, ".json"), doc);
}

LinearBasis load_basis(const fs::path& path) {
  const auto where = with_suffix(path, ".json");
  const json doc = detail::read_json(where);
  if (field<std::string>(doc, "format", where) != "linear-basis") {
    throw IoError(where.string() + " is not a linear basis header");
  }
  LinearBasis basis;
  try {
    basis.method = parse_method(field<std::string>(doc, "method", where));
    basis.noise_scaling = parse_noise_scaling(doc.value("noise_scaling", std::string("raw")));
  } catch (const UsageError& e) {
    throw IoError("malformed header " + where.string() + ": " + e.what());
  }
  const auto k = field<std::size_t>(doc, "k", where);
  const auto d = field<std::size_t>(doc, "d", where);
  if (k == 0 || d == 0 || k > d) throw IoError("malformed header " + where.string() + ": bad k/d");
  const auto eigenvalues = field<std::vector<double>>(doc, "eigenvalues", where);
  if (eigenvalues.size() != k) {
    throw IoError("malformed header " + where.string() + ": eigenvalue count differs from k");
  }
  basis.eigenvalue_total = field<double>(doc, "eigenvalue_total", where);
  basis.noise_ridge = field<double>(doc, "ridge", where);

  const auto payload = detail::read_f64_payload(with_suffix(path, ".bin"), d + d * k);
  detail::require_finite(payload, "basis " + where.string());
  const auto dd = static_cast<Eigen::Index>(d);
  const auto kk = static_cast<Eigen::Index>(k);
  basis.mean = Eigen::Map<const Eigen::VectorXd>(payload.data(), dd);
  basis.components = Eigen::Map<const Eigen::MatrixXd>(payload.data() + d, dd, kk);
  basis.eigenvalues = Eigen::Map<const Eigen::VectorXd>(eigenvalues.data(), kk);

  if (basis.method == Method::pca) {
    const Eigen::MatrixXd gram = basis.components.transpose() * basis.components;
    const double err = (gram - Eigen::MatrixXd::Identity(kk, kk)).cwiseAbs().maxCoeff();
    if (err > kOrthonormalityTolerance) {
      throw NumericalError("PCA basis " + where.string() + " is not orthonormal (max |W^T W - I| = " +
                           std::to_string(err) + ")");
    }
  }
  return basis;
}

void save_model(const RetrievalModel& model, const fs::path& path) {
  prepare_parent(path);
  ordered_json doc;
  doc["format"] = "retrieval-model";
  doc["features"] = model.features();
  doc["levels"] = model.levels();
  doc["ridge"] = model.ridge;
  doc["method"] = model.info.method;
  doc["components"] = model.info.components;
  doc["window"] = model.info.window;
  doc["seed"] = model.info.seed;
  doc["data_hash"] = model.info.data_hash;
  doc["ordering"] = kOffsetOrdering;
  doc["pressure_axis"] = model.pressure_axis;
  doc["dtype"] = "f64";
  doc["order"] = "little";
  doc["payload"] = "intercept,weights-column-major";

  std::vector<double> payload(model.intercept.data(), model.intercept.data() + model.intercept.size());
  payload.insert(payload.end(), model.weights.data(), model.weights.data() + model.weights.size());
  detail::write_f64_payload(with_suffix(path, ".bin"), payload);
  detail::write_json(with_suffix(path, ".json"), doc);
}

RetrievalModel load_model(const fs::path& path) {
  const auto where = with_suffix(path, ".json");
  const json doc = detail::read_json(where);
  if (field<std::string>(doc, "format", where) != "retrieval-model") {
    throw IoError(where.string() + " is not a retrieval model header");
  }
  if (field<std::string>(doc, "ordering", where) != kOffsetOrdering) {
    throw IoError(where.string() + " uses an unsupported feature ordering");
  }
  const auto p = field<std::size_t>(doc, "features", where);
  const auto o = field<std::size_t>(doc, "levels", where);
  if (p == 0 || o == 0) throw IoError("malformed header " + where.string() + ": empty model");

  RetrievalModel model;
  model.ridge = field<double>(doc, "ridge", where);
  model.info.method = field<std::string>(doc, "method", where);
  model.info.components = field<std::size_t>(doc, "components", where);
  model.info.window = field<std::size_t>(doc, "window", where);
  model.info.seed = field<std::uint64_t>(doc, "seed", where);
  model.info.data_hash = field<std::string>(doc, "data_hash", where);
  model.pressure_axis = field<std::vector<double>>(doc, "pressure_axis", where);
  if (!model.pressure_axis.empty() && model.pressure_axis.size() != o) {
    throw IoError("malformed header " + where.string() + ": pressure axis length differs from levels");
  }

  const auto payload = detail::read_f64_payload(with_suffix(path, ".bin"), o + p * o);
  detail::require_finite(payload, "model " + where.string());
  model.intercept = Eigen::Map<const Eigen::VectorXd>(payload.data(), static_cast<Eigen::Index>(o));
  model.weights = Eigen::Map<const Eigen::MatrixXd>(payload.data() + o, static_cast<Eigen::Index>(p),
                                                    static_cast<Eigen::Index>(o));
  return model;
}

}  // namespace mnfret
