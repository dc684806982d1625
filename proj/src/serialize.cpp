#include <string>
#include <vector>

#include <json.hpp>

#include "scfr/cfr.hpp"
#include "scfr/errors.hpp"

namespace scfr {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "scfr-model";
constexpr int kVersion = 1;

json to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.begin(), v.end()); }

// Schema access with the failing key path in the error message.
const json& field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw ParseError(path + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(path + "." + key + ": missing");
  return *it;
}

template <typename T>
T read(const json& j, const char* key, const std::string& path) {
  try {
    return field(j, key, path).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(path + "." + key + ": " + e.what());
  }
}

Eigen::VectorXd read_vector(const json& j, const char* key, const std::string& path) {
  const auto v = read<std::vector<double>>(j, key, path);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json layer_to_json(const DepthLayer& layer) {
  json out;
  out["offset"] = layer.offset;
  if (const auto* lin = std::get_if<LinearModel>(&layer.model)) {
    out["kind"] = "linear";
    out["coefficients"] = to_json(lin->coefficients);
    return out;
  }
  const auto& spline = std::get<AdditiveSplineModel>(layer.model);
  out["kind"] = "spline";
  out["intercept"] = spline.coefficients[0];
  json terms = json::array();
  Eigen::Index offset = 1;
  for (const auto& b : spline.bases) {
    const auto n = b.knots.basis_count();
    terms.push_back({{"variable", b.variable},
                     {"lo", b.knots.lo()},
                     {"hi", b.knots.hi()},
                     {"knots", std::vector<double>(b.knots.interior().begin(),
                                                   b.knots.interior().end())},
                     {"coefficients", to_json(spline.coefficients.segment(offset, n))}});
    offset += n;
  }
  out["terms"] = std::move(terms);
  return out;
}

DepthLayer layer_from_json(const json& j, const std::string& path) {
  DepthLayer layer;
  layer.offset = read<double>(j, "offset", path);
  const auto kind = read<std::string>(j, "kind", path);
  if (kind == "linear") {
    layer.model = LinearModel{read_vector(j, "coefficients", path)};
    return layer;
  }
  if (kind != "spline") throw ParseError(path + ".kind: unknown layer kind '" + kind + "'");

  AdditiveSplineModel spline;
  std::vector<double> coefs{read<double>(j, "intercept", path)};
  const json& terms = field(j, "terms", path);
  if (!terms.is_array()) throw ParseError(path + ".terms: expected an array");
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const std::string tpath = path + ".terms[" + std::to_string(t) + "]";
    auto kv = [&] {
      try {
        return KnotVector::build(read<std::vector<double>>(terms[t], "knots", tpath),
                                 read<double>(terms[t], "lo", tpath),
                                 read<double>(terms[t], "hi", tpath));
      } catch (const DomainError& e) {
        throw ParseError(tpath + ": " + e.what());
      }
    }();
    const auto c = read<std::vector<double>>(terms[t], "coefficients", tpath);
    if (static_cast<int>(c.size()) != kv.basis_count()) {
      throw ParseError(tpath + ".coefficients: expected " + std::to_string(kv.basis_count()) +
                       " values, got " + std::to_string(c.size()));
    }
    coefs.insert(coefs.end(), c.begin(), c.end());
    spline.bases.push_back({read<int>(terms[t], "variable", tpath), std::move(kv)});
  }
  spline.coefficients =
      Eigen::Map<const Eigen::VectorXd>(coefs.data(), static_cast<Eigen::Index>(coefs.size()));
  layer.model = std::move(spline);
  return layer;
}

}  // namespace

std::string serialize(const CFracModel& model) {
  json doc;
  doc["format"] = kFormat;
  doc["version"] = kVersion;
  doc["norm"] = model.norm;
  doc["denom_floor"] = model.denom_floor;
  doc["literal_final_offset"] = model.literal_final_offset;
  doc["training_target_max"] = model.training_target_max;
  doc["feature_names"] = model.feature_names;
  json bounds = json::array();
  for (const auto& b : model.feature_bounds) bounds.push_back({b.lo, b.hi});
  doc["feature_bounds"] = std::move(bounds);
  json layers = json::array();
  for (const auto& layer : model.layers) layers.push_back(layer_to_json(layer));
  doc["layers"] = std::move(layers);
  return doc.dump(1) + "\n";
}

CFracModel deserialize(const std::string& document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError("model document: parse error at byte " + std::to_string(e.byte) + ": " +
                     e.what());
  }
  const std::string root = "$";
  if (read<std::string>(doc, "format", root) != kFormat) {
    throw ParseError("$.format: not an scfr model document");
  }
  if (read<int>(doc, "version", root) != kVersion) throw ParseError("$.version: unsupported");

  CFracModel model;
  model.norm = read<double>(doc, "norm", root);
  model.denom_floor = read<double>(doc, "denom_floor", root);
  model.literal_final_offset = read<bool>(doc, "literal_final_offset", root);
  model.training_target_max = read<double>(doc, "training_target_max", root);
  model.feature_names = read<std::vector<std::string>>(doc, "feature_names", root);
  for (const auto& [lo, hi] :
       read<std::vector<std::pair<double, double>>>(doc, "feature_bounds", root)) {
    model.feature_bounds.push_back({lo, hi});
  }
  const json& layers = field(doc, "layers", root);
  if (!layers.is_array() || layers.empty()) throw ParseError("$.layers: expected a nonempty array");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    model.layers.push_back(layer_from_json(layers[i], "$.layers[" + std::to_string(i) + "]"));
  }
  if (!model.layers.front().is_linear()) throw ParseError("$.layers[0]: must be linear");
  if (!model.feature_names.empty() &&
      model.feature_names.size() != model.feature_bounds.size()) {
    throw ParseError("$.feature_names: length differs from feature_bounds");
  }
  const auto m = static_cast<Eigen::Index>(model.feature_bounds.size());
  if (std::get<LinearModel>(model.layers.front().model).coefficients.size() != m + 1) {
    throw ParseError("$.layers[0].coefficients: expected " + std::to_string(m + 1) + " values");
  }
  for (std::size_t i = 1; i < model.layers.size(); ++i) {
    const auto* spline = std::get_if<AdditiveSplineModel>(&model.layers[i].model);
    if (spline == nullptr) {
      throw ParseError("$.layers[" + std::to_string(i) + "]: deeper layers must be splines");
    }
    for (const auto& b : spline->bases) {
      if (b.variable < 0 || b.variable >= m) {
        throw ParseError("$.layers[" + std::to_string(i) + "]: variable index out of range");
      }
    }
  }
  return model;
}

}  // namespace scfr
