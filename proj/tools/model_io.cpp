#include "model_io.hpp"

#include <fstream>

#include "conleg/errors.hpp"

namespace conleg::cli {

namespace {

double field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ParameterError(std::string("model file: missing field '") + key + "'");
  if (!j[key].is_number()) throw ParameterError(std::string("model file: field '") + key + "' is not a number");
  return j[key].get<double>();
}

double field_or(const nlohmann::json& j, const char* key, double fallback) {
  return j.contains(key) ? field(j, key) : fallback;
}

}  // namespace

LevyModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("model") || !j["model"].is_string())
    throw ParameterError("model file: expected an object with a \"model\" name");
  const std::string name = j["model"].get<std::string>();
  const double r = field_or(j, "r", 0.0), q = field_or(j, "q", 0.0);
  if (name == "gbm") return LevyModel(Gbm{field(j, "sigma")}, r, q);
  if (name == "nig")
    return LevyModel(Nig{field(j, "alpha"), field(j, "beta"), field(j, "delta"), field_or(j, "sigma", 0.0)}, r, q);
  if (name == "vg") return LevyModel(Vg{field(j, "sigma"), field(j, "theta"), field(j, "nu")}, r, q);
  if (name == "cgmy") return LevyModel(Cgmy{field(j, "C"), field(j, "G"), field(j, "M"), field(j, "Y")}, r, q);
  throw ParameterError("model file: unknown model '" + name + "'");
}

LevyModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open model file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError("model file " + path + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace conleg::cli
