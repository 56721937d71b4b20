#pragma once

#include <string>

#include <json.hpp>

#include "conleg/levy.hpp"

namespace conleg::cli {

// {"model": "gbm" | "nig" | "vg" | "cgmy", <parameters>, "r": .., "q": ..}
LevyModel model_from_json(const nlohmann::json& j);
LevyModel load_model(const std::string& path);

}  // namespace conleg::cli
