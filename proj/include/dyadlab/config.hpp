#pragma once

#include "dyadlab/io.hpp"

namespace dyadlab {

/// reject unknown keys (typos fail loudly before any computation)
void validate_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                   const std::string& context);

nlohmann::json load_config(const std::string& path);

MeshFunction function_from_json(const nlohmann::json& j, const GridPtr& grid);
Weight weight_from_json(const nlohmann::json& j, const GridPtr& grid);
OpPtr operator_from_json(const nlohmann::json& j, const GridPtr& grid);
ReportConfig report_config_from_json(const nlohmann::json& j, const GridPtr& grid);

}  // namespace dyadlab
