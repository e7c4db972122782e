#pragma once

#include <string>
#include <vector>

#include "griddyn/mapexpr.hpp"

namespace griddyn {

// named maps with exact coefficients; throws SchemaError for unknown names
MapPtr preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace griddyn
