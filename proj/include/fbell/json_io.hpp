#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "fbell/core.hpp"

namespace fbell {

using json = nlohmann::json;

// States:          {"re": [4], "im": [4]} in (00, 01, 10, 11) order.
// Density matrix:  {"re": 4x4, "im": 4x4}, row-major.
// Doubles are written in shortest round-trip form, so parse(dump(x)) == x bit for bit.
json state_to_json(const TwoQubitState& state);
TwoQubitState state_from_json(const json& j, const std::string& where = "state");

json density_to_json(const Matrix4c& rho);
json density_to_json(const DensityMatrix& rho);
// Validates the result as a DensityMatrix.
DensityMatrix density_from_json(const json& j, const std::string& where = "rho");

// %.17g formatting for CSV columns.
std::string format_double(double x);

}  // namespace fbell
