#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "idmc/kernel.hpp"
#include "idmc/levy_spec.hpp"

namespace idmc {

/// {"sigma2": ..., "atoms": [[u, mass], ...], "label": ...}. Doubles are
/// serialized shortest-round-trip, so decode(encode(spec)) is bit-exact.
nlohmann::json spec_to_json(const LevySpec& spec);
LevySpec spec_from_json(const nlohmann::json& j);

/// {"type": "bacry-muzy"} or {"type": "general-r", "name": ...}; general-r
/// kernels are referenced by catalog name, closures are never serialized.
nlohmann::json kernel_to_json(const IntensityKernel& kernel);
IntensityKernel kernel_from_json(const nlohmann::json& j);

/// %.17g rendering, enough digits to reparse bit-exactly.
std::string format_double(double x);

/// Comma-joined row writer with no quoting (fields must not contain commas).
std::string csv_row(const std::vector<std::string>& fields);

}  // namespace idmc
