#pragma once

#include <string>

#include "beamlink/model.hpp"

namespace beamlink {

/// Parses a model document (JSON). The returned model is not yet built.
Model parse_model(const std::string& text);

/// Serializes the model document (input fields only, derived data is
/// rebuilt on load). Output is deterministic: fixed key order,
/// shortest-round-trip numbers.
std::string serialize_model(const Model& m);

/// Parse + build.
Model load_model_file(const std::string& path);

void save_model_file(const Model& m, const std::string& path);

}  // namespace beamlink
