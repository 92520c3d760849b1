#pragma once

#include <nlohmann/json.hpp>

#include "garmfit/model.hpp"

namespace garmfit {

// Procedurally built low-poly body (about 600 vertices, 8 joints, 2 shape
// dimensions) with t-shirt, shorts and pants templates. Deterministic; the
// repository asset assets/toy_model.json is this JSON verbatim.
nlohmann::json build_toy_model_json();

// Convenience: builds the JSON and runs it through the regular loader, so the
// in-memory model always passes the same validation as a file would.
LoadedModel build_toy_model();

}  // namespace garmfit
