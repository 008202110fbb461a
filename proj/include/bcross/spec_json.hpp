#pragma once

#include <string>

#include "bcross/barriers.hpp"
#include "bcross/image_measure.hpp"
#include "json.hpp"

namespace bcross {

inline constexpr int kSpecSchemaVersion = 1;

/// {"schema": 1, "family": ..., "params": {...}, "horizon": T}. Time-inverted
/// specs carry their base as {"family", "params"} under "base".
nlohmann::json to_json(const BarrierSpec& spec);

/// Throws SpecError for structural problems (including an unknown schema
/// version) and DomainError when the parameters violate the family constraints.
BarrierSpec barrier_spec_from_json(const nlohmann::json& j);
BarrierSpec barrier_spec_from_file(const std::string& path);

/// {"horizon": T, "atoms": [{location, order, weight}],
///  "exp_components": [{rate, lower, upper, weight}]}; upper is null for +inf.
nlohmann::json to_json(const ImageMeasure& m);
ImageMeasure image_measure_from_json(const nlohmann::json& j);

}  // namespace bcross
