#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "centerward/diagnostics.hpp"
#include "centerward/quantile.hpp"

namespace centerward {

/// Serializes with sorted keys, two-space indentation and every floating
/// value printed as %.17g, so equal documents are byte-identical. Non-finite
/// numbers become null.
void write_json(const nlohmann::json& j, std::ostream& out);
std::string to_json_string(const nlohmann::json& j);

/// Library version embedded in every artifact.
const char* version_string();

/// 64-bit FNV-1a of the canonical serialization, as 16 hex digits.
std::string config_hash(const nlohmann::json& j);

nlohmann::json to_json(const Contour& c);
Contour contour_from_json(const nlohmann::json& j);
nlohmann::json to_json(const NestednessReport& r);
nlohmann::json to_json(const KEstimate& k);
nlohmann::json to_json(const CheckResult& c);
nlohmann::json to_json(const DiagnosticsReport& r);

/// Diagram JSON: atoms, weights, psi, masses and every cell as a list of
/// segment / arc edges.
nlohmann::json to_json(const SemidiscreteSolution& s);
/// Map table JSON: epsilon, polar node coordinates, images, and the dual
/// potentials needed to rebuild the coupling.
nlohmann::json to_json(const EntropicSolution& s);

/// Rebuilds a solved map from either artifact (diagram or map table).
QuantileMap map_from_json(const nlohmann::json& j);

}  // namespace centerward
