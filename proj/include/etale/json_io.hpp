#pragma once
// File formats: the bratteli-v1 diagram schema and the construction-v1
// config schema, plus canonical (byte-stable) JSON dumping for reports.

#include "etale/bratteli.hpp"
#include "etale/construction.hpp"

#include <json.hpp>

namespace etale {

using Json = nlohmann::json;

Json diagram_to_json(const BratteliDiagram& d, int depth);
DiagramPtr diagram_from_json(const Json& j);

Json construction_to_json(const ConstructionConfig& c);
ConstructionConfig construction_from_json(const Json& j);

std::string canonical_dump(const Json& j);
std::string hex_digest(const std::string& data); // FNV-1a, for config digests

} // namespace etale
