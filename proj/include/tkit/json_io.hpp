#pragma once

#include <string>

#include <json.hpp>

#include "tkit/certificate.hpp"
#include "tkit/prop3.hpp"
#include "tkit/prop4.hpp"

namespace tkit {

using Json = nlohmann::json;

Json to_json(const PolyMap& p);
PolyMap polymap_from_json(const Json& j);

Json to_json(const CVec& v);
CVec cvec_from_json(const Json& j);

Json to_json(const TransversalityCertificate& cert);
TransversalityCertificate certificate_from_json(const Json& j);

Json to_json(const PerturbationResult& res);
Json to_json(const CoveringBudget& budget);
Json to_json(const FamilyResult& res);

// File helpers; parse failures raise SchemaError.
Json load_json(const std::string& path);
void save_json(const Json& j, const std::string& path);

}  // namespace tkit
