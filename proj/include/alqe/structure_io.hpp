// JSON file format for finite structures. Rationals are always strings
// ("p/q" or "n"); tables are nested arrays indexed by universe position.
#pragma once

#include <string>

#include "json.hpp"

#include "alqe/semantics.hpp"

namespace alqe {

nlohmann::json signature_to_json(const Signature& sig);
Signature signature_from_json(const nlohmann::json& j);

nlohmann::json structure_to_json(const FiniteStructure& m);
/// Throws DomainError on schema violations.
FiniteStructure structure_from_json(const nlohmann::json& j);

/// Canonical serialization (sorted keys, two-space indent, trailing newline).
std::string dump_structure(const FiniteStructure& m);

FiniteStructure load_structure_file(const std::string& path);
void save_structure_file(const std::string& path, const FiniteStructure& m);

}  // namespace alqe
