#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "freep/extend.hpp"
#include "freep/molecule.hpp"
#include "freep/space.hpp"

namespace freep {

using nlohmann::json;

json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& value);

/// { "points": [...], "base": "...", "p": number, "dist": [[...]...] }
json space_to_json(const QuasiMetricSpace& space);
QuasiMetricSpace space_from_json(const json& value);

/// { "vertices": [...], "edges": [[u, v, w]...], "root": "..." }
json tree_to_json(const WeightedTree& tree);
WeightedTree tree_from_json(const json& value);

/// { "space": <inline object or id string>, "coeffs": { point: number } }
json molecule_to_json(const Molecule& mu);
Molecule molecule_from_json(const json& value, SpacePtr space);

/// { "members": [...] }
std::vector<int> subset_from_json(const json& value, const QuasiMetricSpace& space);
json subset_to_json(const QuasiMetricSpace& space, const std::vector<int>& members);

/// { point: [coords...] }; scalars accepted for one-dimensional targets.
BoundaryMap boundary_from_json(const json& value, const QuasiMetricSpace& space,
                               int dim);

}  // namespace freep
