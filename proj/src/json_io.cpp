#include "freep/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace freep {

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json value;
  in >> value;
  return value;
}

void write_json_file(const std::string& path, const json& value) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << value.dump(2) << "\n";
}

json space_to_json(const QuasiMetricSpace& space) {
  json out;
  out["points"] = space.names;
  out["base"] = space.names[space.base];
  out["p"] = space.p;
  json rows = json::array();
  for (int i = 0; i < space.size(); ++i) {
    json row = json::array();
    for (int j = 0; j < space.size(); ++j) row.push_back(space.dist(i, j));
    rows.push_back(row);
  }
  out["dist"] = rows;
  return out;
}

QuasiMetricSpace space_from_json(const json& value) {
  QuasiMetricSpace space;
  space.names = value.at("points").get<std::vector<std::string>>();
  space.p = value.at("p").get<double>();
  space.base = -1;
  std::string base = value.at("base").get<std::string>();
  for (std::size_t i = 0; i < space.names.size(); ++i)
    if (space.names[i] == base) space.base = static_cast<int>(i);
  if (space.base < 0) throw std::runtime_error("base point not listed in points");
  const auto& rows = value.at("dist");
  const int m = static_cast<int>(space.names.size());
  if (static_cast<int>(rows.size()) != m)
    throw std::runtime_error("dist row count mismatch");
  space.dist.resize(m, m);
  for (int i = 0; i < m; ++i) {
    if (static_cast<int>(rows[i].size()) != m)
      throw std::runtime_error("dist column count mismatch");
    for (int j = 0; j < m; ++j) space.dist(i, j) = rows[i][j].get<double>();
  }
  return space;
}

json tree_to_json(const WeightedTree& tree) {
  json out;
  out["vertices"] = tree.vertices;
  json edges = json::array();
  for (const auto& e : tree.edges)
    edges.push_back({tree.vertices[static_cast<int>(e[0])],
                     tree.vertices[static_cast<int>(e[1])], e[2]});
  out["edges"] = edges;
  out["root"] = tree.root;
  return out;
}

WeightedTree tree_from_json(const json& value) {
  WeightedTree tree;
  tree.vertices = value.at("vertices").get<std::vector<std::string>>();
  tree.root = value.at("root").get<std::string>();
  for (const auto& e : value.at("edges")) {
    int u = tree.index_of(e.at(0).get<std::string>());
    int v = tree.index_of(e.at(1).get<std::string>());
    if (u < 0 || v < 0) throw std::runtime_error("edge endpoint not a vertex");
    tree.edges.push_back({static_cast<double>(u), static_cast<double>(v),
                          e.at(2).get<double>()});
  }
  return tree;
}

json molecule_to_json(const Molecule& mu) {
  json coeffs = json::object();
  for (int idx : mu.support()) coeffs[mu.space()->names[idx]] = mu.coeff(idx);
  json out;
  out["coeffs"] = coeffs;
  out["space"] = space_to_json(*mu.space());
  return out;
}

Molecule molecule_from_json(const json& value, SpacePtr space) {
  if (value.contains("space") && value["space"].is_object()) {
    QuasiMetricSpace inline_space = space_from_json(value["space"]);
    if (inline_space.names != space->names)
      throw std::runtime_error("molecule's inline space disagrees with --space");
  }
  Molecule mu(std::move(space));
  for (const auto& [name, coeff] : value.at("coeffs").items()) {
    int idx = mu.space()->index_of(name);
    if (idx < 0) throw std::runtime_error("unknown point in molecule: " + name);
    mu.set_coeff(idx, coeff.get<double>());
  }
  return mu;
}

std::vector<int> subset_from_json(const json& value, const QuasiMetricSpace& space) {
  std::vector<int> members;
  for (const auto& name : value.at("members")) {
    int idx = space.index_of(name.get<std::string>());
    if (idx < 0)
      throw std::runtime_error("unknown point in subset: " +
                               name.get<std::string>());
    members.push_back(idx);
  }
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  return members;
}

json subset_to_json(const QuasiMetricSpace& space, const std::vector<int>& members) {
  json names = json::array();
  for (int idx : members) names.push_back(space.names[idx]);
  return json{{"members", names}};
}

BoundaryMap boundary_from_json(const json& value, const QuasiMetricSpace& space,
                               int dim) {
  BoundaryMap f(space.size());
  for (const auto& [name, coords] : value.items()) {
    int idx = space.index_of(name);
    if (idx < 0) throw std::runtime_error("unknown point in boundary data: " + name);
    Eigen::VectorXd v(dim);
    if (coords.is_number()) {
      if (dim != 1) throw std::runtime_error("scalar value for vector target");
      v[0] = coords.get<double>();
    } else {
      if (static_cast<int>(coords.size()) != dim)
        throw std::runtime_error("boundary value dimension mismatch");
      for (int j = 0; j < dim; ++j) v[j] = coords[j].get<double>();
    }
    f[idx] = v;
  }
  return f;
}

}  // namespace freep
