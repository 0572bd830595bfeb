#pragma once

#include <memory>
#include <string>
#include <vector>

#include "freep/space.hpp"

namespace freep::test {

/// Points on the real line with |x - y| distances, base at the first entry.
inline QuasiMetricSpace line_space(const std::vector<double>& coords, double p = 1.0) {
  QuasiMetricSpace space;
  const int m = static_cast<int>(coords.size());
  space.base = 0;
  space.p = p;
  space.dist.resize(m, m);
  for (int i = 0; i < m; ++i) {
    space.names.push_back(std::to_string(coords[i]));
    for (int j = 0; j < m; ++j) space.dist(i, j) = std::abs(coords[i] - coords[j]);
  }
  return space;
}

inline QuasiMetricSpace two_point_space(double d, double p = 1.0) {
  QuasiMetricSpace space;
  space.names = {"0", "z"};
  space.base = 0;
  space.p = p;
  space.dist.resize(2, 2);
  space.dist << 0.0, d, d, 0.0;
  return space;
}

inline WeightedTree path_tree(int length, double weight = 1.0) {
  WeightedTree tree;
  for (int i = 0; i <= length; ++i) tree.vertices.push_back(std::to_string(i));
  tree.root = "0";
  for (int i = 0; i < length; ++i)
    tree.edges.push_back({static_cast<double>(i), static_cast<double>(i + 1), weight});
  return tree;
}

inline SpacePtr shared(QuasiMetricSpace space) {
  return std::make_shared<QuasiMetricSpace>(std::move(space));
}

}  // namespace freep::test
