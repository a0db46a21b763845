#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "polyiso/complex.hpp"
#include "polyiso/plmap.hpp"
#include "polyiso/types.hpp"

namespace polyiso {

/**
 * Discretization of a complex for chain-based metric estimates.
 *
 * Nodes are the subdivision vertices at the given level, anchored in the
 * original complex.  Two nodes are joined whenever they lie in a common
 * closed simplex, with the exact flat within-simplex distance as weight.
 * mesh is the largest nearest-neighbor distance over nodes, so every node
 * has an admissible step once chain_eps >= mesh.
 */
struct SampleGraph {
  ComplexPtr complex;
  ComplexPtr refined;
  std::vector<BarycentricPoint> nodes;
  std::vector<std::vector<std::pair<int, double>>> adjacency;
  double mesh = 0.0;
  int level = 0;

  int node_count() const { return static_cast<int>(nodes.size()); }
};

SampleGraph sample_graph(const ComplexPtr& complex, int level);

/// Shortest-path distance in the sample graph; nullopt when disconnected.
std::optional<double> intrinsic_distance(const SampleGraph& graph, int a, int b);

/// Chain estimate of the pullback metric: shortest path over steps of
/// intrinsic length <= chain_eps, each weighted by the ambient distance of
/// the node images.  nullopt when the pair is disconnected outright; error
/// when chain_eps leaves an intrinsically connected pair without a chain.
std::optional<double> pullback_estimate(const PLMap& map, const SampleGraph& graph,
                                        int a, int b, double chain_eps);

struct DefectRow {
  int a = 0, b = 0;
  double intrinsic = 0.0;
  double pullback = 0.0;
  double defect = 0.0;
};

struct DefectReport {
  double max_defect = 0.0;
  int argmax_a = -1, argmax_b = -1;
  std::vector<DefectRow> rows;
};

/// Max over pairs of intrinsic_distance - pullback_estimate, with per-pair
/// rows.  Empty pairs list means all node pairs.  Pairs disconnected in the
/// full graph are skipped.
DefectReport isometry_defect(const PLMap& map, const SampleGraph& graph,
                             double chain_eps,
                             const std::vector<std::pair<int, int>>& pairs = {});

}  // namespace polyiso
