#pragma once

#include <map>
#include <optional>
#include <vector>

#include "polyiso/complex.hpp"
#include "polyiso/plmap.hpp"
#include "polyiso/types.hpp"

namespace polyiso {

struct EdgeFold {
  Simplex edge;
  int pieces = 1;
  double target_length = 0.0;
  double straight_length = 0.0;
  Vector transverse;              // zero vector when the edge stays straight
  std::vector<double> offsets;    // pieces+1 transverse offsets, zero at the ends
};

struct FoldPlan {
  std::vector<EdgeFold> edges;
};

/// Zigzag polyline from p to q of total arclength target_length whose
/// deviation from the segment stays within amplitude_budget.  The piece count
/// is ceil((sqrt(L^2 - l^2) + l) / budget) rounded up to even so the last
/// vertex lands back on q; pass span_term=false to drop the straight-length
/// term (fewer, longer pieces with the same transverse deviation bound).
std::vector<Vector> fold_edge(const Vector& p, const Vector& q, double target_length,
                              double amplitude_budget,
                              const std::optional<Vector>& transverse = std::nullopt,
                              bool span_term = true);

struct FoldOptions {
  bool span_term = true;
};

struct IsometrizeResult {
  PLMap map;                     // linear on the split domain
  Correspondence correspondence; // split domain -> original complex
  FoldPlan plan;
};

/// Folds every strictly short edge of a short graph map so each edge's image
/// arclength equals its intrinsic length, fixing original vertex images.
/// Deviation on edges meeting the l-th shell around base_vertex stays below
/// min(eps_schedule[0], eps_schedule[l-1]).
IsometrizeResult isometrize_graph(const PLMap& map, const std::vector<double>& eps_schedule,
                                  const VertexId& base_vertex,
                                  const FoldOptions& options = {});

}  // namespace polyiso
