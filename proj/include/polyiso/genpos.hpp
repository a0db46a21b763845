#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "polyiso/plmap.hpp"
#include "polyiso/types.hpp"

namespace polyiso {

struct GenPosReport {
  int k = 0;
  bool holds = true;
  std::vector<int> witness;  // indices of an offending subset, empty when holds
  double min_singular_gap = std::numeric_limits<double>::infinity();
};

struct GenPosOptions {
  // When >= 0, only subsets containing this point index are tested. Sound for
  // incremental loops where all other points are already known to be in
  // general position.
  int focus = -1;
  // Force exhaustive enumeration regardless of subset count.
  bool full = false;
  std::size_t exhaustive_limit = 2000;
};

// Tests whether every subset of at most k+1 points is affinely independent,
// using the singular-value gap of the difference matrix against
// rank_tolerance * (largest singular value).
GenPosReport is_general_position(const std::vector<Vector>& points, int k,
                                 double rank_tolerance = 1e-9,
                                 const GenPosOptions& options = {});

struct PerturbOptions {
  double rank_tolerance = 1e-9;
  int retries = 64;
  int max_halvings = 20;
};

// Moves vertex images by scheduled per-shell amounts until they are in
// (2n+1)-general position while preserving strict shortness. eps_schedule[l-1]
// bounds displacements inside the l-th shell around base_vertex; indices past
// the end reuse the last entry.
PLMap perturb_to_embedding(const PLMap& map, const std::vector<double>& eps_schedule,
                           const VertexId& base_vertex, std::uint64_t seed,
                           const PerturbOptions& options = {});

// Coordinate-at-a-time variant: after pass j, the first-j-coordinate images
// are in min(j, 2n+1)-general position. Requires ambient dimension >= 3n.
PLMap perturb_prefix_general_position(const PLMap& map,
                                      const std::vector<double>& eps_schedule,
                                      const VertexId& base_vertex, std::uint64_t seed,
                                      const PerturbOptions& options = {});

enum class VerifyMode { genpos, exact };

struct EmbeddingVerdict {
  bool embedding = false;
  VerifyMode mode = VerifyMode::genpos;
  // Offending data when not an embedding: a vertex subset (genpos mode) or a
  // pair of simplices whose images overlap beyond their shared face (exact).
  std::vector<int> witness_points;
  Simplex witness_a;
  Simplex witness_b;
  std::string detail;
};

EmbeddingVerdict verify_embedding(const PLMap& map, VerifyMode mode,
                                  double rank_tolerance = 1e-9);

}  // namespace polyiso
