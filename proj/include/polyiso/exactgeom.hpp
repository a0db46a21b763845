#pragma once

#include "polyiso/types.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <vector>

namespace polyiso::exact {

using Rational = boost::multiprecision::cpp_rational;
using RMatrix = std::vector<std::vector<Rational>>;
using RVector = std::vector<Rational>;

/// Exact rank of a rational matrix.
int rank(RMatrix m);

/// Exact affine rank of a point set: rank of the differences from the first
/// point.  Points are converted from doubles without rounding.
int affine_rank(const std::vector<Vector>& points);

/// Solves A x = b exactly.  Returns the unique solution, or nullopt when the
/// system is inconsistent or underdetermined.
std::optional<RVector> solve_unique(RMatrix a, RVector b);

/// Result of the exact intersection test for a pair of image simplices.
struct PairCheck {
  bool ok = true;  // intersection of the convex images equals the shared face
  // When !ok: barycentric weights of a common image point witnessing the overlap.
  std::vector<double> witness_a;
  std::vector<double> witness_b;
};

/**
 * Decides, in exact rational arithmetic, whether the convex hulls of
 * points_a and points_b intersect exactly in the convex hull of their shared
 * columns.  shared[i] lists index pairs (into a and b) that represent the same
 * domain vertex.  This is the per-pair kernel of the exact embedding verdict.
 */
PairCheck simplex_pair_check(const std::vector<Vector>& points_a,
                             const std::vector<Vector>& points_b,
                             const std::vector<std::pair<int, int>>& shared);

}  // namespace polyiso::exact
