#include "polyiso/exactgeom.hpp"

#include <algorithm>

namespace polyiso::exact {

namespace {

// Row echelon reduction in place; returns pivot columns.
std::vector<int> eliminate(RMatrix& m) {
  std::vector<int> pivots;
  const int rows = static_cast<int>(m.size());
  const int cols = rows ? static_cast<int>(m[0].size()) : 0;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int pivot = -1;
    for (int i = r; i < rows; ++i)
      if (m[i][c] != 0) { pivot = i; break; }
    if (pivot < 0) continue;
    std::swap(m[r], m[pivot]);
    const Rational inv = m[r][c];
    for (int j = c; j < cols; ++j) m[r][j] /= inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      const Rational f = m[i][c];
      for (int j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace

int rank(RMatrix m) { return static_cast<int>(eliminate(m).size()); }

int affine_rank(const std::vector<Vector>& points) {
  if (points.size() < 2) return 0;
  const int dim = static_cast<int>(points[0].size());
  RMatrix m(points.size() - 1, RVector(dim));
  for (size_t i = 1; i < points.size(); ++i)
    for (int j = 0; j < dim; ++j)
      m[i - 1][j] = Rational(points[i][j]) - Rational(points[0][j]);
  return rank(std::move(m));
}

std::optional<RVector> solve_unique(RMatrix a, RVector b) {
  const int rows = static_cast<int>(a.size());
  const int cols = rows ? static_cast<int>(a[0].size()) : 0;
  for (int i = 0; i < rows; ++i) a[i].push_back(b[i]);
  const std::vector<int> pivots = eliminate(a);
  // Inconsistent if the augmented column is a pivot.
  if (!pivots.empty() && pivots.back() == cols) return std::nullopt;
  if (static_cast<int>(pivots.size()) != cols) return std::nullopt;  // underdetermined
  RVector x(cols, 0);
  for (size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = a[r][cols];
  return x;
}

namespace {

// Feasible set F = { z >= 0 : A z = b } for the pair system.  Builds the
// candidate vertex list of F by enumerating basic supports, then checks every
// candidate against the linear description of the shared face.
struct PairSystem {
  RMatrix a;
  RVector b;
  int na = 0, nb = 0;

  RVector column(int j) const {
    RVector c(a.size());
    for (size_t i = 0; i < a.size(); ++i) c[i] = a[i][j];
    return c;
  }
};

PairSystem build_system(const std::vector<Vector>& pa, const std::vector<Vector>& pb) {
  PairSystem sys;
  sys.na = static_cast<int>(pa.size());
  sys.nb = static_cast<int>(pb.size());
  const int dim = static_cast<int>(pa[0].size());
  const int rows = dim + 2;
  const int cols = sys.na + sys.nb;
  sys.a.assign(rows, RVector(cols, 0));
  sys.b.assign(rows, 0);
  for (int j = 0; j < sys.na; ++j)
    for (int d = 0; d < dim; ++d) sys.a[d][j] = Rational(pa[j][d]);
  for (int j = 0; j < sys.nb; ++j)
    for (int d = 0; d < dim; ++d) sys.a[d][sys.na + j] = -Rational(pb[j][d]);
  for (int j = 0; j < sys.na; ++j) sys.a[dim][j] = 1;
  for (int j = 0; j < sys.nb; ++j) sys.a[dim + 1][sys.na + j] = 1;
  sys.b[dim] = 1;
  sys.b[dim + 1] = 1;
  return sys;
}

bool nonnegative(const RVector& z) {
  return std::all_of(z.begin(), z.end(), [](const Rational& x) { return x >= 0; });
}

// Does z lie on the diagonal over the shared face?  All weight must sit on
// shared vertices, with equal weights across the two sides.
bool on_shared_diagonal(const RVector& z, int na, int nb,
                        const std::vector<std::pair<int, int>>& shared) {
  std::vector<bool> shared_a(na, false), shared_b(nb, false);
  for (const auto& [ia, ib] : shared) {
    shared_a[ia] = true;
    shared_b[ib] = true;
    if (z[ia] != z[na + ib]) return false;
  }
  for (int i = 0; i < na; ++i)
    if (!shared_a[i] && z[i] != 0) return false;
  for (int i = 0; i < nb; ++i)
    if (!shared_b[i] && z[na + i] != 0) return false;
  return true;
}

std::vector<double> to_doubles(const RVector& z, int begin, int count) {
  std::vector<double> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i)
    out.push_back(static_cast<double>(z[begin + i]));
  return out;
}

RVector to_rational(const Vector& v) {
  RVector out(v.size());
  for (int i = 0; i < v.size(); ++i) out[i] = Rational(v[i]);
  return out;
}

bool all_zero(const RVector& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& x) { return x == 0; });
}

// Exact segment-segment intersection, direct instead of support enumeration:
// fold-heavy maps produce many coplanar and collinear segment pairs where the
// generic path is slow.
PairCheck segment_pair_check(const std::vector<Vector>& pa, const std::vector<Vector>& pb,
                             const std::vector<std::pair<int, int>>& shared) {
  PairCheck result;
  const int dim = static_cast<int>(pa[0].size());
  const RVector a0 = to_rational(pa[0]), a1 = to_rational(pa[1]);
  const RVector b0 = to_rational(pb[0]), b1 = to_rational(pb[1]);
  RVector da(dim), db(dim), rhs(dim);
  for (int i = 0; i < dim; ++i) {
    da[i] = a1[i] - a0[i];
    db[i] = b1[i] - b0[i];
    rhs[i] = b0[i] - a0[i];
  }

  auto violate = [&](const Rational& s, const Rational& t) {
    RVector z = {1 - s, s, 1 - t, t};
    if (!on_shared_diagonal(z, 2, 2, shared)) {
      result.ok = false;
      result.witness_a = to_doubles(z, 0, 2);
      result.witness_b = to_doubles(z, 2, 2);
    }
  };

  if (shared.size() >= 2) {
    // Same edge paired with itself: injective iff the endpoint images differ.
    if (all_zero(da)) violate(0, 1);
    return result;
  }

  // Collapsed images pick their witness weights at the shared vertex when one
  // exists, so a legitimate single-point meeting stays on the diagonal.
  const Rational sa = shared.empty() ? Rational(0) : Rational(shared[0].first);
  const Rational sb = shared.empty() ? Rational(0) : Rational(shared[0].second);

  const bool za = all_zero(da), zb = all_zero(db);
  if (za && zb) {
    if (a0 == b0) violate(sa, sb);
    return result;
  }
  if (za || zb) {
    // One image degenerates to a point; test point-in-segment.
    const RVector& d = za ? db : da;
    int c = 0;
    while (d[c] == 0) ++c;
    // za: solve t*db = a0 - b0 = -rhs; zb: solve s*da = b0 - a0 = rhs.
    const Rational t = (za ? -rhs[c] : rhs[c]) / d[c];
    for (int i = 0; i < dim; ++i)
      if ((za ? -rhs[i] : rhs[i]) != t * d[i]) return result;  // off the line
    if (t < 0 || t > 1) return result;
    if (za)
      violate(sa, t);
    else
      violate(t, sb);
    return result;
  }

  RMatrix m(dim, RVector(3));
  for (int i = 0; i < dim; ++i) m[i] = {da[i], -db[i], rhs[i]};
  const std::vector<int> pivots = eliminate(m);
  if (!pivots.empty() && pivots.back() == 2) return result;  // skew, no meeting point
  const int rank2 = static_cast<int>(pivots.size());

  if (rank2 == 2) {
    const Rational s = m[0][2], t = m[1][2];
    if (s < 0 || s > 1 || t < 0 || t > 1) return result;
    violate(s, t);
    return result;
  }

  // rank 1: both segments on one line; compare parameter intervals along da.
  int c = 0;
  while (da[c] == 0) ++c;
  const Rational rho = db[c] / da[c];
  const Rational sb0 = rhs[c] / da[c];
  const Rational sb1 = sb0 + rho;
  const Rational blo = std::min(sb0, sb1), bhi = std::max(sb0, sb1);
  const Rational lo = std::max(Rational(0), blo), hi = std::min(Rational(1), bhi);
  if (lo > hi) return result;
  const Rational s = lo == hi ? lo : (lo + hi) / 2;
  violate(s, (s - sb0) / rho);
  return result;
}

}  // namespace

PairCheck simplex_pair_check(const std::vector<Vector>& points_a,
                             const std::vector<Vector>& points_b,
                             const std::vector<std::pair<int, int>>& shared) {
  PairCheck result;
  if (points_a.empty() || points_b.empty())
    throw PreconditionError("simplex_pair_check: empty point set");

  if (points_a.size() == 2 && points_b.size() == 2)
    return segment_pair_check(points_a, points_b, shared);

  // Fast path: when the union of the image vertices is affinely independent,
  // both simplices are faces of one nondegenerate geometric simplex, and faces
  // of a simplex always intersect in exactly their shared face.
  {
    std::vector<bool> is_shared_b(points_b.size(), false);
    for (const auto& [ia, ib] : shared) is_shared_b[ib] = true;
    std::vector<Vector> all = points_a;
    for (size_t j = 0; j < points_b.size(); ++j)
      if (!is_shared_b[j]) all.push_back(points_b[j]);
    if (affine_rank(all) == static_cast<int>(all.size()) - 1) return result;
  }

  const PairSystem sys = build_system(points_a, points_b);
  const int cols = sys.na + sys.nb;

  auto report = [&](const RVector& z) {
    result.ok = false;
    result.witness_a = to_doubles(z, 0, sys.na);
    result.witness_b = to_doubles(z, sys.na, sys.nb);
  };

  // Candidate vertices of F: supports whose columns are independent and whose
  // unique solution is feasible.  F is bounded, so F = conv(candidates).
  for (unsigned mask = 1; mask < (1u << cols); ++mask) {
    std::vector<int> support;
    for (int j = 0; j < cols; ++j)
      if (mask & (1u << j)) support.push_back(j);
    RMatrix sub(sys.a.size(), RVector(support.size()));
    for (size_t i = 0; i < sys.a.size(); ++i)
      for (size_t j = 0; j < support.size(); ++j) sub[i][j] = sys.a[i][support[j]];
    const auto sol = solve_unique(std::move(sub), sys.b);
    if (!sol) continue;
    RVector z(cols, 0);
    for (size_t j = 0; j < support.size(); ++j) z[support[j]] = (*sol)[j];
    if (!nonnegative(z)) continue;
    if (!on_shared_diagonal(z, sys.na, sys.nb, shared)) {
      report(z);
      return result;
    }
  }
  return result;
}

}  // namespace polyiso::exact
