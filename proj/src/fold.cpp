#include "polyiso/fold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace polyiso {

namespace {

// Lowest-index coordinate axis orthogonalized against the edge direction.
Vector default_transverse(const Vector& p, const Vector& q) {
  const int dim = static_cast<int>(p.size());
  Vector d = q - p;
  const double norm = d.norm();
  if (norm > 0.0) d /= norm;
  for (int i = 0; i < dim; ++i) {
    Vector w = Vector::Zero(dim);
    w[i] = 1.0;
    w -= w.dot(d) * d;
    const double wn = w.norm();
    if (wn > 1e-6) return w / wn;
  }
  throw NumericalError("fold: no direction transverse to the edge found");
}

// Smallest even integer >= max(x, 2); even piece counts let the zigzag end
// back on the target vertex.
int even_ceil(double x) {
  if (!(x < 5e7)) throw NumericalError("fold: piece count out of range");
  int m = std::max(2, static_cast<int>(std::ceil(x)));
  return m % 2 == 0 ? m : m + 1;
}

std::vector<Vector> zigzag(const Vector& p, const Vector& q, double target_length,
                           int pieces, const Vector& transverse) {
  const double straight2 = (q - p).squaredNorm();
  const double rise =
      std::sqrt(std::max(0.0, target_length * target_length - straight2)) / pieces;
  std::vector<Vector> points;
  points.reserve(pieces + 1);
  for (int i = 0; i <= pieces; ++i) {
    const double t = static_cast<double>(i) / pieces;
    Vector x = p + t * (q - p);
    if (i % 2 == 1) x += rise * transverse;
    points.push_back(std::move(x));
  }
  return points;
}

void validate_transverse(const Vector& u, const Vector& p, const Vector& q) {
  if (u.size() != p.size())
    throw PreconditionError("fold: transverse direction has wrong dimension");
  if (std::abs(u.norm() - 1.0) > 1e-9)
    throw PreconditionError("fold: transverse direction must be a unit vector");
  const double scale = std::max(1.0, (q - p).norm());
  if (std::abs(u.dot(q - p)) > 1e-9 * scale)
    throw PreconditionError("fold: transverse direction must be orthogonal to the edge");
}

}  // namespace

std::vector<Vector> fold_edge(const Vector& p, const Vector& q, double target_length,
                              double amplitude_budget,
                              const std::optional<Vector>& transverse, bool span_term) {
  if (p.size() != q.size() || p.size() < 1)
    throw PreconditionError("fold_edge: endpoint dimensions disagree");
  if (!(target_length > 0.0) || !std::isfinite(target_length))
    throw PreconditionError("fold_edge: target arclength must be positive");
  const double straight = (q - p).norm();
  if (straight > target_length * (1.0 + 1e-12))
    throw PreconditionError("fold_edge: endpoints farther apart than the target arclength");
  if (straight >= target_length * (1.0 - 1e-12)) return {p, q};

  if (p.size() < 2)
    throw PreconditionError("fold_edge: folding a strictly short edge needs dimension >= 2");
  if (!(amplitude_budget > 0.0))
    throw PreconditionError("fold_edge: amplitude budget must be positive");
  Vector u;
  if (transverse) {
    validate_transverse(*transverse, p, q);
    u = *transverse;
  } else {
    u = default_transverse(p, q);
  }
  const double rise =
      std::sqrt(std::max(0.0, target_length * target_length - straight * straight));
  const int pieces =
      even_ceil((rise + (span_term ? straight : 0.0)) / amplitude_budget);
  return zigzag(p, q, target_length, pieces, u);
}

namespace {

double eps_at(const std::vector<double>& sched, int level) {
  if (level < 1) level = 1;
  const std::size_t i = std::min(static_cast<std::size_t>(level), sched.size());
  return sched[i - 1];
}

}  // namespace

IsometrizeResult isometrize_graph(const PLMap& map, const std::vector<double>& eps_schedule,
                                  const VertexId& base_vertex, const FoldOptions& options) {
  const auto& c = *map.domain();
  if (c.dimension() > 1)
    throw PreconditionError("isometrize_graph: domain must be a graph (dimension <= 1)");
  if (eps_schedule.empty())
    throw PreconditionError("isometrize_graph: eps schedule must be nonempty");
  for (double e : eps_schedule)
    if (!(e > 0.0) || !std::isfinite(e))
      throw PreconditionError("isometrize_graph: eps schedule entries must be positive");
  if (!c.has_vertex(base_vertex))
    throw PreconditionError("isometrize_graph: unknown base vertex " + base_vertex);

  const auto shells = shell_indices(c, base_vertex);
  auto shell_of = [&](const Simplex& s) {
    const auto it = shells.find(s);
    return it == shells.end() ? std::numeric_limits<int>::max() : it->second;
  };

  FoldPlan plan;
  std::map<Simplex, std::vector<double>> cuts;
  struct EdgeGeometry {
    Vector a, b, u;
    double rise = 0.0;
    int pieces = 1;
  };
  std::map<Simplex, EdgeGeometry> geometry;

  for (const auto& e : c.edges()) {
    const double length = c.edge_length(e[0], e[1]);
    const Vector& pa = map.image(e[0]);
    const Vector& pb = map.image(e[1]);
    const double straight = (pb - pa).norm();
    if (straight > length * (1.0 + 1e-12))
      throw PreconditionError("isometrize_graph: edge " + c.vertex_id(e[0]) + "|" +
                              c.vertex_id(e[1]) + " has image longer than its length");

    EdgeFold entry;
    entry.edge = e;
    entry.target_length = length;
    entry.straight_length = straight;
    if (straight >= length * (1.0 - 1e-12)) {
      entry.transverse = Vector::Zero(map.ambient_dim());
      entry.offsets = {0.0, 0.0};
      plan.edges.push_back(std::move(entry));
      continue;
    }
    if (map.ambient_dim() < 2)
      throw PreconditionError("isometrize_graph: folding needs ambient dimension >= 2");

    // The accuracy on an edge binds at every shell its closure meets: the
    // edge's own shell plus both endpoint shells.
    double budget = std::numeric_limits<double>::infinity();
    for (int level : {shell_of(e), shell_of({e[0]}), shell_of({e[1]})})
      budget = std::min(budget,
                        std::min(eps_at(eps_schedule, 1), eps_at(eps_schedule, level)));
    const double amplitude = 0.5 * budget;

    const double rise = std::sqrt(std::max(0.0, length * length - straight * straight));
    const int pieces =
        even_ceil((rise + (options.span_term ? straight : 0.0)) / amplitude);
    const Vector u = default_transverse(pa, pb);

    entry.pieces = pieces;
    entry.transverse = u;
    entry.offsets.assign(pieces + 1, 0.0);
    for (int i = 1; i < pieces; i += 2) entry.offsets[i] = rise / pieces;
    plan.edges.push_back(std::move(entry));

    auto& params = cuts[e];
    for (int i = 1; i < pieces; ++i) params.push_back(static_cast<double>(i) / pieces);
    geometry[e] = {pa, pb, u, rise / pieces, pieces};
  }

  const SubdivisionResult split = split_edges_at(map.domain(), cuts);
  std::vector<Vector> images;
  images.reserve(split.refined->vertex_count());
  for (int v = 0; v < split.refined->vertex_count(); ++v) {
    const auto& anchor = split.correspondence.anchors[v];
    if (anchor.simplex.size() == 1) {
      images.push_back(map.image(anchor.simplex[0]));
      continue;
    }
    const auto& geo = geometry.at(anchor.simplex);
    const double t = anchor.weights[1];
    const int i = static_cast<int>(std::lround(t * geo.pieces));
    Vector x = geo.a + t * (geo.b - geo.a);
    if (i % 2 == 1) x += geo.rise * geo.u;
    images.push_back(std::move(x));
  }

  return IsometrizeResult{PLMap(split.refined, map.ambient_dim(), std::move(images)),
                          split.correspondence, std::move(plan)};
}

}  // namespace polyiso
