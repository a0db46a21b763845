#include "polyiso/genpos.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "polyiso/complex.hpp"
#include "polyiso/exactgeom.hpp"
#include "polyiso/rng.hpp"

namespace polyiso {

namespace {

// Exact binomial via the incremental product; sizes here keep it well inside
// 64 bits (k is at most ambient_dim + 1).
std::size_t comb_count(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::size_t r = 1;
  for (int i = 0; i < k; ++i) r = r * static_cast<std::size_t>(n - i) / (i + 1);
  return r;
}

// Lexicographic size-m subsets of {0..n-1}. f returns false to stop early.
template <typename F>
bool for_each_combination(int n, int m, F&& f) {
  if (m > n || m <= 0) return true;
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    if (!f(idx)) return false;
    int i = m - 1;
    while (i >= 0 && idx[i] == n - m + i) --i;
    if (i < 0) return true;
    ++idx[i];
    for (int j = i + 1; j < m; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// sigma_min / sigma_max of the difference matrix of the subset; 0 when the
// subset has zero diameter.
double singular_gap(const std::vector<Vector>& points, const std::vector<int>& subset) {
  const int m = static_cast<int>(subset.size());
  const int dim = static_cast<int>(points[subset[0]].size());
  Matrix d(dim, m - 1);
  for (int i = 1; i < m; ++i) d.col(i - 1) = points[subset[i]] - points[subset[0]];
  Eigen::JacobiSVD<Matrix> svd(d);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  if (!(smax > 0.0)) return 0.0;
  return sv(sv.size() - 1) / smax;
}

}  // namespace

GenPosReport is_general_position(const std::vector<Vector>& points, int k,
                                 double rank_tolerance, const GenPosOptions& options) {
  GenPosReport report;
  report.k = k;
  if (k < 0) throw PreconditionError("is_general_position: k must be nonnegative");
  if (points.empty()) return report;
  const int dim = static_cast<int>(points[0].size());
  for (const auto& p : points)
    if (p.size() != dim)
      throw PreconditionError("is_general_position: mixed point dimensions");
  if (k > dim) throw PreconditionError("is_general_position: k exceeds ambient dimension");
  const int count = static_cast<int>(points.size());
  if (options.focus >= count)
    throw PreconditionError("is_general_position: focus index out of range");
  const int top = std::min(k + 1, count);

  std::size_t total = 0;
  for (int m = 2; m <= top; ++m)
    total += options.focus >= 0 ? comb_count(count - 1, m - 1) : comb_count(count, m);
  if (options.focus < 0 && !options.full && total > options.exhaustive_limit)
    throw PreconditionError(
        "is_general_position: " + std::to_string(total) +
        " subsets exceed the exhaustive limit; pass full=true or a focus vertex");

  auto test = [&](const std::vector<int>& subset) {
    const double gap = singular_gap(points, subset);
    report.min_singular_gap = std::min(report.min_singular_gap, gap);
    if (gap > rank_tolerance) return true;
    report.holds = false;
    report.witness = subset;
    return false;
  };

  for (int m = 2; m <= top && report.holds; ++m) {
    if (options.focus < 0) {
      for_each_combination(count, m, test);
    } else {
      std::vector<int> others;
      for (int i = 0; i < count; ++i)
        if (i != options.focus) others.push_back(i);
      for_each_combination(count - 1, m - 1, [&](const std::vector<int>& pick) {
        std::vector<int> subset;
        subset.reserve(m);
        for (int p : pick) subset.push_back(others[p]);
        subset.push_back(options.focus);
        std::sort(subset.begin(), subset.end());
        return test(subset);
      });
    }
  }
  return report;
}

namespace {

void validate_schedule(const std::vector<double>& eps_schedule) {
  if (eps_schedule.empty())
    throw PreconditionError("eps schedule must have at least one entry");
  for (double e : eps_schedule)
    if (!(e > 0.0) || !std::isfinite(e))
      throw PreconditionError("eps schedule entries must be positive and finite");
}

double eps_at(const std::vector<double>& sched, int level) {
  if (level < 1) level = 1;
  const std::size_t i =
      std::min(static_cast<std::size_t>(level), sched.size());
  return sched[i - 1];
}

// Shell level of each vertex around the base; unreachable vertices report
// INT_MAX and fall back to the last schedule entry.
std::vector<int> vertex_levels(const SimplicialComplex& c, const VertexId& base) {
  const auto idx = shell_indices(c, base);
  std::vector<int> level(c.vertex_count(), std::numeric_limits<int>::max());
  for (const auto& [s, l] : idx)
    if (s.size() == 1) level[s[0]] = l;
  return level;
}

using IncidentGram = std::vector<std::pair<Simplex, Matrix>>;

IncidentGram incident_grams(const SimplicialComplex& c, int vertex) {
  IncidentGram out;
  for (const auto& s : c.maximal_simplices()) {
    if (s.size() < 2) continue;
    if (std::find(s.begin(), s.end(), vertex) == s.end()) continue;
    out.emplace_back(s, gram_form(c, s).entries);
  }
  return out;
}

// Minimum margin over the incident maximal simplices with the moving vertex
// placed at pos; +inf when the vertex is isolated.
double min_incident_margin(const IncidentGram& incident, const std::vector<Vector>& images,
                           int vertex, const Vector& pos) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& [s, g] : incident) {
    const int m = static_cast<int>(s.size()) - 1;
    auto at = [&](int v) -> const Vector& { return v == vertex ? pos : images[v]; };
    const Vector& base = at(s[0]);
    std::vector<Vector> e;
    e.reserve(m);
    for (int i = 1; i <= m; ++i) e.push_back(at(s[i]) - base);
    Matrix gf(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = a; b < m; ++b) gf(a, b) = gf(b, a) = e[a].dot(e[b]);
    Eigen::SelfAdjointEigenSolver<Matrix> es(g - gf, Eigen::EigenvaluesOnly);
    worst = std::min(worst, es.eigenvalues()(0));
  }
  return worst;
}

// Largest radius in {budget, budget/2, ...} whose 2N signed coordinate
// displacements all keep the incident margin above half its current value.
double shortness_radius(const IncidentGram& incident, const std::vector<Vector>& images,
                        int vertex, double budget, int max_halvings) {
  if (incident.empty()) return budget;
  const int dim = static_cast<int>(images[vertex].size());
  const double m0 = min_incident_margin(incident, images, vertex, images[vertex]);
  double r = budget;
  for (int h = 0; h <= max_halvings; ++h, r *= 0.5) {
    bool ok = true;
    for (int i = 0; i < dim && ok; ++i) {
      for (double sign : {1.0, -1.0}) {
        Vector pos = images[vertex];
        pos[i] += sign * r;
        if (min_incident_margin(incident, images, vertex, pos) < 0.5 * m0) {
          ok = false;
          break;
        }
      }
    }
    if (ok) return r;
  }
  throw NumericalError("no shortness-preserving radius found after halving limit");
}

}  // namespace

PLMap perturb_to_embedding(const PLMap& map, const std::vector<double>& eps_schedule,
                           const VertexId& base_vertex, std::uint64_t seed,
                           const PerturbOptions& options) {
  const auto& c = *map.domain();
  validate_schedule(eps_schedule);
  if (!c.has_vertex(base_vertex))
    throw PreconditionError("perturb_to_embedding: unknown base vertex " + base_vertex);
  const int n = c.dimension();
  const int ambient = map.ambient_dim();
  if (ambient < 2 * n + 1)
    throw PreconditionError("perturb_to_embedding: ambient dimension must be at least 2n+1");
  if (!shortness_margin(map).strictly_short)
    throw PreconditionError("perturb_to_embedding: map must be strictly short");

  const int k_gp = 2 * n + 1;
  const std::vector<int> levels = vertex_levels(c, base_vertex);
  Rng rng(seed);
  std::vector<Vector> images = map.images();
  int moved = 0;

  for (int t = 0; t < c.vertex_count(); ++t) {
    GenPosOptions gp;
    gp.focus = t;
    std::vector<Vector> prefix(images.begin(), images.begin() + t + 1);
    if (is_general_position(prefix, k_gp, options.rank_tolerance, gp).holds) continue;

    ++moved;
    const double budget = std::min(eps_at(eps_schedule, 1), eps_at(eps_schedule, levels[t])) /
                          std::pow(2.0, moved + 1);
    const IncidentGram incident = incident_grams(c, t);
    double radius = shortness_radius(incident, images, t, budget, options.max_halvings);

    bool accepted = false;
    for (int h = 0; h < options.max_halvings && !accepted; ++h, radius *= 0.5) {
      for (int attempt = 0; attempt < options.retries; ++attempt) {
        const Vector candidate = images[t] + rng.in_ball(ambient, radius);
        if (!(min_incident_margin(incident, images, t, candidate) > 0.0)) continue;
        prefix[t] = candidate;
        if (!is_general_position(prefix, k_gp, options.rank_tolerance, gp).holds) continue;
        images[t] = candidate;
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw NumericalError("perturb_to_embedding: retries exhausted at vertex " +
                           c.vertex_id(t));
  }
  return map.with_images(std::move(images));
}

PLMap perturb_prefix_general_position(const PLMap& map,
                                      const std::vector<double>& eps_schedule,
                                      const VertexId& base_vertex, std::uint64_t seed,
                                      const PerturbOptions& options) {
  const auto& c = *map.domain();
  validate_schedule(eps_schedule);
  if (!c.has_vertex(base_vertex))
    throw PreconditionError("perturb_prefix_general_position: unknown base vertex " +
                            base_vertex);
  const int n = c.dimension();
  const int ambient = map.ambient_dim();
  if (ambient < 3 * n)
    throw PreconditionError(
        "perturb_prefix_general_position: ambient dimension must be at least 3n");
  // Short within tolerance is enough here: edges at margin zero stay put, and
  // moves only happen where general position fails, which leaves slack.
  if (!shortness_margin(map).short_map)
    throw PreconditionError("perturb_prefix_general_position: map must be short");

  const std::vector<int> levels = vertex_levels(c, base_vertex);
  Rng rng(seed);
  std::vector<Vector> images = map.images();

  for (int j = 1; j <= ambient; ++j) {
    const int k_j = std::min(j, 2 * n + 1);
    for (int t = 0; t < c.vertex_count(); ++t) {
      GenPosOptions gp;
      gp.focus = t;
      std::vector<Vector> prefix;
      prefix.reserve(t + 1);
      for (int v = 0; v <= t; ++v) prefix.emplace_back(images[v].head(j));
      if (is_general_position(prefix, k_j, options.rank_tolerance, gp).holds) continue;

      const double cap = std::min(eps_at(eps_schedule, 1), eps_at(eps_schedule, levels[t])) /
                         (4.0 * ambient);
      const IncidentGram incident = incident_grams(c, t);
      const double m0 = min_incident_margin(incident, images, t, images[t]);
      double radius = cap;
      bool sized = incident.empty();
      for (int h = 0; h <= options.max_halvings && !sized; ++h, radius *= 0.5) {
        bool ok = true;
        for (double sign : {1.0, -1.0}) {
          Vector pos = images[t];
          pos[j - 1] += sign * radius;
          if (min_incident_margin(incident, images, t, pos) < 0.5 * m0) {
            ok = false;
            break;
          }
        }
        if (ok) sized = true;
      }
      if (!sized)
        throw NumericalError("perturb_prefix_general_position: no usable interval at vertex " +
                             c.vertex_id(t));

      bool accepted = false;
      for (int h = 0; h < options.max_halvings && !accepted; ++h, radius *= 0.5) {
        for (int attempt = 0; attempt < options.retries; ++attempt) {
          Vector candidate = images[t];
          candidate[j - 1] += rng.uniform(-radius, radius);
          if (!(min_incident_margin(incident, images, t, candidate) > 0.0)) continue;
          prefix[t] = Vector(candidate.head(j));
          if (!is_general_position(prefix, k_j, options.rank_tolerance, gp).holds) continue;
          images[t] = candidate;
          accepted = true;
          break;
        }
      }
      if (!accepted)
        throw NumericalError("perturb_prefix_general_position: retries exhausted at vertex " +
                             c.vertex_id(t) + " coordinate " + std::to_string(j));
    }
  }
  return map.with_images(std::move(images));
}

namespace {

// Sound pruning: image hulls live inside the coordinate boxes of their vertex
// images, so strictly separated boxes cannot intersect.
bool boxes_separated(const Vector& lo_a, const Vector& hi_a, const Vector& lo_b,
                     const Vector& hi_b) {
  for (int d = 0; d < lo_a.size(); ++d)
    if (hi_a[d] < lo_b[d] || hi_b[d] < lo_a[d]) return true;
  return false;
}

}  // namespace

EmbeddingVerdict verify_embedding(const PLMap& map, VerifyMode mode, double rank_tolerance) {
  EmbeddingVerdict verdict;
  verdict.mode = mode;
  const auto& c = *map.domain();
  const int n = c.dimension();

  if (mode == VerifyMode::genpos) {
    if (map.ambient_dim() < 2 * n + 1)
      throw PreconditionError("verify_embedding: genpos mode needs ambient dimension >= 2n+1");
    GenPosOptions gp;
    gp.full = true;
    const auto report = is_general_position(map.images(), 2 * n + 1, rank_tolerance, gp);
    verdict.embedding = report.holds;
    verdict.witness_points = report.witness;
    verdict.detail = report.holds
                         ? "vertex images are in (2n+1)-general position"
                         : "affinely dependent vertex image subset";
    return verdict;
  }

  const auto& maximal = c.maximal_simplices();
  const int count = static_cast<int>(maximal.size());
  std::vector<Vector> lo(count), hi(count);
  for (int i = 0; i < count; ++i) {
    lo[i] = map.image(maximal[i][0]);
    hi[i] = lo[i];
    for (int v : maximal[i]) {
      lo[i] = lo[i].cwiseMin(map.image(v));
      hi[i] = hi[i].cwiseMax(map.image(v));
    }
  }

  for (int i = 0; i < count; ++i) {
    for (int j = i; j < count; ++j) {
      std::vector<std::pair<int, int>> shared;
      for (size_t a = 0; a < maximal[i].size(); ++a)
        for (size_t b = 0; b < maximal[j].size(); ++b)
          if (maximal[i][a] == maximal[j][b]) shared.emplace_back(a, b);
      if (shared.empty() && boxes_separated(lo[i], hi[i], lo[j], hi[j])) continue;

      std::vector<Vector> pa, pb;
      for (int v : maximal[i]) pa.push_back(map.image(v));
      for (int v : maximal[j]) pb.push_back(map.image(v));
      const auto check = exact::simplex_pair_check(pa, pb, shared);
      if (!check.ok) {
        verdict.embedding = false;
        verdict.witness_a = maximal[i];
        verdict.witness_b = maximal[j];
        verdict.detail = "image simplices " + simplex_to_string(maximal[i]) + " and " +
                         simplex_to_string(maximal[j]) + " overlap beyond their shared face";
        return verdict;
      }
    }
  }
  verdict.embedding = true;
  verdict.detail = "every image simplex pair meets exactly in its shared face";
  return verdict;
}

}  // namespace polyiso
