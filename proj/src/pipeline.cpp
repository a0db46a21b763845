#include "polyiso/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "polyiso/genpos.hpp"
#include "polyiso/pullback.hpp"
#include "polyiso/rng.hpp"

namespace polyiso {

namespace {

constexpr int kGridPerEdge = 16;

void validate_schedule(const std::vector<double>& schedule) {
  if (schedule.empty()) throw PreconditionError("eps schedule must not be empty");
  for (double e : schedule)
    if (!(e > 0.0) || !std::isfinite(e))
      throw PreconditionError("eps schedule entries must be positive and finite");
}

double eps_at(const std::vector<double>& schedule, int level) {
  if (level < 1) return schedule.front();
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(level), schedule.size());
  return schedule[i - 1];
}

std::vector<int> components(const SimplicialComplex& k) {
  std::vector<int> parent(k.vertex_count());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  for (const auto& e : k.edges()) {
    const int a = find(e[0]), b = find(e[1]);
    if (a != b) parent[a] = b;
  }
  std::vector<int> out(parent.size());
  for (std::size_t v = 0; v < parent.size(); ++v) out[v] = find(static_cast<int>(v));
  return out;
}

// Fixed evaluation grid on the original complex: every vertex plus evenly
// spaced interior points per edge, each tagged with its shell level, path
// component, and the first edge whose closure contains it.
struct Grid {
  std::vector<BarycentricPoint> nodes;
  std::vector<int> level;
  std::vector<int> comp;
  std::vector<int> first_edge;

  int size() const { return static_cast<int>(nodes.size()); }
};

Grid build_grid(const ComplexPtr& k, const VertexId& base) {
  Grid g;
  const auto shells = shell_indices(*k, base);
  const auto comp = components(*k);
  const auto& edges = k->edges();
  auto shell_of = [&](const Simplex& s) {
    auto it = shells.find(s);
    return it == shells.end() ? std::numeric_limits<int>::max() : it->second;
  };
  std::vector<int> vertex_first_edge(k->vertex_count(), std::numeric_limits<int>::max());
  for (int e = 0; e < static_cast<int>(edges.size()); ++e)
    for (int v : edges[e])
      vertex_first_edge[v] = std::min(vertex_first_edge[v], e);
  for (int v = 0; v < k->vertex_count(); ++v) {
    g.nodes.emplace_back(Simplex{v}, std::vector<double>{1.0});
    g.level.push_back(shell_of({v}));
    g.comp.push_back(comp[v]);
    g.first_edge.push_back(vertex_first_edge[v]);
  }
  for (int e = 0; e < static_cast<int>(edges.size()); ++e)
    for (int j = 1; j < kGridPerEdge; ++j) {
      const double t = static_cast<double>(j) / kGridPerEdge;
      g.nodes.emplace_back(edges[e], std::vector<double>{1.0 - t, t});
      g.level.push_back(shell_of(edges[e]));
      g.comp.push_back(comp[edges[e][0]]);
      g.first_edge.push_back(e);
    }
  return g;
}

// A map on some refinement of the original complex, with every refined
// vertex anchored back in the original.
struct Stage {
  PLMap map;
  std::vector<BarycentricPoint> anchors;
};

double anchor_param(const BarycentricPoint& a, const Simplex& e) {
  if (a.simplex.size() == 2) {
    if (a.simplex != e) throw PreconditionError("anchor lies on an unexpected edge");
    return a.weights[1];
  }
  if (a.simplex[0] == e[0]) return 0.0;
  if (a.simplex[0] == e[1]) return 1.0;
  throw PreconditionError("anchor vertex is not an endpoint of its edge");
}

// Composes anchors of a fresh split (refined2 -> refined1) through an
// existing stage (refined1 -> original).
std::vector<BarycentricPoint> compose_anchors(const Stage& prev, const Correspondence& corr) {
  std::vector<BarycentricPoint> out;
  out.reserve(corr.anchors.size());
  for (const auto& a : corr.anchors) {
    if (a.simplex.size() == 1) {
      out.push_back(prev.anchors.at(a.simplex[0]));
      continue;
    }
    const auto& au = prev.anchors.at(a.simplex[0]);
    const auto& av = prev.anchors.at(a.simplex[1]);
    if (au.simplex.size() == 2 && av.simplex.size() == 2 && au.simplex != av.simplex)
      throw PreconditionError("refined edge spans two parent edges");
    Simplex e;
    if (au.simplex.size() == 2) {
      e = au.simplex;
    } else if (av.simplex.size() == 2) {
      e = av.simplex;
    } else {
      e = {au.simplex[0], av.simplex[0]};
      std::sort(e.begin(), e.end());
    }
    const double tu = anchor_param(au, e);
    const double tv = anchor_param(av, e);
    const double x = tu + a.weights[1] * (tv - tu);
    if (x <= 0.0)
      out.emplace_back(Simplex{e[0]}, std::vector<double>{1.0});
    else if (x >= 1.0)
      out.emplace_back(Simplex{e[1]}, std::vector<double>{1.0});
    else
      out.emplace_back(e, std::vector<double>{1.0 - x, x});
  }
  return out;
}

// Piecewise-linear breakpoint tables per original edge, for evaluating a
// stage at arbitrary points of the original complex.
struct StageTables {
  std::vector<Vector> vertex_img;
  std::map<Simplex, std::vector<std::pair<double, Vector>>> edge_img;
};

StageTables build_tables(const ComplexPtr& original, const Stage& s) {
  StageTables t;
  t.vertex_img.assign(original->vertex_count(), Vector());
  for (int v = 0; v < s.map.domain()->vertex_count(); ++v) {
    const auto& a = s.anchors[v];
    if (a.simplex.size() == 1)
      t.vertex_img[a.simplex[0]] = s.map.image(v);
    else
      t.edge_img[a.simplex].emplace_back(a.weights[1], s.map.image(v));
  }
  for (const auto& e : original->edges()) {
    auto& tab = t.edge_img[e];
    tab.emplace_back(0.0, t.vertex_img[e[0]]);
    tab.emplace_back(1.0, t.vertex_img[e[1]]);
    std::sort(tab.begin(), tab.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  return t;
}

Vector eval_node(const StageTables& t, const BarycentricPoint& p) {
  if (p.simplex.size() == 1) return t.vertex_img[p.simplex[0]];
  const auto& tab = t.edge_img.at(p.simplex);
  const double x = p.weights[1];
  std::size_t hi = 1;
  while (hi + 1 < tab.size() && tab[hi].first < x) ++hi;
  const auto& lo = tab[hi - 1];
  const double span = tab[hi].first - lo.first;
  const double u = span > 0.0 ? (x - lo.first) / span : 0.0;
  return lo.second + u * (tab[hi].second - lo.second);
}

std::vector<Vector> eval_grid(const StageTables& t, const Grid& g) {
  std::vector<Vector> out;
  out.reserve(g.nodes.size());
  for (const auto& p : g.nodes) out.push_back(eval_node(t, p));
  return out;
}

// Nudges vertices of a strictly short embedding candidate until the exact
// overlap check passes, spending at most `budget` of displacement per vertex.
PLMap repair_embedding(PLMap f, double budget, Rng& rng) {
  const ComplexPtr& k = f.domain();
  std::vector<std::vector<std::pair<int, double>>> inc(k->vertex_count());
  for (const auto& e : k->edges()) {
    const double len = k->edge_length(e[0], e[1]);
    inc[e[0]].emplace_back(e[1], len);
    inc[e[1]].emplace_back(e[0], len);
  }
  const std::vector<Vector> base = f.images();
  for (int round = 0; round < 64; ++round) {
    const auto verdict = verify_embedding(f, VerifyMode::exact);
    if (verdict.embedding) return f;
    int target = -1;
    for (int v : verdict.witness_a) target = std::max(target, v);
    for (int v : verdict.witness_b) target = std::max(target, v);
    if (target < 0) throw NumericalError("embedding repair: verdict carries no witness");
    bool moved = false;
    for (int h = 0; h < 12 && !moved; ++h) {
      const double r = budget / std::ldexp(1.0, h + 2);
      for (int d = 0; d < 16 && !moved; ++d) {
        const Vector cand = f.image(target) + rng.in_ball(f.ambient_dim(), r);
        if ((cand - base[target]).norm() > budget) continue;
        bool ok = true;
        for (const auto& [nbr, len] : inc[target])
          if ((cand - f.image(nbr)).squaredNorm() >= len * len) {
            ok = false;
            break;
          }
        if (ok) {
          f = f.with_image(target, cand);
          moved = true;
        }
      }
    }
    if (!moved)
      throw NumericalError("embedding repair: no admissible nudge for vertex " +
                           k->vertex_id(target));
  }
  throw NumericalError("embedding repair: overlaps persist after 64 rounds");
}

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

SplitEmbedResult split_embed_pipeline(const PLMap& map, const std::vector<double>& eps_schedule,
                                      const VertexId& base_vertex, std::uint64_t seed) {
  const ComplexPtr& k = map.domain();
  if (k->dimension() != 1)
    throw PreconditionError("split_embed_pipeline: domain must be a graph");
  const int n_amb = map.ambient_dim();
  if (n_amb < 3)
    throw PreconditionError("split_embed_pipeline: ambient dimension must be at least 3");
  validate_schedule(eps_schedule);
  if (!shortness_margin(map).short_map)
    throw PreconditionError("split_embed_pipeline: map must be short");

  PLMap perturbed = perturb_prefix_general_position(map, eps_schedule, base_vertex, seed);

  // Far-pair separation of the perturbed map, certified on a sample grid.
  // delta is half the smallest open-star inradius (half the shortest edge);
  // points farther apart than delta never share a closed star, so their
  // images must stay apart for the folded map to remain injective.  The map
  // is 1-Lipschitz, which turns the grid minimum into a bound for all pairs
  // after subtracting the mesh.
  double min_edge = std::numeric_limits<double>::infinity();
  for (const auto& e : k->edges()) min_edge = std::min(min_edge, k->edge_length(e[0], e[1]));
  if (!std::isfinite(min_edge))
    throw PreconditionError("split_embed_pipeline: complex has no edges");
  const double delta = 0.5 * min_edge;

  const SampleGraph graph = sample_graph(k, 4);
  std::vector<Vector> fval;
  fval.reserve(graph.node_count());
  for (const auto& p : graph.nodes) fval.push_back(evaluate(perturbed, p));
  double separation = std::numeric_limits<double>::infinity();
  for (int a = 0; a < graph.node_count(); ++a)
    for (int b = a + 1; b < graph.node_count(); ++b) {
      const auto d = intrinsic_distance(graph, a, b);
      if (d && *d < delta - graph.mesh) continue;
      separation = std::min(separation, (fval[a] - fval[b]).norm() - graph.mesh);
    }
  if (!(separation > 0.0))
    throw NumericalError("split_embed_pipeline: sample grid too coarse to certify separation");

  const auto shells = shell_indices(*k, base_vertex);
  auto shell_of = [&](const Simplex& s) {
    auto it = shells.find(s);
    return it == shells.end() ? std::numeric_limits<int>::max() : it->second;
  };

  FoldPlan plan;
  std::map<Simplex, std::vector<double>> cuts;
  std::map<Simplex, std::size_t> plan_index;
  for (const auto& e : k->edges()) {
    const double len = k->edge_length(e[0], e[1]);
    const Vector da = perturbed.image(e[1]) - perturbed.image(e[0]);
    const double l1 = da.head(2).norm();
    const double l2 = da.tail(n_amb - 2).norm();
    const double target = std::sqrt(std::max(0.0, len * len - l1 * l1));

    EdgeFold fold;
    fold.edge = e;
    fold.target_length = target;
    fold.straight_length = l2;
    if (target <= 1e-12 * len || l2 >= target * (1.0 - 1e-12)) {
      fold.pieces = 1;
      fold.transverse = Vector::Zero(n_amb);
      fold.offsets = {0.0, 0.0};
      plan_index[e] = plan.edges.size();
      plan.edges.push_back(std::move(fold));
      continue;
    }

    const int level = shell_of(e);
    const int next = level == std::numeric_limits<int>::max() ? level : level + 1;
    const double amp =
        std::min(0.5 * std::min(eps_at(eps_schedule, level), eps_at(eps_schedule, next)),
                 separation / 3.0);

    // Sawtooth along the residual direction: teeth of up-width wu and
    // down-width wd at slope +-target keep every piece at speed len exactly,
    // and the peak deviation (target^2 - l2^2) / (2 target T) under amp.
    const double dev_total = (target * target - l2 * l2) / (2.0 * target);
    const double teeth_raw = std::ceil(dev_total / amp);
    if (!(teeth_raw < 5e7))
      throw NumericalError("split_embed_pipeline: fold would need " +
                           format_double(teeth_raw) + " teeth on edge " +
                           k->vertex_id(e[0]) + "|" + k->vertex_id(e[1]));
    const int teeth = std::max(1, static_cast<int>(teeth_raw));
    const double wu = (target + l2) / (2.0 * target * teeth);
    const double dev = dev_total / teeth;

    Vector u = Vector::Zero(n_amb);
    if (l2 > 0.0)
      u.tail(n_amb - 2) = da.tail(n_amb - 2) / l2;
    else
      u[2] = 1.0;

    std::vector<double>& edge_cuts = cuts[e];
    fold.pieces = 2 * teeth;
    fold.transverse = u;
    fold.offsets.assign(2 * teeth + 1, 0.0);
    for (int j = 0; j < teeth; ++j) {
      const double t0 = static_cast<double>(j) / teeth;
      if (j > 0) edge_cuts.push_back(t0);
      edge_cuts.push_back(t0 + wu);
      fold.offsets[2 * j + 1] = dev;
    }
    plan_index[e] = plan.edges.size();
    plan.edges.push_back(std::move(fold));
  }

  SubdivisionResult split = split_edges_at(k, cuts);
  std::vector<Vector> images(split.refined->vertex_count());
  for (int v = 0; v < split.refined->vertex_count(); ++v) {
    const auto& a = split.correspondence.anchors[v];
    if (a.simplex.size() == 1) {
      images[v] = perturbed.image(a.simplex[0]);
      continue;
    }
    const Simplex& e = a.simplex;
    const double t = a.weights[1];
    const EdgeFold& fold = plan.edges[plan_index.at(e)];
    Vector img = perturbed.image(e[0]) + t * (perturbed.image(e[1]) - perturbed.image(e[0]));
    // Interior split vertices sit exactly at the cut parameters; recover the
    // breakpoint index to apply its transverse offset.
    const std::vector<double>& edge_cuts = cuts.at(e);
    const auto it = std::lower_bound(edge_cuts.begin(), edge_cuts.end(), t - 1e-12);
    if (it == edge_cuts.end() || std::abs(*it - t) > 1e-12)
      throw NumericalError("split_embed_pipeline: split vertex missed its cut parameter");
    const std::size_t idx = static_cast<std::size_t>(it - edge_cuts.begin()) + 1;
    img += fold.offsets.at(idx) * fold.transverse;
    images[v] = std::move(img);
  }

  PLMap folded(split.refined, n_amb, std::move(images));
  return SplitEmbedResult{std::move(folded), std::move(split.correspondence), std::move(plan),
                          std::move(perturbed), separation, delta};
}

IterateResult iterate_nash(const PLMap& map, const std::vector<double>& eps_schedule,
                           const VertexId& base_vertex, int iterations, std::uint64_t seed) {
  const ComplexPtr& k = map.domain();
  if (k->dimension() != 1) throw PreconditionError("iterate_nash: domain must be a graph");
  const int n_amb = map.ambient_dim();
  if (n_amb < 3) throw PreconditionError("iterate_nash: ambient dimension must be at least 3");
  validate_schedule(eps_schedule);
  if (iterations < 0) throw PreconditionError("iterate_nash: iteration count must be >= 0");
  if (!shortness_margin(map).strictly_short)
    throw PreconditionError("iterate_nash: map must be strictly short");
  {
    const auto verdict = verify_embedding(map, VerifyMode::exact);
    if (!verdict.embedding)
      throw PreconditionError("iterate_nash: map must be an embedding: " + verdict.detail);
  }

  Correspondence identity;
  identity.parent = k;
  identity.refined = k;
  for (int v = 0; v < k->vertex_count(); ++v)
    identity.anchors.emplace_back(Simplex{v}, std::vector<double>{1.0});

  ConvergenceReport report;
  report.shell_budget = eps_schedule;
  if (iterations == 0) return IterateResult{map, std::move(identity), std::move(report)};

  const int shell_count = static_cast<int>(eps_schedule.size());
  const Grid grid = build_grid(k, base_vertex);
  const int gn = grid.size();
  const auto& edges = k->edges();
  const int edge_count = static_cast<int>(edges.size());

  double total_length = 0.0;
  for (const auto& e : edges) total_length += k->edge_length(e[0], e[1]);
  const double defect_tol = 1e-9 * std::max(1.0, total_length);
  const double eps_min = *std::min_element(eps_schedule.begin(), eps_schedule.end());

  std::vector<Vector> f1_eval(gn);
  for (int g = 0; g < gn; ++g) f1_eval[g] = evaluate(map, grid.nodes[g]);

  auto note = [&report](const std::string& text) {
    report.violations.push_back(text);
    report.ledger_ok = false;
  };

  Rng root(seed);
  Stage cur{map, identity.anchors};
  std::vector<Vector> prev_eval = f1_eval;
  std::vector<std::vector<std::pair<int, int>>> sets;
  std::vector<double> mu_of;
  double mu_floor = std::numeric_limits<double>::infinity();
  double alpha_prev = 0.0;

  auto min_gap_over = [](const std::vector<std::pair<int, int>>& pairs,
                         const std::vector<Vector>& vals) {
    double gap = std::numeric_limits<double>::infinity();
    for (const auto& [a, b] : pairs) gap = std::min(gap, (vals[a] - vals[b]).norm());
    return gap;
  };

  std::optional<Stage> final_stage;
  std::vector<Vector> final_eval;

  for (int i = 1; i <= iterations; ++i) {
    Rng iter_rng = root.split(static_cast<std::uint64_t>(i));
    const double p4 = std::ldexp(1.0, 2 * i);  // 4^i

    const StageTables ft = build_tables(k, cur);
    const std::vector<Vector> f_eval = eval_grid(ft, grid);

    // Persistence of previously formed sets under f_i.
    for (std::size_t j = 0; j < sets.size(); ++j) {
      if (sets[j].empty()) continue;
      const double gap = min_gap_over(sets[j], f_eval);
      if (!(gap > 0.5 * mu_of[j]))
        note("iteration " + std::to_string(i) + ": f gap over S_" + std::to_string(j + 1) +
             " fell to " + format_double(gap));
    }

    // S_i: grid pairs on the first i edges whose initial images are at least
    // 2^-i apart, excluding cross-component pairs.
    std::vector<std::pair<int, int>> separated;
    const double threshold = std::ldexp(1.0, -i);
    const int upto = std::min(i, edge_count);
    for (int a = 0; a < gn; ++a) {
      if (grid.first_edge[a] >= upto) continue;
      for (int b = a + 1; b < gn; ++b) {
        if (grid.first_edge[b] >= upto) continue;
        if (grid.comp[a] != grid.comp[b]) continue;
        if ((f1_eval[a] - f1_eval[b]).norm() < threshold) continue;
        separated.emplace_back(a, b);
      }
    }
    const double mu_i =
        separated.empty() ? 0.0 : min_gap_over(separated, f_eval);

    double beta_cap = eps_min / p4;
    if (std::isfinite(mu_floor)) beta_cap = std::min(beta_cap, mu_floor / p4);
    if (!separated.empty()) beta_cap = std::min(beta_cap, mu_i / 4.0);
    const double beta_u = 0.5 * beta_cap;

    sets.push_back(std::move(separated));
    mu_of.push_back(mu_i);
    if (!sets.back().empty()) mu_floor = std::min(mu_floor, mu_i);

    IsometrizeResult iso =
        isometrize_graph(cur.map, {beta_u}, base_vertex, FoldOptions{false});
    Stage hstage{std::move(iso.map), compose_anchors(cur, iso.correspondence)};

    const StageTables ht = build_tables(k, hstage);
    const std::vector<Vector> h_eval = eval_grid(ht, grid);

    // Isometry defect of h_i over the original vertices, measured on the
    // refined vertex graph with every edge admissible.
    const SampleGraph hg = sample_graph(hstage.map.domain(), 0);
    double max_weight = 0.0;
    for (const auto& adj : hg.adjacency)
      for (const auto& [nbr, w] : adj) max_weight = std::max(max_weight, w);
    std::vector<std::pair<int, int>> vertex_pairs;
    for (int a = 0; a < k->vertex_count(); ++a)
      for (int b = a + 1; b < k->vertex_count(); ++b)
        vertex_pairs.emplace_back(hstage.map.domain()->vertex_index(k->vertex_id(a)),
                                  hstage.map.domain()->vertex_index(k->vertex_id(b)));
    const DefectReport defect = isometry_defect(hstage.map, hg, max_weight, vertex_pairs);
    double defect_abs = 0.0;
    for (const auto& row : defect.rows) defect_abs = std::max(defect_abs, std::abs(row.defect));

    IterationRow row;
    row.iter = i;
    row.alpha = alpha_prev;
    row.alpha_schedule.assign(shell_count, alpha_prev);
    row.beta = beta_u;
    row.beta_schedule.assign(shell_count, beta_u);
    row.mu = mu_i;
    row.defect = defect_abs;
    row.sup_delta = 0.0;
    for (int g = 0; g < gn; ++g)
      row.sup_delta = std::max(row.sup_delta, (h_eval[g] - prev_eval[g]).norm());
    row.min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < sets.size(); ++j) {
      if (sets[j].empty()) {
        row.gap_by_set.push_back(0.0);
        continue;
      }
      const double gap = min_gap_over(sets[j], h_eval);
      row.gap_by_set.push_back(gap);
      row.min_gap = std::min(row.min_gap, gap);
      if (!(gap > 0.5 * mu_of[j]))
        note("iteration " + std::to_string(i) + ": h gap over S_" + std::to_string(j + 1) +
             " fell to " + format_double(gap));
    }
    if (!std::isfinite(row.min_gap)) row.min_gap = 0.0;

    for (int s = 1; s <= shell_count; ++s) {
      const double bound = eps_at(eps_schedule, s) / p4;
      if (!(beta_u < bound))
        note("iteration " + std::to_string(i) + ": beta " + format_double(beta_u) +
             " breaks the shell-" + std::to_string(s) + " budget " + format_double(bound));
      if (i > 1 && !(alpha_prev < bound))
        note("iteration " + std::to_string(i) + ": alpha " + format_double(alpha_prev) +
             " breaks the shell-" + std::to_string(s) + " budget " + format_double(bound));
    }
    if (!(row.sup_delta <= alpha_prev + beta_u + 1e-12))
      note("iteration " + std::to_string(i) + ": sup delta " + format_double(row.sup_delta) +
           " exceeds alpha + beta = " + format_double(alpha_prev + beta_u));
    if (!(defect_abs <= defect_tol))
      note("iteration " + std::to_string(i) + ": isometry defect " + format_double(defect_abs) +
           " exceeds " + format_double(defect_tol));

    if (i < iterations) {
      const double p4n = std::ldexp(1.0, 2 * (i + 1));
      double alpha_cap = eps_min / p4n;
      if (std::isfinite(mu_floor)) alpha_cap = std::min(alpha_cap, mu_floor / p4n);
      const double alpha_u = 0.5 * alpha_cap;

      const ComplexPtr& hk = hstage.map.domain();
      const auto comp = components(*hk);
      std::map<int, std::pair<Vector, int>> acc;
      for (int v = 0; v < hk->vertex_count(); ++v) {
        auto it = acc.find(comp[v]);
        if (it == acc.end())
          acc.emplace(comp[v], std::make_pair(hstage.map.image(v), 1));
        else {
          it->second.first += hstage.map.image(v);
          it->second.second += 1;
        }
      }
      std::map<int, Vector> center;
      for (const auto& [c, sum] : acc)
        center[c] = sum.first / static_cast<double>(sum.second);
      double radius = 0.0;
      for (int v = 0; v < hk->vertex_count(); ++v)
        radius = std::max(radius, (hstage.map.image(v) - center[comp[v]]).norm());

      const double shrink =
          std::min(std::ldexp(1.0, -2 * (i + 1)),
                   radius > 0.0 ? alpha_u / (2.0 * radius) : 1.0);
      row.lambda = 1.0 - shrink;
      std::vector<Vector> contracted(hk->vertex_count());
      for (int v = 0; v < hk->vertex_count(); ++v) {
        const Vector& c = center[comp[v]];
        contracted[v] = c + row.lambda * (hstage.map.image(v) - c);
      }
      PLMap f_next = repair_embedding(PLMap(hk, n_amb, std::move(contracted)),
                                      0.5 * alpha_u, iter_rng);
      double moved = 0.0;
      for (int v = 0; v < hk->vertex_count(); ++v)
        moved = std::max(moved, (f_next.image(v) - hstage.map.image(v)).norm());
      if (!(moved <= alpha_u + 1e-12))
        note("iteration " + std::to_string(i + 1) + ": re-embedding moved " +
             format_double(moved) + " against budget " + format_double(alpha_u));
      cur = Stage{std::move(f_next), hstage.anchors};
      alpha_prev = alpha_u;
    }

    report.rows.push_back(std::move(row));
    prev_eval = h_eval;
    if (i == iterations) {
      final_stage = std::move(hstage);
      final_eval = h_eval;
    }
  }

  report.shell_accuracy.assign(shell_count, 0.0);
  for (int g = 0; g < gn; ++g) {
    const int level = std::max(1, std::min(grid.level[g], shell_count));
    report.shell_accuracy[level - 1] = std::max(
        report.shell_accuracy[level - 1], (final_eval[g] - f1_eval[g]).norm());
  }
  for (int s = 1; s <= shell_count; ++s)
    if (!(report.shell_accuracy[s - 1] < eps_schedule[s - 1]))
      note("shell " + std::to_string(s) + " accuracy " +
           format_double(report.shell_accuracy[s - 1]) + " reached the budget " +
           format_double(eps_schedule[s - 1]));

  Correspondence corr;
  corr.parent = k;
  corr.refined = final_stage->map.domain();
  corr.anchors = final_stage->anchors;
  return IterateResult{std::move(final_stage->map), std::move(corr), std::move(report)};
}

}  // namespace polyiso
