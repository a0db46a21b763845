#include "polyiso/pullback.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <string>

namespace polyiso {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> pad_weights(const BarycentricPoint& p, const Simplex& carrier) {
  std::vector<double> w(carrier.size(), 0.0);
  for (size_t i = 0; i < p.simplex.size(); ++i) {
    const auto it = std::lower_bound(carrier.begin(), carrier.end(), p.simplex[i]);
    w[it - carrier.begin()] = p.weights[i];
  }
  return w;
}

std::vector<double> dijkstra(const std::vector<std::vector<std::pair<int, double>>>& adj,
                             int source) {
  std::vector<double> dist(adj.size(), kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
  dist[source] = 0.0;
  queue.emplace(0.0, source);
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    for (const auto& [v, w] : adj[u]) {
      if (d + w < dist[v]) {
        dist[v] = d + w;
        queue.emplace(dist[v], v);
      }
    }
  }
  return dist;
}

void check_node(const SampleGraph& graph, int node) {
  if (node < 0 || node >= graph.node_count())
    throw PreconditionError("node index " + std::to_string(node) + " out of range");
}

void check_map_domain(const PLMap& map, const SampleGraph& graph) {
  if (map.domain() != graph.complex && !map.domain()->same_structure(*graph.complex))
    throw PreconditionError("map domain does not match the sample graph's complex");
}

// Admissible-step subgraph with image distances as weights.
std::vector<std::vector<std::pair<int, double>>> chain_adjacency(
    const SampleGraph& graph, const std::vector<Vector>& images, double chain_eps) {
  std::vector<std::vector<std::pair<int, double>>> adj(graph.nodes.size());
  for (int u = 0; u < graph.node_count(); ++u)
    for (const auto& [v, w] : graph.adjacency[u])
      if (w <= chain_eps + 1e-12) adj[u].emplace_back(v, (images[u] - images[v]).norm());
  return adj;
}

[[noreturn]] void too_coarse(const SampleGraph& graph, double chain_eps) {
  throw NumericalError(
      "no chain with steps <= " + std::to_string(chain_eps) +
      " connects the pair (graph mesh " + std::to_string(graph.mesh) +
      " at level " + std::to_string(graph.level) + "); use a finer subdivision level");
}

}  // namespace

SampleGraph sample_graph(const ComplexPtr& complex, int level) {
  if (level < 0) throw PreconditionError("sample_graph: level must be nonnegative");
  SampleGraph graph;
  graph.complex = complex;
  graph.level = level;
  const SubdivisionResult sub = subdivide(complex, level);
  graph.refined = sub.refined;
  graph.nodes = sub.correspondence.anchors;
  graph.adjacency.assign(graph.nodes.size(), {});

  std::map<std::pair<int, int>, double> edges;
  for (const auto& maximal : complex->maximal_simplices()) {
    std::vector<int> group;
    for (int i = 0; i < graph.node_count(); ++i) {
      const auto& support = graph.nodes[i].simplex;
      if (std::includes(maximal.begin(), maximal.end(), support.begin(), support.end()))
        group.push_back(i);
    }
    for (size_t a = 0; a < group.size(); ++a) {
      const auto wa = pad_weights(graph.nodes[group[a]], maximal);
      for (size_t b = a + 1; b < group.size(); ++b) {
        const auto wb = pad_weights(graph.nodes[group[b]], maximal);
        const double d =
            std::sqrt(std::max(0.0, squared_distance_in_simplex(*complex, maximal, wa, wb)));
        edges.insert({{group[a], group[b]}, d});
      }
    }
  }
  for (const auto& [pair, w] : edges) {
    graph.adjacency[pair.first].emplace_back(pair.second, w);
    graph.adjacency[pair.second].emplace_back(pair.first, w);
  }
  for (auto& list : graph.adjacency) std::sort(list.begin(), list.end());

  for (const auto& list : graph.adjacency) {
    if (list.empty()) continue;
    double nearest = kInf;
    for (const auto& [v, w] : list) nearest = std::min(nearest, w);
    graph.mesh = std::max(graph.mesh, nearest);
  }
  return graph;
}

std::optional<double> intrinsic_distance(const SampleGraph& graph, int a, int b) {
  check_node(graph, a);
  check_node(graph, b);
  const double d = dijkstra(graph.adjacency, a)[b];
  if (d == kInf) return std::nullopt;
  return d;
}

std::optional<double> pullback_estimate(const PLMap& map, const SampleGraph& graph,
                                        int a, int b, double chain_eps) {
  check_node(graph, a);
  check_node(graph, b);
  check_map_domain(map, graph);
  if (!(chain_eps > 0.0)) throw PreconditionError("chain_eps must be positive");

  std::vector<Vector> images;
  images.reserve(graph.nodes.size());
  for (const auto& node : graph.nodes) images.push_back(evaluate(map, node));

  const double d = dijkstra(chain_adjacency(graph, images, chain_eps), a)[b];
  if (d != kInf) return d;
  if (dijkstra(graph.adjacency, a)[b] == kInf) return std::nullopt;
  too_coarse(graph, chain_eps);
}

DefectReport isometry_defect(const PLMap& map, const SampleGraph& graph, double chain_eps,
                             const std::vector<std::pair<int, int>>& pairs) {
  check_map_domain(map, graph);
  if (!(chain_eps > 0.0)) throw PreconditionError("chain_eps must be positive");

  std::vector<std::pair<int, int>> wanted = pairs;
  if (wanted.empty())
    for (int a = 0; a < graph.node_count(); ++a)
      for (int b = a + 1; b < graph.node_count(); ++b) wanted.emplace_back(a, b);
  for (const auto& [a, b] : wanted) {
    check_node(graph, a);
    check_node(graph, b);
  }

  std::vector<Vector> images;
  images.reserve(graph.nodes.size());
  for (const auto& node : graph.nodes) images.push_back(evaluate(map, node));
  const auto chain_adj = chain_adjacency(graph, images, chain_eps);

  // Group queries by source so each source needs one sweep per metric.
  std::map<int, std::vector<size_t>> by_source;
  for (size_t i = 0; i < wanted.size(); ++i) by_source[wanted[i].first].push_back(i);

  DefectReport report;
  std::vector<std::optional<DefectRow>> rows(wanted.size());
  for (const auto& [source, query_ids] : by_source) {
    const auto dist_full = dijkstra(graph.adjacency, source);
    const auto dist_chain = dijkstra(chain_adj, source);
    for (size_t qi : query_ids) {
      const int target = wanted[qi].second;
      if (dist_full[target] == kInf) continue;  // disconnected pair, vacuous
      if (dist_chain[target] == kInf) too_coarse(graph, chain_eps);
      DefectRow row;
      row.a = source;
      row.b = target;
      row.intrinsic = dist_full[target];
      row.pullback = dist_chain[target];
      row.defect = row.intrinsic - row.pullback;
      rows[qi] = row;
    }
  }
  bool first = true;
  for (const auto& row : rows) {
    if (!row) continue;
    report.rows.push_back(*row);
    if (first || row->defect > report.max_defect) {
      report.max_defect = row->defect;
      report.argmax_a = row->a;
      report.argmax_b = row->b;
      first = false;
    }
  }
  if (first) report.max_defect = 0.0;
  return report;
}

}  // namespace polyiso
