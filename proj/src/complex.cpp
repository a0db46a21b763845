#include "polyiso/complex.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <deque>
#include <sstream>

namespace polyiso {

QuadraticForm::QuadraticForm(Matrix m) : entries(std::move(m)) {
  if (entries.rows() != entries.cols())
    throw PreconditionError("quadratic form must be square");
  if (!entries.allFinite())
    throw PreconditionError("quadratic form has non-finite entries");
  const double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
  for (int i = 0; i < entries.rows(); ++i)
    for (int j = i + 1; j < entries.cols(); ++j)
      if (std::abs(entries(i, j) - entries(j, i)) > 1e-12 * scale)
        throw PreconditionError("quadratic form is not symmetric");
}

double QuadraticForm::min_eigenvalue() const {
  if (entries.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(entries, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

QuadraticForm operator-(const QuadraticForm& a, const QuadraticForm& b) {
  if (a.dim() != b.dim()) throw PreconditionError("form dimension mismatch");
  return QuadraticForm(a.entries - b.entries);
}

QuadraticForm operator+(const QuadraticForm& a, const QuadraticForm& b) {
  if (a.dim() != b.dim()) throw PreconditionError("form dimension mismatch");
  return QuadraticForm(a.entries + b.entries);
}

BarycentricPoint::BarycentricPoint(Simplex s, std::vector<double> w)
    : simplex(std::move(s)), weights(std::move(w)) {
  if (simplex.size() != weights.size())
    throw PreconditionError("barycentric point: weight count != vertex count");
  double sum = 0.0;
  for (double x : weights) {
    if (!(x >= -1e-12))
      throw PreconditionError("barycentric point: negative weight");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw PreconditionError("barycentric point: weights do not sum to 1");
}

std::string simplex_to_string(const Simplex& s) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << ")";
  return os.str();
}

namespace {

std::string id_simplex_to_string(const SimplicialComplex& k, const Simplex& s) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << k.vertex_id(s[i]);
  os << ")";
  return os.str();
}

}  // namespace

std::shared_ptr<const SimplicialComplex> SimplicialComplex::build(
    std::vector<VertexId> vertex_ids,
    const std::vector<std::vector<VertexId>>& simplices,
    const std::map<std::pair<VertexId, VertexId>, double>& edge_lengths) {
  auto k = std::shared_ptr<SimplicialComplex>(new SimplicialComplex());
  std::sort(vertex_ids.begin(), vertex_ids.end());
  for (size_t i = 0; i + 1 < vertex_ids.size(); ++i)
    if (vertex_ids[i] == vertex_ids[i + 1])
      throw PreconditionError("duplicate vertex id: " + vertex_ids[i]);
  for (const auto& id : vertex_ids) {
    if (id.empty()) throw PreconditionError("empty vertex id");
    if (id.find('|') != std::string::npos)
      throw PreconditionError("vertex id contains reserved '|': " + id);
  }
  k->vertex_ids_ = std::move(vertex_ids);
  for (size_t i = 0; i < k->vertex_ids_.size(); ++i)
    k->index_of_[k->vertex_ids_[i]] = static_cast<int>(i);

  // Every vertex is a 0-simplex even if no tuple mentions it.
  for (int i = 0; i < k->vertex_count(); ++i) k->simplex_set_.insert(Simplex{i});

  for (const auto& tuple : simplices) {
    Simplex s;
    for (const auto& id : tuple) {
      auto it = k->index_of_.find(id);
      if (it == k->index_of_.end())
        throw PreconditionError("simplex references undeclared vertex: " + id);
      s.push_back(it->second);
    }
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
      throw PreconditionError("simplex repeats a vertex: " + id_simplex_to_string(*k, s));
    // Close under faces: insert every nonempty subset.
    const int n = static_cast<int>(s.size());
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
      Simplex face;
      for (int b = 0; b < n; ++b)
        if (mask & (1u << b)) face.push_back(s[b]);
      k->simplex_set_.insert(std::move(face));
    }
  }

  for (const auto& s : k->simplex_set_) {
    k->dim_ = std::max(k->dim_, static_cast<int>(s.size()) - 1);
    if (s.size() == 2) k->edges_.push_back(s);
  }

  for (const auto& [key, len] : edge_lengths) {
    auto ia = k->index_of_.find(key.first);
    auto ib = k->index_of_.find(key.second);
    if (ia == k->index_of_.end() || ib == k->index_of_.end())
      throw PreconditionError("edge length references undeclared vertex: " + key.first +
                              "|" + key.second);
    if (!(len > 0.0) || !std::isfinite(len))
      throw PreconditionError("edge length must be positive and finite: " + key.first +
                              "|" + key.second);
    int a = ia->second, b = ib->second;
    if (a == b) throw PreconditionError("edge length on a single vertex: " + key.first);
    if (a > b) std::swap(a, b);
    k->edge_len_[{a, b}] = len;
  }

  for (const auto& e : k->edges_)
    if (!k->edge_len_.count({e[0], e[1]}))
      throw PreconditionError("missing edge length for " + id_simplex_to_string(*k, e));

  std::set<Simplex> proper_faces;
  for (const auto& t : k->simplex_set_) {
    const int n = static_cast<int>(t.size());
    if (n == 1) continue;
    for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
      Simplex face;
      for (int b = 0; b < n; ++b)
        if (mask & (1u << b)) face.push_back(t[b]);
      proper_faces.insert(std::move(face));
    }
  }
  for (const auto& s : k->simplex_set_)
    if (!proper_faces.count(s)) k->maximal_.push_back(s);
  return k;
}

int SimplicialComplex::vertex_index(const VertexId& id) const {
  auto it = index_of_.find(id);
  if (it == index_of_.end()) throw PreconditionError("unknown vertex id: " + id);
  return it->second;
}

bool SimplicialComplex::has_vertex(const VertexId& id) const {
  return index_of_.count(id) > 0;
}

std::vector<Simplex> SimplicialComplex::simplices_of_dim(int d) const {
  std::vector<Simplex> out;
  for (const auto& s : simplex_set_)
    if (static_cast<int>(s.size()) == d + 1) out.push_back(s);
  return out;
}

double SimplicialComplex::edge_length(int a, int b) const {
  if (a > b) std::swap(a, b);
  auto it = edge_len_.find({a, b});
  if (it == edge_len_.end())
    throw PreconditionError("no such edge: " + simplex_to_string({a, b}));
  return it->second;
}

bool SimplicialComplex::same_structure(const SimplicialComplex& other) const {
  return vertex_ids_ == other.vertex_ids_ && simplex_set_ == other.simplex_set_ &&
         edge_len_ == other.edge_len_;
}

QuadraticForm gram_form(const SimplicialComplex& k, const Simplex& s) {
  if (!k.contains(s))
    throw PreconditionError("gram_form: simplex not in complex " + simplex_to_string(s));
  const int l = static_cast<int>(s.size()) - 1;
  Matrix g(l, l);
  for (int a = 1; a <= l; ++a) {
    const double d0a = k.edge_length(s[0], s[a]);
    for (int b = a; b <= l; ++b) {
      const double d0b = k.edge_length(s[0], s[b]);
      const double dab = (a == b) ? 0.0 : k.edge_length(s[a], s[b]);
      const double v = 0.5 * (d0a * d0a + d0b * d0b - dab * dab);
      g(a - 1, b - 1) = v;
      g(b - 1, a - 1) = v;
    }
  }
  return QuadraticForm(std::move(g));
}

double squared_distance_in_simplex(const SimplicialComplex& k, const Simplex& s,
                                   const std::vector<double>& wa,
                                   const std::vector<double>& wb) {
  const int l = static_cast<int>(s.size()) - 1;
  if (static_cast<int>(wa.size()) != l + 1 || static_cast<int>(wb.size()) != l + 1)
    throw PreconditionError("weight vector size mismatch");
  if (l == 0) return 0.0;
  const QuadraticForm g = gram_form(k, s);
  Vector d(l);
  for (int a = 1; a <= l; ++a) d(a - 1) = wa[a] - wb[a];
  return d.dot(g.entries * d);
}

ValidationReport validate_metric(const SimplicialComplex& k, double pd_tolerance) {
  ValidationReport report;
  report.tolerance = pd_tolerance;
  for (const auto& s : k.simplices()) {
    if (s.size() < 2) continue;
    const QuadraticForm g = gram_form(k, s);
    const double lo = g.min_eigenvalue();
    if (!(lo > pd_tolerance * g.trace())) {
      report.valid = false;
      report.offenders.push_back(s);
      report.offender_eigenvalues.push_back(lo);
    }
  }
  return report;
}

namespace {

// Face closure of all simplices meeting a vertex set.
std::set<Simplex> closed_star_of_vertices(const SimplicialComplex& k,
                                          const std::set<int>& base) {
  std::set<Simplex> out;
  for (const auto& s : k.simplices()) {
    bool meets = false;
    for (int v : s)
      if (base.count(v)) { meets = true; break; }
    if (!meets) continue;
    const int n = static_cast<int>(s.size());
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
      Simplex face;
      for (int b = 0; b < n; ++b)
        if (mask & (1u << b)) face.push_back(s[b]);
      out.insert(std::move(face));
    }
  }
  return out;
}

std::set<int> vertices_of(const std::set<Simplex>& simplices) {
  std::set<int> out;
  for (const auto& s : simplices) out.insert(s.begin(), s.end());
  return out;
}

std::set<Simplex> iterated_star_set(const SimplicialComplex& k, int v, int iterations) {
  std::set<int> base{v};
  std::set<Simplex> st;
  for (int i = 0; i < iterations; ++i) {
    st = closed_star_of_vertices(k, base);
    base = vertices_of(st);
  }
  return st;
}

}  // namespace

SubComplex star(const ComplexPtr& k, const VertexId& vertex, int iterations) {
  if (iterations < 1) throw PreconditionError("star: iteration count must be >= 1");
  const int v = k->vertex_index(vertex);
  SubComplex sub;
  sub.parent = k;
  sub.simplices = iterated_star_set(*k, v, iterations);
  return sub;
}

SubComplex shell(const ComplexPtr& k, const VertexId& vertex, int index) {
  if (index < 1) throw PreconditionError("shell: index must be >= 1");
  const int v = k->vertex_index(vertex);
  SubComplex sub;
  sub.parent = k;
  const std::set<Simplex> outer = iterated_star_set(*k, v, index);
  if (index == 1) {
    sub.simplices = outer;
    return sub;
  }
  const std::set<Simplex> inner = iterated_star_set(*k, v, index - 1);
  for (const auto& s : outer)
    if (!inner.count(s)) sub.simplices.insert(s);
  // Faces that belong to the inner star are not part of the shell's point set.
  for (const auto& s : sub.simplices) {
    const int n = static_cast<int>(s.size());
    for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
      Simplex face;
      for (int b = 0; b < n; ++b)
        if (mask & (1u << b)) face.push_back(s[b]);
      if (inner.count(face)) sub.excluded_faces.insert(std::move(face));
    }
  }
  return sub;
}

std::map<Simplex, int> shell_indices(const SimplicialComplex& k, const VertexId& vertex) {
  const int v = k.vertex_index(vertex);
  std::map<Simplex, int> idx;
  for (const auto& s : k.simplices()) idx[s] = INT_MAX;

  // Frontier search: a simplex joins at the round its closed star first meets
  // the grown vertex set, so only simplices incident to newly reached
  // vertices need a look at each round.
  std::vector<std::vector<const Simplex*>> incident(k.vertex_count());
  for (const auto& s : k.simplices())
    for (int w : s) incident[w].push_back(&s);

  std::vector<char> reached(k.vertex_count(), 0);
  std::vector<int> frontier{v};
  reached[v] = 1;
  for (int round = 1; !frontier.empty(); ++round) {
    std::vector<int> next;
    for (int w : frontier)
      for (const Simplex* sp : incident[w]) {
        if (idx.find(*sp)->second != INT_MAX) continue;
        const Simplex& s = *sp;
        const int n = static_cast<int>(s.size());
        for (unsigned mask = 1; mask < (1u << n); ++mask) {
          Simplex face;
          for (int b = 0; b < n; ++b)
            if (mask & (1u << b)) face.push_back(s[b]);
          auto it = idx.find(face);
          if (it->second != INT_MAX) continue;
          it->second = round;
          if (face.size() == 1 && !reached[face[0]]) {
            reached[face[0]] = 1;
            next.push_back(face[0]);
          }
        }
      }
    frontier = std::move(next);
  }
  return idx;
}

namespace {

VertexId fresh_id(const std::set<VertexId>& taken, long& counter) {
  for (;;) {
    VertexId candidate = "s" + std::to_string(counter++);
    if (!taken.count(candidate)) return candidate;
  }
}

SubdivisionResult identity_subdivision(const ComplexPtr& k) {
  SubdivisionResult out;
  out.refined = k;
  out.correspondence.parent = k;
  out.correspondence.refined = k;
  for (int i = 0; i < k->vertex_count(); ++i)
    out.correspondence.anchors.emplace_back(Simplex{i}, std::vector<double>{1.0});
  return out;
}

// Pads a barycentric point supported on a face up to weights over `target`.
std::vector<double> pad_weights(const BarycentricPoint& p, const Simplex& target) {
  std::vector<double> w(target.size(), 0.0);
  for (size_t i = 0; i < p.simplex.size(); ++i) {
    auto it = std::lower_bound(target.begin(), target.end(), p.simplex[i]);
    if (it == target.end() || *it != p.simplex[i])
      throw PreconditionError("barycentric point not supported on target simplex");
    w[static_cast<size_t>(it - target.begin())] = p.weights[i];
  }
  return w;
}

// Drops zero weights, producing the minimal supporting face.
BarycentricPoint reduce_support(const Simplex& s, const std::vector<double>& w) {
  Simplex face;
  std::vector<double> fw;
  for (size_t i = 0; i < s.size(); ++i)
    if (w[i] > 0.0) {
      face.push_back(s[i]);
      fw.push_back(w[i]);
    }
  if (face.empty()) throw PreconditionError("empty barycentric support");
  return BarycentricPoint(std::move(face), std::move(fw));
}

// One barycentric subdivision step with anchors into the given complex.
SubdivisionResult barycentric_once(const ComplexPtr& k) {
  std::set<VertexId> taken(k->vertex_ids().begin(), k->vertex_ids().end());
  long counter = 0;

  // One new vertex per simplex; 0-simplices keep their original id.
  std::map<Simplex, VertexId> bary_id;
  std::map<Simplex, BarycentricPoint> bary_anchor;
  std::vector<VertexId> new_ids;
  for (const auto& s : k->simplices()) {
    VertexId id;
    if (s.size() == 1) {
      id = k->vertex_id(s[0]);
    } else {
      id = fresh_id(taken, counter);
      taken.insert(id);
    }
    new_ids.push_back(id);
    bary_id[s] = id;
    bary_anchor.emplace(s, BarycentricPoint(
        s, std::vector<double>(s.size(), 1.0 / static_cast<double>(s.size()))));
  }

  // Maximal simplices of the subdivision: full ascending chains inside each
  // maximal simplex of the parent.
  std::vector<std::vector<VertexId>> chains;
  for (const auto& top : k->maximal_simplices()) {
    std::vector<std::vector<Simplex>> stack;
    const int n = static_cast<int>(top.size());
    // Enumerate chains by picking a permutation-insensitive nested sequence:
    // each chain corresponds to an ordering in which vertices of `top` join.
    std::vector<int> perm(top.begin(), top.end());
    std::sort(perm.begin(), perm.end());
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    do {
      std::vector<VertexId> chain;
      Simplex face;
      for (int i = 0; i < n; ++i) {
        face.push_back(perm[order[i]]);
        std::sort(face.begin(), face.end());
        chain.push_back(bary_id.at(face));
      }
      chains.push_back(std::move(chain));
    } while (std::next_permutation(order.begin(), order.end()));
  }

  // Edge lengths: the barycenters of a chain face pair both live in the larger
  // simplex; measure there.
  std::map<std::pair<VertexId, VertexId>, double> lengths;
  std::map<VertexId, Simplex> face_of;
  for (const auto& [s, id] : bary_id) face_of[id] = s;
  for (const auto& chain : chains) {
    for (size_t i = 0; i < chain.size(); ++i)
      for (size_t j = i + 1; j < chain.size(); ++j) {
        auto key = std::minmax(chain[i], chain[j]);
        if (lengths.count({key.first, key.second})) continue;
        const Simplex& big = face_of.at(chain[j]);  // later in chain contains earlier
        const auto wa = pad_weights(bary_anchor.at(face_of.at(chain[i])), big);
        const auto wb = pad_weights(bary_anchor.at(face_of.at(chain[j])), big);
        const double d2 = squared_distance_in_simplex(*k, big, wa, wb);
        lengths[{key.first, key.second}] = std::sqrt(d2);
      }
  }

  SubdivisionResult out;
  out.refined = SimplicialComplex::build(new_ids, chains, lengths);
  out.correspondence.parent = k;
  out.correspondence.refined = out.refined;
  out.correspondence.anchors.resize(out.refined->vertex_count(),
                                    BarycentricPoint(Simplex{0}, {1.0}));
  for (const auto& [s, id] : bary_id)
    out.correspondence.anchors[out.refined->vertex_index(id)] = bary_anchor.at(s);
  return out;
}

// Composes anchors of `inner` (refined2 -> refined1) with `outer`
// (refined1 -> parent), producing refined2 -> parent.
Correspondence compose(const Correspondence& outer, const Correspondence& inner) {
  Correspondence out;
  out.parent = outer.parent;
  out.refined = inner.refined;
  for (const auto& anchor : inner.anchors) {
    // All vertices of the intermediate simplex are anchored inside a common
    // parent simplex: take the union of their supports.
    Simplex carrier;
    for (int v : anchor.simplex) {
      const auto& a = outer.anchors.at(v);
      Simplex merged;
      std::set_union(carrier.begin(), carrier.end(), a.simplex.begin(), a.simplex.end(),
                     std::back_inserter(merged));
      carrier = std::move(merged);
    }
    if (!outer.parent->contains(carrier))
      throw PreconditionError("composed anchor escapes a parent simplex");
    std::vector<double> w(carrier.size(), 0.0);
    for (size_t i = 0; i < anchor.simplex.size(); ++i) {
      const auto padded = pad_weights(outer.anchors.at(anchor.simplex[i]), carrier);
      for (size_t j = 0; j < w.size(); ++j) w[j] += anchor.weights[i] * padded[j];
    }
    out.anchors.push_back(reduce_support(carrier, w));
  }
  return out;
}

}  // namespace

SubdivisionResult split_edges_at(const ComplexPtr& k,
                                 const std::map<Simplex, std::vector<double>>& cuts) {
  if (k->dimension() > 1)
    throw PreconditionError("split_edges_at requires a 1-dimensional complex");
  for (const auto& [e, params] : cuts) {
    if (!k->contains(e) || e.size() != 2)
      throw PreconditionError("split_edges_at: not an edge: " + simplex_to_string(e));
    double prev = 0.0;
    for (double t : params) {
      if (!(t > prev && t < 1.0))
        throw PreconditionError("split_edges_at: cut parameters must be sorted in (0,1)");
      prev = t;
    }
  }

  std::set<VertexId> taken(k->vertex_ids().begin(), k->vertex_ids().end());
  long counter = 0;
  std::vector<VertexId> ids = k->vertex_ids();
  std::vector<std::vector<VertexId>> simplices;
  std::map<std::pair<VertexId, VertexId>, double> lengths;
  std::vector<std::pair<VertexId, BarycentricPoint>> anchors;

  for (int i = 0; i < k->vertex_count(); ++i)
    anchors.emplace_back(k->vertex_id(i), BarycentricPoint(Simplex{i}, {1.0}));

  // Isolated vertices and edges; edges get chopped at their cut parameters.
  for (const auto& e : k->edges()) {
    const double len = k->edge_length(e[0], e[1]);
    std::vector<double> params{0.0};
    auto it = cuts.find(e);
    if (it != cuts.end())
      params.insert(params.end(), it->second.begin(), it->second.end());
    params.push_back(1.0);

    std::vector<VertexId> nodes;
    nodes.push_back(k->vertex_id(e[0]));
    for (size_t j = 1; j + 1 < params.size(); ++j) {
      VertexId id = fresh_id(taken, counter);
      taken.insert(id);
      ids.push_back(id);
      const double t = params[j];
      anchors.emplace_back(id, BarycentricPoint(e, {1.0 - t, t}));
      nodes.push_back(id);
    }
    nodes.push_back(k->vertex_id(e[1]));

    for (size_t j = 0; j + 1 < nodes.size(); ++j) {
      simplices.push_back({nodes[j], nodes[j + 1]});
      auto key = std::minmax(nodes[j], nodes[j + 1]);
      lengths[{key.first, key.second}] = len * (params[j + 1] - params[j]);
    }
  }

  SubdivisionResult out;
  out.refined = SimplicialComplex::build(ids, simplices, lengths);
  out.correspondence.parent = k;
  out.correspondence.refined = out.refined;
  out.correspondence.anchors.resize(out.refined->vertex_count(),
                                    BarycentricPoint(Simplex{0}, {1.0}));
  for (const auto& [id, anchor] : anchors)
    out.correspondence.anchors[out.refined->vertex_index(id)] = anchor;
  return out;
}

SubdivisionResult subdivide(const ComplexPtr& k, int level) {
  if (level < 0) throw PreconditionError("subdivide: level must be >= 0");
  if (level == 0) return identity_subdivision(k);

  if (k->dimension() <= 1) {
    const int pieces = 1 << level;
    std::map<Simplex, std::vector<double>> cuts;
    for (const auto& e : k->edges()) {
      std::vector<double> params;
      for (int j = 1; j < pieces; ++j)
        params.push_back(static_cast<double>(j) / static_cast<double>(pieces));
      cuts[e] = std::move(params);
    }
    return split_edges_at(k, cuts);
  }

  SubdivisionResult acc = barycentric_once(k);
  for (int i = 1; i < level; ++i) {
    SubdivisionResult next = barycentric_once(acc.refined);
    acc.correspondence = compose(acc.correspondence, next.correspondence);
    acc.refined = next.refined;
  }
  return acc;
}

}  // namespace polyiso
