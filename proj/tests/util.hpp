#pragma once

#include <cmath>
#include <initializer_list>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "polyiso/complex.hpp"
#include "polyiso/plmap.hpp"

namespace testutil {

using namespace polyiso;

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline ComplexPtr segment(double length = 1.0) {
  return SimplicialComplex::build({"a", "b"}, {{"a", "b"}}, {{{"a", "b"}, length}});
}

// a-b-c path with lengths 1 and 2.
inline ComplexPtr path3() {
  return SimplicialComplex::build({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}},
                                  {{{"a", "b"}, 1.0}, {{"b", "c"}, 2.0}});
}

inline ComplexPtr path4() {
  return SimplicialComplex::build(
      {"a", "b", "c", "d"}, {{"a", "b"}, {"b", "c"}, {"c", "d"}},
      {{{"a", "b"}, 1.0}, {{"b", "c"}, 1.0}, {{"c", "d"}, 1.0}});
}

inline ComplexPtr right_triangle() {
  return SimplicialComplex::build(
      {"a", "b", "c"}, {{"a", "b", "c"}},
      {{{"a", "b"}, 3.0}, {{"a", "c"}, 4.0}, {{"b", "c"}, 5.0}});
}

inline ComplexPtr equilateral(double side = 1.0) {
  return SimplicialComplex::build(
      {"a", "b", "c"}, {{"a", "b", "c"}},
      {{{"a", "b"}, side}, {{"a", "c"}, side}, {{"b", "c"}, side}});
}

inline ComplexPtr regular_tetrahedron(double side = 1.0) {
  std::map<std::pair<VertexId, VertexId>, double> lengths;
  const std::vector<VertexId> ids{"a", "b", "c", "d"};
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = i + 1; j < 4; ++j) lengths[{ids[i], ids[j]}] = side;
  return SimplicialComplex::build(ids, {{"a", "b", "c", "d"}}, lengths);
}

// Cycle of four unit edges.
inline ComplexPtr square_circle() {
  return SimplicialComplex::build(
      {"a", "b", "c", "d"}, {{"a", "b"}, {"b", "c"}, {"c", "d"}, {"d", "a"}},
      {{{"a", "b"}, 1.0},
       {{"b", "c"}, 1.0},
       {{"c", "d"}, 1.0},
       {{"d", "a"}, 1.0}});
}

// The unit square traced by the circle above, scaled by lambda and padded
// with zeros up to the ambient dimension.  Strictly short for lambda < 1.
inline PLMap contracted_square(double lambda, int ambient) {
  ComplexPtr k = square_circle();
  const std::map<VertexId, std::pair<double, double>> corner{
      {"a", {0.0, 0.0}}, {"b", {1.0, 0.0}}, {"c", {1.0, 1.0}}, {"d", {0.0, 1.0}}};
  std::vector<Vector> images(4, Vector::Zero(ambient));
  for (const auto& [id, xy] : corner) {
    images[k->vertex_index(id)][0] = lambda * xy.first;
    images[k->vertex_index(id)][1] = lambda * xy.second;
  }
  return PLMap(k, ambient, images);
}

// Triangle fan: hub h surrounded by ring vertices r0..r{n-1} on a jittered
// circle, with edge lengths read off the planar layout (hence realizable and
// the layout itself isometric).
struct Fan {
  ComplexPtr complex;
  std::map<VertexId, std::pair<double, double>> plane;
};

inline Fan fan_complex(int ring, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Fan fan;
  fan.plane["h"] = {0.0, 0.0};
  std::vector<VertexId> ids{"h"};
  for (int i = 0; i < ring; ++i) {
    const double angle = 2.0 * M_PI * (i + 0.1 * unit(rng)) / ring;
    const double radius = 1.0 + 0.1 * unit(rng);
    const VertexId id = "r" + std::to_string(i);
    ids.push_back(id);
    fan.plane[id] = {radius * std::cos(angle), radius * std::sin(angle)};
  }
  std::vector<std::vector<VertexId>> triangles;
  std::map<std::pair<VertexId, VertexId>, double> lengths;
  auto dist = [&](const VertexId& a, const VertexId& b) {
    const auto& pa = fan.plane[a];
    const auto& pb = fan.plane[b];
    return std::hypot(pa.first - pb.first, pa.second - pb.second);
  };
  for (int i = 0; i < ring; ++i) {
    const VertexId a = "r" + std::to_string(i);
    const VertexId b = "r" + std::to_string((i + 1) % ring);
    triangles.push_back({"h", a, b});
    lengths[{std::min(a, b), std::max(a, b)}] = dist(a, b);
    lengths[{std::min<VertexId>("h", a), std::max<VertexId>("h", a)}] = dist("h", a);
  }
  fan.complex = SimplicialComplex::build(ids, triangles, lengths);
  return fan;
}

// Planar fan layout contracted by lambda and zero-padded into R^ambient.
inline PLMap fan_map(const Fan& fan, double lambda, int ambient) {
  std::vector<Vector> images(fan.complex->vertex_count(), Vector::Zero(ambient));
  for (const auto& [id, xy] : fan.plane) {
    Vector& v = images[fan.complex->vertex_index(id)];
    v[0] = lambda * xy.first;
    v[1] = lambda * xy.second;
  }
  return PLMap(fan.complex, ambient, images);
}

// Per-parent-edge image polylines of a refined graph map, ordered by edge
// parameter.  Keys are parent edges as index pairs.
inline std::map<Simplex, std::vector<Vector>> edge_polylines(const PLMap& refined,
                                                             const Correspondence& corr) {
  std::map<Simplex, std::vector<std::pair<double, Vector>>> raw;
  std::map<int, Vector> at_vertex;
  for (int v = 0; v < refined.domain()->vertex_count(); ++v) {
    const auto& a = corr.anchors[v];
    if (a.simplex.size() == 2)
      raw[a.simplex].emplace_back(a.weights[1], refined.image(v));
    else if (a.simplex.size() == 1)
      at_vertex[a.simplex[0]] = refined.image(v);
  }
  std::map<Simplex, std::vector<Vector>> out;
  for (const auto& e : corr.parent->edges()) {
    auto& bps = raw[e];
    bps.emplace_back(0.0, at_vertex.at(e[0]));
    bps.emplace_back(1.0, at_vertex.at(e[1]));
    std::sort(bps.begin(), bps.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    auto& line = out[e];
    for (auto& [t, img] : bps) line.push_back(std::move(img));
  }
  return out;
}

}  // namespace testutil
