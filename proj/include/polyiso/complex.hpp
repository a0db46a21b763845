#pragma once

#include "polyiso/types.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <utility>

namespace polyiso {

/**
 * A finite simplicial complex with prescribed edge lengths.
 *
 * The simplex set is closed under faces.  Every 1-simplex carries a positive
 * length, which induces a flat metric on each simplex through its Gram form;
 * the complex is a valid polyhedral metric space exactly when every simplex's
 * Gram form is positive definite (see validate_metric).
 */
class SimplicialComplex {
 public:
  /// Builds a complex from vertex ids, simplex tuples (faces are added
  /// automatically) and edge lengths keyed by index pairs of the *sorted*
  /// vertex id list.  Throws PreconditionError on inconsistent input.
  static std::shared_ptr<const SimplicialComplex> build(
      std::vector<VertexId> vertex_ids,
      const std::vector<std::vector<VertexId>>& simplices,
      const std::map<std::pair<VertexId, VertexId>, double>& edge_lengths);

  int dimension() const { return dim_; }
  int vertex_count() const { return static_cast<int>(vertex_ids_.size()); }
  const std::vector<VertexId>& vertex_ids() const { return vertex_ids_; }
  const VertexId& vertex_id(int index) const { return vertex_ids_.at(index); }
  int vertex_index(const VertexId& id) const;
  bool has_vertex(const VertexId& id) const;

  bool contains(const Simplex& s) const { return simplex_set_.count(s) > 0; }
  const std::set<Simplex>& simplices() const { return simplex_set_; }
  std::vector<Simplex> simplices_of_dim(int d) const;
  /// Simplices not contained in any larger simplex.
  const std::vector<Simplex>& maximal_simplices() const { return maximal_; }
  /// Sorted list of all 1-simplices.
  const std::vector<Simplex>& edges() const { return edges_; }

  double edge_length(int a, int b) const;

  /// Structural equality: identical vertices, simplices and edge lengths.
  bool same_structure(const SimplicialComplex& other) const;

 private:
  SimplicialComplex() = default;

  std::vector<VertexId> vertex_ids_;
  std::map<VertexId, int> index_of_;
  std::set<Simplex> simplex_set_;
  std::vector<Simplex> maximal_;
  std::vector<Simplex> edges_;
  std::map<std::pair<int, int>, double> edge_len_;
  int dim_ = 0;
};

using ComplexPtr = std::shared_ptr<const SimplicialComplex>;

/// Gram form of a simplex: for base vertex v0 (the least vertex of the tuple),
/// G[a,b] = (d(v0,va)^2 + d(v0,vb)^2 - d(va,vb)^2) / 2.
QuadraticForm gram_form(const SimplicialComplex& k, const Simplex& s);

/// Squared intrinsic distance between two weight vectors on the same simplex,
/// measured in the flat metric that the Gram form induces.
double squared_distance_in_simplex(const SimplicialComplex& k, const Simplex& s,
                                   const std::vector<double>& wa,
                                   const std::vector<double>& wb);

struct ValidationReport {
  bool valid = true;
  double tolerance = 0.0;
  std::vector<Simplex> offenders;              // simplices whose form fails PD
  std::vector<double> offender_eigenvalues;    // matching smallest eigenvalues
};

/// Flags every simplex whose Gram form has smallest eigenvalue
/// <= pd_tolerance * trace.  The complex is flat-metrizable iff none is flagged.
ValidationReport validate_metric(const SimplicialComplex& k,
                                 double pd_tolerance = 1e-10);

/**
 * Sub-complex of a parent, optionally with excluded faces.
 *
 * A closed star is a plain face-closed simplex set.  A shell stores the
 * simplices whose interiors enter at step k together with the faces that
 * belong to the previous iterated star; its point set is the union of the
 * member simplices minus the excluded closed faces.
 */
struct SubComplex {
  ComplexPtr parent;
  std::set<Simplex> simplices;
  std::set<Simplex> excluded_faces;

  bool contains_vertex(int v) const { return simplices.count(Simplex{v}) > 0; }
};

/// k-fold iterated closed star of a vertex (k >= 1).
SubComplex star(const ComplexPtr& k, const VertexId& vertex, int iterations);

/// Shell: iterated star difference.  shell(v,1) is the closed star; for k >= 2
/// the point set is star(v,k) minus star(v,k-1).
SubComplex shell(const ComplexPtr& k, const VertexId& vertex, int index);

/// For every simplex, the smallest k with the simplex contained in star(v,k).
/// Simplices whose component does not contain v map to INT_MAX.
std::map<Simplex, int> shell_indices(const SimplicialComplex& k, const VertexId& vertex);

/// Correspondence from a refined complex back to the complex it subdivides:
/// each refined vertex is anchored at a barycentric point of the parent.
struct Correspondence {
  ComplexPtr parent;
  ComplexPtr refined;
  std::vector<BarycentricPoint> anchors;  // indexed by refined vertex index
};

struct SubdivisionResult {
  ComplexPtr refined;
  Correspondence correspondence;
};

/// Uniform subdivision: edgewise 2^level splits for 1-dimensional complexes,
/// iterated barycentric otherwise.  level 0 returns the identity correspondence.
SubdivisionResult subdivide(const ComplexPtr& k, int level);

/// Splits each edge at the given interior parameters (sorted, in (0,1)),
/// measured along the sorted-vertex orientation.  Edges may be omitted.
/// Only valid for 1-dimensional complexes.
SubdivisionResult split_edges_at(const ComplexPtr& k,
                                 const std::map<Simplex, std::vector<double>>& cuts);

}  // namespace polyiso
