#pragma once

#include "polyiso/complex.hpp"

#include <utility>

namespace polyiso {

/**
 * A simplicial map into Euclidean space: one image point per domain vertex,
 * extended affinely over each simplex.
 */
class PLMap {
 public:
  PLMap(ComplexPtr domain, int ambient_dim, std::vector<Vector> vertex_images);

  const ComplexPtr& domain() const { return domain_; }
  int ambient_dim() const { return ambient_dim_; }
  const Vector& image(int vertex_index) const { return images_.at(vertex_index); }
  const std::vector<Vector>& images() const { return images_; }

  PLMap with_image(int vertex_index, Vector v) const;
  PLMap with_images(std::vector<Vector> images) const;

 private:
  ComplexPtr domain_;
  int ambient_dim_;
  std::vector<Vector> images_;
};

/// Affine extension at a barycentric point of the domain.
Vector evaluate(const PLMap& f, const BarycentricPoint& p);

/// Form induced by the map on a simplex: inner products of image edge vectors
/// taken from the base (least) vertex.  Always positive semidefinite.
QuadraticForm induced_form(const PLMap& f, const Simplex& s);

struct ShortnessReport {
  double margin = 0.0;          // min over maximal simplices of min eig(G - G_f)
  double margin_ratio = 0.0;    // margin / trace G on the worst simplex
  Simplex worst_simplex;
  bool strictly_short = false;  // margin > 0
  bool short_map = false;       // margin >= -1e-12 * scale
};

/// Worst-case shortness margin over the maximal simplices.
ShortnessReport shortness_margin(const PLMap& f);

/// Splits off the first `prefix_dim` coordinates; returns (prefix, remainder).
std::pair<PLMap, PLMap> split_coordinates(const PLMap& f, int prefix_dim);

/// Concatenates coordinates of two maps over the same domain.
PLMap direct_sum(const PLMap& a, const PLMap& b);

/// Scales every image toward `center` by factor `lambda` in (0,1].
/// A missing center defaults to the centroid of the vertex images.
PLMap contract_toward_point(const PLMap& f, double lambda,
                            const Vector* center = nullptr);

/// Transports a map onto a subdivision of its domain: each refined vertex is
/// sent to the image of its anchor point.
PLMap refine_to(const PLMap& f, const Correspondence& correspondence);

}  // namespace polyiso
