#include "polyiso/plmap.hpp"

#include <cmath>

namespace polyiso {

PLMap::PLMap(ComplexPtr domain, int ambient_dim, std::vector<Vector> vertex_images)
    : domain_(std::move(domain)), ambient_dim_(ambient_dim),
      images_(std::move(vertex_images)) {
  if (!domain_) throw PreconditionError("map requires a domain complex");
  if (ambient_dim_ < 1) throw PreconditionError("ambient dimension must be >= 1");
  if (static_cast<int>(images_.size()) != domain_->vertex_count())
    throw PreconditionError("map must provide an image for every vertex");
  for (const auto& v : images_) {
    if (v.size() != ambient_dim_)
      throw PreconditionError("vertex image has wrong dimension");
    if (!v.allFinite()) throw PreconditionError("vertex image has non-finite entries");
  }
}

PLMap PLMap::with_image(int vertex_index, Vector v) const {
  std::vector<Vector> copy = images_;
  copy.at(vertex_index) = std::move(v);
  return PLMap(domain_, ambient_dim_, std::move(copy));
}

PLMap PLMap::with_images(std::vector<Vector> images) const {
  return PLMap(domain_, ambient_dim_, std::move(images));
}

Vector evaluate(const PLMap& f, const BarycentricPoint& p) {
  if (!f.domain()->contains(p.simplex))
    throw PreconditionError("evaluate: point's simplex is not in the domain");
  Vector out = Vector::Zero(f.ambient_dim());
  for (size_t i = 0; i < p.simplex.size(); ++i)
    out += p.weights[i] * f.image(p.simplex[i]);
  return out;
}

QuadraticForm induced_form(const PLMap& f, const Simplex& s) {
  if (!f.domain()->contains(s))
    throw PreconditionError("induced_form: simplex not in domain");
  const int l = static_cast<int>(s.size()) - 1;
  Matrix g(l, l);
  for (int a = 1; a <= l; ++a) {
    const Vector ea = f.image(s[a]) - f.image(s[0]);
    for (int b = a; b <= l; ++b) {
      const Vector eb = f.image(s[b]) - f.image(s[0]);
      const double v = ea.dot(eb);
      g(a - 1, b - 1) = v;
      g(b - 1, a - 1) = v;
    }
  }
  return QuadraticForm(std::move(g));
}

ShortnessReport shortness_margin(const PLMap& f) {
  ShortnessReport report;
  bool first = true;
  double scale = 0.0;
  for (const auto& s : f.domain()->maximal_simplices()) {
    if (s.size() < 2) continue;
    const QuadraticForm g = gram_form(*f.domain(), s);
    const QuadraticForm gf = induced_form(f, s);
    const double m = (g - gf).min_eigenvalue();
    scale = std::max(scale, g.trace());
    if (first || m < report.margin) {
      report.margin = m;
      report.worst_simplex = s;
      const double tr = g.trace();
      report.margin_ratio = tr > 0.0 ? m / tr : 0.0;
      first = false;
    }
  }
  if (first) {
    // Complex with no positive-dimensional simplices: vacuously isometric.
    report.margin = 0.0;
    report.margin_ratio = 0.0;
  }
  report.strictly_short = report.margin > 0.0;
  report.short_map = report.margin >= -1e-12 * std::max(1.0, scale);
  return report;
}

std::pair<PLMap, PLMap> split_coordinates(const PLMap& f, int prefix_dim) {
  if (prefix_dim < 1 || prefix_dim >= f.ambient_dim())
    throw PreconditionError("split_coordinates: prefix must be in [1, ambient_dim)");
  const int rest = f.ambient_dim() - prefix_dim;
  std::vector<Vector> head, tail;
  head.reserve(f.images().size());
  tail.reserve(f.images().size());
  for (const auto& v : f.images()) {
    head.push_back(v.head(prefix_dim));
    tail.push_back(v.tail(rest));
  }
  return {PLMap(f.domain(), prefix_dim, std::move(head)),
          PLMap(f.domain(), rest, std::move(tail))};
}

PLMap direct_sum(const PLMap& a, const PLMap& b) {
  if (a.domain() != b.domain() && !a.domain()->same_structure(*b.domain()))
    throw PreconditionError("direct_sum: maps have different domains");
  std::vector<Vector> images;
  images.reserve(a.images().size());
  for (size_t i = 0; i < a.images().size(); ++i) {
    Vector v(a.ambient_dim() + b.ambient_dim());
    v << a.images()[i], b.images()[i];
    images.push_back(std::move(v));
  }
  return PLMap(a.domain(), a.ambient_dim() + b.ambient_dim(), std::move(images));
}

PLMap contract_toward_point(const PLMap& f, double lambda, const Vector* center) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw PreconditionError("contract_toward_point: lambda must be in (0, 1]");
  Vector c;
  if (center) {
    if (center->size() != f.ambient_dim())
      throw PreconditionError("contract_toward_point: center dimension mismatch");
    c = *center;
  } else {
    c = Vector::Zero(f.ambient_dim());
    for (const auto& v : f.images()) c += v;
    c /= static_cast<double>(f.images().size());
  }
  std::vector<Vector> images;
  images.reserve(f.images().size());
  for (const auto& v : f.images()) images.push_back(c + lambda * (v - c));
  return PLMap(f.domain(), f.ambient_dim(), std::move(images));
}

PLMap refine_to(const PLMap& f, const Correspondence& correspondence) {
  if (correspondence.parent != f.domain() &&
      !correspondence.parent->same_structure(*f.domain()))
    throw PreconditionError("refine_to: correspondence does not refine the map's domain");
  std::vector<Vector> images;
  images.reserve(correspondence.anchors.size());
  for (const auto& anchor : correspondence.anchors)
    images.push_back(evaluate(f, anchor));
  return PLMap(correspondence.refined, f.ambient_dim(), std::move(images));
}

}  // namespace polyiso
