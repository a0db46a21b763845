#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace polyiso {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Vertex identifiers are strings; '|' is reserved for edge keys in the JSON schema.
using VertexId = std::string;

/// A simplex is a strictly increasing tuple of vertex indices into its complex.
using Simplex = std::vector<int>;

/// Thrown when an input file or JSON document does not match the expected schema.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when an operation's preconditions are violated (bad arguments,
/// maps that are not strictly short, dimension mismatches, ...).
class PreconditionError : public std::runtime_error {
 public:
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when an iterative numerical scheme exhausts its retry budget.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Symmetric bilinear form on the edge vectors of a simplex, stored densely.
///
/// For an l-simplex the form is l x l; entry (a,b) is the inner product of the
/// edge vectors from the base (least) vertex to vertices a and b.
struct QuadraticForm {
  Matrix entries;

  QuadraticForm() = default;
  explicit QuadraticForm(Matrix m);

  int dim() const { return static_cast<int>(entries.rows()); }
  double trace() const { return entries.trace(); }

  /// Smallest eigenvalue (0 for the empty form of a 0-simplex).
  double min_eigenvalue() const;

  /// Positive definite relative to a scale-free tolerance:
  /// smallest eigenvalue > tolerance * trace.
  bool positive_definite(double tolerance) const {
    return min_eigenvalue() > tolerance * trace();
  }
};

QuadraticForm operator-(const QuadraticForm& a, const QuadraticForm& b);
QuadraticForm operator+(const QuadraticForm& a, const QuadraticForm& b);

/// A point of a complex given by a simplex and convex weights over its vertices.
struct BarycentricPoint {
  Simplex simplex;
  std::vector<double> weights;  // nonnegative, sums to 1 within 1e-12

  BarycentricPoint() = default;
  BarycentricPoint(Simplex s, std::vector<double> w);
};

std::string simplex_to_string(const Simplex& s);

}  // namespace polyiso
