#pragma once

#include <string>
#include <vector>

#include "dioph/numeric.hpp"

namespace dioph::exterior {

// Lexicographically ordered g-subsets of {0..n-1}.
std::vector<std::vector<int>> lex_subsets(int n, int g);
long long binomial(int n, int g);

// Grassmann coordinates of a wedge of g vectors in R^n, indexed by the
// lexicographic g-subsets of rows. Exact rational coordinates.
class Multivector {
 public:
  Multivector() = default;
  Multivector(int n, int grade, QVec coords);

  int n() const { return n_; }
  int grade() const { return grade_; }
  const QVec& coords() const { return coords_; }
  const ExactRat& coord(std::size_t k) const { return coords_[k]; }
  bool is_zero() const;
  bool integral() const;

  friend bool operator==(const Multivector& a, const Multivector& b) {
    return a.n_ == b.n_ && a.grade_ == b.grade_ && a.coords_ == b.coords_;
  }

  std::string to_json() const;
  static Multivector from_json(const std::string& text);

 private:
  int n_ = 0, grade_ = 0;
  QVec coords_;
};

// Wedge product of the columns of `vectors` (n x g). Coordinates are the g x g
// row-subset minors computed by fraction-free Bareiss elimination, one subset
// per task; the batch runs under OpenMP.
Multivector wedge(const QMat& vectors);
Multivector wedge(const IMat& vectors);
// Serial reference: Laplace-expansion minors, kept for testing and benchmarks.
Multivector wedge_serial(const IMat& vectors);

// Exact squared Euclidean norm; equals det of the Gram matrix of the wedged
// vectors (Cauchy-Binet).
ExactRat norm_sq(const Multivector& m);

// Divides integral coordinates by their gcd; first nonzero coordinate made
// positive. Throws on the zero multivector or non-integral coordinates.
Multivector primitive_normalize(const Multivector& m);

}  // namespace dioph::exterior
