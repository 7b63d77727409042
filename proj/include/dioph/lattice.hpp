#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dioph/numeric.hpp"

namespace dioph::lattice {

struct HnfResult {
  IMat h;                  // column echelon, pivots positive, left-of-pivot reduced
  IMat u;                  // unimodular, m * u = padded h
  std::vector<int> pivot_rows;
  std::size_t rank = 0;
};

// Column-style Hermite normal form. The returned `h` keeps only the `rank`
// nonzero columns; `u` is the full square transform.
HnfResult hnf_columns(IMat m, bool want_transform = false);

// Basis of { x in Z^n : k x = 0 }, in column HNF. k is any integer matrix.
IMat integer_kernel(const IMat& k);

// Basis of the saturation of the column lattice of `span`:
// extend to a basis of Q^n, invert exactly, clear denominators, HNF.
// Throws on rank-deficient input.
IMat z_basis(const IMat& span);

class RationalSubspace {
 public:
  // From an integer spanning matrix (n x e, full column rank).
  static RationalSubspace from_integer_span(const IMat& span);
  // Clears denominators first.
  static RationalSubspace from_rational_span(const QMat& span);

  int ambient() const { return n_; }
  int dim() const { return e_; }
  const IMat& span() const { return span_; }
  const IMat& zbasis() const { return zbasis_; }
  const ExactInt& height_sq() const { return height_sq_; }
  // (exact square, floating root at the given precision)
  std::pair<ExactInt, BigFloat> height(long prec = 256) const;

  bool member(const QVec& v) const;
  bool contains(const RationalSubspace& other) const;

  std::string to_json() const;
  static RationalSubspace from_json(const std::string& text);

 private:
  RationalSubspace() = default;
  int n_ = 0, e_ = 0;
  IMat span_;     // as given
  IMat zbasis_;   // saturated, column HNF
  ExactInt height_sq_;
};

RationalSubspace sum(const RationalSubspace& a, const RationalSubspace& b);
RationalSubspace intersect(const RationalSubspace& a, const RationalSubspace& b);

// ||wedge(given_basis)|| / H(S) as an exact positive integer: the index of the
// sublattice spanned by given_basis inside the saturated lattice of S.
// Throws if given_basis does not span the same real subspace as S.
ExactInt ideal_norm(const IMat& given_basis, const RationalSubspace& s);

// Z-basis (column HNF) of the lattice of integer points orthogonal to S.
IMat orthogonal_complement_zbasis(const RationalSubspace& s);

}  // namespace dioph::lattice
