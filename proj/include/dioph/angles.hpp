#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dioph/lattice.hpp"
#include "dioph/numeric.hpp"

namespace dioph::angles {

// sin of the angle between two nonzero vectors:
// omega^2 = 1 - (X.Y)^2 / (|X|^2 |Y|^2), exact rational in [0,1];
// the BigFloat is its square root at `prec` bits.
std::pair<ExactRat, BigFloat> omega(const QVec& x, const QVec& y, long prec = 128);

struct AngleReport {
  int t = 0;
  std::vector<BigFloat> psi;  // nondecreasing, in [0,1]
  BigFloat error_bound;
  long precision_bits = 0;
  std::string to_json() const;
};

// Sines of the principal angles between the column spans of a_basis and
// b_basis (t = min of the dimensions, nondecreasing). All Gram data is
// assembled exactly over Q; only the eigen stage rounds. The computation runs
// at `bits` and again at 2*bits and must agree to relative 2^-32, else it
// throws PrecisionError. Cosine singular values close to 1 (above
// 1 - 2^-(bits/4)) switch the sine extraction to the exact projection
// difference pencil det(y*G - (G - M Gb^-1 M^T)).
AngleReport psi_profile(const QMat& a_basis, const QMat& b_basis, long bits);
AngleReport psi_profile(const lattice::RationalSubspace& a, const lattice::RationalSubspace& b,
                        long bits);

// Test oracle: squared sines as certified rational enclosures obtained from
// the exact characteristic polynomial of the Gram pencil, Yun square-free
// decomposition, Sturm isolation and rational bisection. Guarded to
// t <= 3, n <= 6. Enclosure midpoints are within relative 2^-96 of the roots
// (exact for rational roots).
std::vector<ExactRat> psi_profile_exact_oracle(const QMat& a_basis, const QMat& b_basis);
std::vector<ExactRat> psi_profile_exact_oracle(const lattice::RationalSubspace& a,
                                               const lattice::RationalSubspace& b);

// Grid-plus-refinement minimization of omega over the product of unit
// spheres; an upper bound for psi_1 converging as grid_depth grows.
// Requires dim A + dim B <= 4.
double psi_min_bruteforce(const QMat& a_basis, const QMat& b_basis, int grid_depth);

// Rigorous bound on |psi_j(A, .) - psi_j(A_M, .)| for the truncated model of
// order M, measured at level target_N:
//   d * 4 * (theta/(theta-1)) * theta^(-floor(alpha^(M+1)))
// computed with outward rounding. Throws if M < target_N + q + 1 or if the
// bound is not strictly below the measured angle scale
// theta^(-alpha^(target_N+q+1)).
BigFloat truncation_error_bound(int d, int q, const ExactInt& theta, const ExactRat& alpha,
                                int trunc_order_m, int target_n, long prec = 192);

}  // namespace dioph::angles
