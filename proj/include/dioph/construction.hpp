#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dioph/angles.hpp"
#include "dioph/lattice.hpp"
#include "dioph/numeric.hpp"

namespace dioph::construction {

enum class DigitRule { AllTwos, Seeded };

// Inequalities (exact, over Q) that an admissible alpha must satisfy for a
// given (d, q); the last two families are quantified over e in [d, qd].
struct AlphaCheck {
  std::string label;
  ExactRat lhs;  // constraint is lhs <= 0
  bool pass;
};
struct AlphaReport {
  std::vector<AlphaCheck> checks;
  bool pass;
};
AlphaReport validate_alpha(int d, int q, const ExactRat& alpha);

// Rational upper bound within tol of the admissibility threshold, found by
// exact bisection of validate_alpha over [2, 3d(d+4)]. The returned value
// itself passes.
ExactRat compute_Cd(int d, int q, const ExactRat& tol);

struct ConstructionParams {
  int d = 1;
  int q = 1;
  int n = 2;  // (q+1) d
  ExactInt theta = 5;
  ExactRat alpha = 4;
  DigitRule digit_rule = DigitRule::AllTwos;
  std::uint64_t seed = 0;
  int trunc_order = 1;  // M
  bool corrupt_digits = false;  // test hook: plants an off-support digit

  static ConstructionParams create(int d, int q, ExactInt theta, ExactRat alpha,
                                   DigitRule rule = DigitRule::AllTwos, std::uint64_t seed = 0,
                                   int trunc_order = 1);
  static ConstructionParams from_json(const std::string& text);
  std::string to_json() const;

  int qd() const { return q * d; }
  std::pair<int, int> qe_re(int e) const { return {e / d, e % d}; }
  PrecisionBudget precision_budget(int n_max) const;
  BigFloat truncation_error_bound(int target_n) const;
};

// Digit sequences u^(i,j)_k: nonzero exactly when i = (k + (j-1) q) mod qd,
// with values in {2,3}. j is 1-based as in the construction.
class DigitTable {
 public:
  explicit DigitTable(const ConstructionParams& p) : p_(p) {}
  int phi(int j, int k) const;  // support row for column (j, k)
  int u(int i, int j, int k) const;

 private:
  ConstructionParams p_;
};

// The unique (k, j) in [0, q-1] x [1, d] with u(i, j, N+k) != 0.
std::pair<int, int> digit_support(int i, int big_n, const ConstructionParams& p);

// Truncated sum sigma_{i,j,N} = sum_{k<=N} u_k / theta^floor(alpha^k).
ExactRat sigma_trunc(int i, int j, int big_n, const ConstructionParams& p);

IVec x_vec(int big_n, int j, const ConstructionParams& p);
IVec u_vec(int big_n, int j, const ConstructionParams& p);
IVec v_vec(int big_n, int j, const ConstructionParams& p);
QVec z_vec(int big_n, int j, const ConstructionParams& p);

struct SubspaceWithBasis {
  lattice::RationalSubspace space;
  IMat claimed_zbasis;  // empty when no claim is made (B with v = q+1)
};

// B_{N,v} = span(X_N^j .. X_{N+v-1}^j, all j). v in [1, q+1]; the claimed
// Z-basis (X_N^j) + (V_k^j, k in [N+1, N+v-1]) is attached for v <= q.
SubspaceWithBasis b_subspace(int big_n, int v, const ConstructionParams& p);
// C_{N,e} = B_{N+1,q_e} + span(X_N^1..X_N^{r_e}), e in [d, qd].
SubspaceWithBasis c_subspace(int big_n, int e, const ConstructionParams& p);
// D_{N,e} = span(X_N^1..X_N^e), e in [1, d].
SubspaceWithBasis d_subspace(int big_n, int e, const ConstructionParams& p);

// Rational model of A at truncation order M: basis Z_M^1..Z_M^d with the
// certified bound on the angle perturbation for measurements up to target_N.
struct TruncatedA {
  int order;
  int target_n;
  QMat basis;  // n x d
  BigFloat trunc_bound;
};
TruncatedA a_truncated(const ConstructionParams& p, std::optional<int> target_n = std::nullopt);

}  // namespace dioph::construction
