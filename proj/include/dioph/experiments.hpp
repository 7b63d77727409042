#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dioph/construction.hpp"

namespace dioph::experiments {

using construction::ConstructionParams;

// Exponent targets: alpha^(q_e+1) / (r_e + (d-r_e) alpha) for e >= d,
// alpha/e for e < d, with (q_e, r_e) the Euclidean division of e by d.
ExactRat theorem_mu(int d, int e, const ExactRat& alpha);
ExactRat theorem_mu(const ConstructionParams& p, int e);

enum class Family { C, D };

struct ExponentRow {
  int e = 0;
  int n_level = 0;  // N
  Family family = Family::C;
  ExactInt height_sq;
  BigFloat psi_last;
  BigFloat psi_error;
  BigFloat ratio;  // -log psi / log H
};

struct ExponentEstimate {
  int e = 0;
  Family family = Family::C;
  std::vector<ExponentRow> rows;      // sorted by N
  BigFloat last_ratio;                // primary estimator
  BigFloat lsq_slope;                 // secondary statistic
  ExactRat target;
  BigFloat rel_gap;                   // |last_ratio - target| / target
};

// Measures the constructed family at each N: exact height, certified last
// angle against the truncated model, and the exponent ratio. Rows run in
// parallel; output order is by N regardless of thread count.
std::vector<ExponentRow> measure_family(const ConstructionParams& p, Family family, int e,
                                        const std::vector<int>& n_levels, long bits_override = 0);
ExponentEstimate estimate(const ConstructionParams& p, Family family, int e,
                          const std::vector<int>& n_levels, long bits_override = 0);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};
struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  std::string first_failure() const {
    for (const auto& c : checks)
      if (!c.pass) return c.name;
    return "";
  }
  std::string to_text(const ConstructionParams& p) const;
  std::string to_json(const ConstructionParams& p) const;
};

// Runs every exactly-checkable lemma property of the construction over the
// given N levels; failures become report entries, not exceptions.
VerifyReport verify_lemmas(const ConstructionParams& p, const std::vector<int>& n_levels,
                           std::uint64_t seed);

struct SelectResult {
  bool ok = false;
  int n_level = 0;
  std::string diagnostic;
};

// Unique N with theta^(alpha^(N+q_e)) <= H^x < theta^(alpha^(N+q_e+1)),
// x = alpha^(q_e+1)/(r_e+(d-r_e)alpha) + eps/2 - 1; outward-rounded logs.
SelectResult select_n_large_e(const BigFloat& height, const ExactRat& eps,
                              const ConstructionParams& p, int e);
// Unique N with theta^(d alpha^N) <= H^((alpha-1)/e + eps/2) < theta^(d alpha^(N+1)).
SelectResult select_n_small_e(const BigFloat& height, const ExactRat& eps,
                              const ConstructionParams& p, int e);

struct ShortestVector {
  bool found = false;
  IVec vec;           // ambient coordinates
  ExactInt norm_sq;
  long long nodes = 0;
};

// Exhaustive enumeration of nonzero lattice vectors of the column lattice of
// `basis` with |v|^2 <= radius_sq; exact arithmetic throughout. Rank <= 4 and
// at most 10^7 visited nodes.
ShortestVector shortest_vector_enum(const IMat& basis, const ExactRat& radius_sq);
ShortestVector shortest_vector_enum(const lattice::RationalSubspace& s, const ExactRat& radius_sq);

struct ApproxRecord {
  long denom = 0;
  ExactInt numer;
  ExactRat err;
};
struct BestApproxTable {
  std::vector<ApproxRecord> records;  // running minima over b
  bool no_fast_approx = true;         // no b with err < b^(-9/2)
};

// Best rational approximations of sigma_hat for all denominators b <= q_max.
// sigma_err is a bound on |sigma - sigma_hat|; the guard requires
// sigma_err < q_max^(-alpha-2).
BestApproxTable best_approx_enum_n2(const ExactRat& sigma_hat, const ExactRat& sigma_err,
                                    const ExactRat& alpha, long q_max);

// CSV / JSON export for cmd_exponents: columns
// d,q,theta,alpha,e,N,height_sq,psi_hex,ratio,target,rel_gap.
std::string exponents_csv(const ConstructionParams& p, const std::vector<ExponentEstimate>& ests);
std::string exponents_json(const ConstructionParams& p, const std::vector<ExponentEstimate>& ests);

}  // namespace dioph::experiments
