#include "dioph/construction.hpp"

#include <json.hpp>

namespace dioph::construction {

namespace {

int pos_mod(long x, int m) {
  long r = x % m;
  if (r < 0) r += m;
  return static_cast<int>(r);
}

}  // namespace

AlphaReport validate_alpha(int d, int q, const ExactRat& alpha) {
  if (d < 1 || q < 1) throw InfeasibleError("validate_alpha: d, q must be >= 1");
  if (alpha <= 1) throw InfeasibleError("validate_alpha: alpha must be > 1");
  AlphaReport rep;
  rep.pass = true;
  auto push = [&](const std::string& label, const ExactRat& lhs) {
    const bool ok = lhs <= 0;
    rep.checks.push_back({label, lhs, ok});
    rep.pass = rep.pass && ok;
  };
  const ExactRat a = alpha;
  push("ineq1", -a * a + a * (2 * d + 2) - d);
  push("ineq2", -a / 2 + d * (d - 1) + 1);
  push("ineq3", -a * a + (1 + 2 * d) * a - d);
  for (int e = d; e <= q * d; ++e) {
    const int qe = e / d, re = e % d;
    push("ineq4[e=" + std::to_string(e) + "]", ExactRat(d * re) - ExactRat(d - re) * a);
    const ExactRat aqe = rat_pow(a, qe);
    const ExactRat lhs = aqe / (ExactRat(d - re) + make_rat(1, 2)) -
                         aqe * a / (ExactRat(re) + ExactRat(d - re) * a) + 1;
    push("ineq5[e=" + std::to_string(e) + "]", lhs);
  }
  return rep;
}

ExactRat compute_Cd(int d, int q, const ExactRat& tol) {
  if (tol <= 0) throw InfeasibleError("compute_Cd: tol must be > 0");
  ExactRat lo(2), hi(3 * d * (d + 4));
  if (!validate_alpha(d, q, hi).pass) throw Error("compute_Cd: upper bound 3d(d+4) fails");
  if (validate_alpha(d, q, lo).pass) return lo;
  while (hi - lo > tol) {
    const ExactRat mid = (lo + hi) / 2;
    if (validate_alpha(d, q, mid).pass)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

ConstructionParams ConstructionParams::create(int d, int q, ExactInt theta, ExactRat alpha,
                                              DigitRule rule, std::uint64_t seed,
                                              int trunc_order) {
  if (d < 1 || q < 1) throw InfeasibleError("params: d, q must be >= 1");
  if ((q + 1) * d > 24) throw InfeasibleError("params: ambient dimension too large");
  if (theta < 5 || mpz_probab_prime_p(theta.get_mpz_t(), 40) == 0)
    throw InfeasibleError("params: theta must be a prime >= 5");
  const auto rep = validate_alpha(d, q, alpha);
  if (!rep.pass) {
    for (const auto& c : rep.checks)
      if (!c.pass)
        throw InfeasibleError("params: alpha below admissibility threshold (" + c.label +
                              " fails, lhs=" + rat_to_string(c.lhs) + ")");
  }
  if (trunc_order < 1) throw InfeasibleError("params: M must be >= 1");
  ConstructionParams p;
  p.d = d;
  p.q = q;
  p.n = (q + 1) * d;
  p.theta = std::move(theta);
  p.alpha = std::move(alpha);
  p.digit_rule = rule;
  p.seed = seed;
  p.trunc_order = trunc_order;
  return p;
}

ConstructionParams ConstructionParams::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  auto get_big = [&](const char* key) -> std::string {
    const auto& v = j.at(key);
    return v.is_string() ? v.get<std::string>() : std::to_string(v.get<long>());
  };
  DigitRule rule = DigitRule::AllTwos;
  if (j.contains("digit_rule")) {
    const std::string r = j.at("digit_rule").get<std::string>();
    if (r == "all_twos")
      rule = DigitRule::AllTwos;
    else if (r == "seeded")
      rule = DigitRule::Seeded;
    else
      throw InfeasibleError("params: unknown digit_rule '" + r + "'");
  }
  return create(j.at("d").get<int>(), j.at("q").get<int>(), ExactInt(get_big("theta")),
                rat_from_string(get_big("alpha")), rule,
                j.contains("seed") ? j.at("seed").get<std::uint64_t>() : 0,
                j.at("M").get<int>());
}

std::string ConstructionParams::to_json() const {
  nlohmann::ordered_json j;
  j["d"] = d;
  j["q"] = q;
  j["theta"] = theta.get_str();
  j["alpha"] = rat_to_string(alpha);
  j["digit_rule"] = digit_rule == DigitRule::AllTwos ? "all_twos" : "seeded";
  j["seed"] = seed;
  j["M"] = trunc_order;
  return j.dump();
}

PrecisionBudget ConstructionParams::precision_budget(int n_max) const {
  return required_precision(alpha, theta, trunc_order, q, n_max);
}

BigFloat ConstructionParams::truncation_error_bound(int target_n) const {
  return angles::truncation_error_bound(d, q, theta, alpha, trunc_order, target_n);
}

int DigitTable::phi(int j, int k) const { return pos_mod(k + static_cast<long>(j - 1) * p_.q, p_.qd()); }

int DigitTable::u(int i, int j, int k) const {
  if (i < 0 || i >= p_.qd() || j < 1 || j > p_.d || k < 0) throw Error("DigitTable: out of range");
  if (p_.corrupt_digits && k == 0 && j == 1 && i == pos_mod(phi(1, 0) + 1, p_.qd()))
    return 2;  // planted off-support digit
  if (i != phi(j, k)) return 0;
  if (p_.digit_rule == DigitRule::AllTwos) return 2;
  return 2 + static_cast<int>(hash_mix(p_.seed, static_cast<std::uint64_t>(i),
                                       static_cast<std::uint64_t>(j),
                                       static_cast<std::uint64_t>(k)) &
                              1);
}

std::pair<int, int> digit_support(int i, int big_n, const ConstructionParams& p) {
  if (i < 0 || i >= p.qd()) throw Error("digit_support: i out of range");
  // Euclidean-division construction from the uniqueness lemma.
  const int u_ = i / p.q, v = i % p.q;
  const int up = big_n / p.q, vp = big_n % p.q;
  int k, j;
  if (v >= vp) {
    k = v - vp;
    j = pos_mod(u_ - up, p.d) + 1;
  } else {
    k = v - vp + p.q;
    j = pos_mod(u_ - up - 1, p.d) + 1;
  }
  const DigitTable tbl(p);
  if (tbl.u(i, j, big_n + k) == 0) throw Error("digit_support: internal");
  return {k, j};
}

ExactRat sigma_trunc(int i, int j, int big_n, const ConstructionParams& p) {
  if (i < 0 || i >= p.qd() || j < 1 || j > p.d || big_n < 0)
    throw Error("sigma_trunc: out of range");
  const DigitTable tbl(p);
  ExactRat acc(0);
  for (int k = 0; k <= big_n; ++k) {
    const int digit = tbl.u(i, j, k);
    if (digit == 0) continue;
    const ExactInt e = floor_pow(p.alpha, static_cast<unsigned long>(k));
    if (!e.fits_ulong_p()) throw InfeasibleError("sigma_trunc: exponent too large");
    acc += make_rat(digit, int_pow(p.theta, e.get_ui()));
  }
  return acc;
}

IVec x_vec(int big_n, int j, const ConstructionParams& p) {
  if (j < 1 || j > p.d || big_n < 0) throw Error("x_vec: out of range");
  const ExactInt e = floor_pow(p.alpha, static_cast<unsigned long>(big_n));
  if (!e.fits_ulong_p()) throw InfeasibleError("x_vec: exponent too large");
  const ExactInt t = int_pow(p.theta, e.get_ui());
  IVec x(p.n, ExactInt(0));
  x[j - 1] = t;
  for (int i = 0; i < p.qd(); ++i) {
    const ExactRat v = ExactRat(t) * sigma_trunc(i, j, big_n, p);
    if (v.get_den() != 1) throw Error("x_vec: internal, non-integral coordinate");
    x[p.d + i] = v.get_num();
  }
  return x;
}

IVec u_vec(int big_n, int j, const ConstructionParams& p) {
  if (j < 1 || j > p.d || big_n < 0) throw Error("u_vec: out of range");
  const DigitTable tbl(p);
  IVec u(p.n, ExactInt(0));
  const int i = tbl.phi(j, big_n);
  u[p.d + i] = tbl.u(i, j, big_n);
  return u;
}

IVec v_vec(int big_n, int j, const ConstructionParams& p) {
  const DigitTable tbl(p);
  IVec v(p.n, ExactInt(0));
  v[p.d + tbl.phi(j, big_n)] = 1;
  return v;
}

QVec z_vec(int big_n, int j, const ConstructionParams& p) {
  if (j < 1 || j > p.d || big_n < 0) throw Error("z_vec: out of range");
  QVec z(p.n, ExactRat(0));
  z[j - 1] = 1;
  for (int i = 0; i < p.qd(); ++i) z[p.d + i] = sigma_trunc(i, j, big_n, p);
  return z;
}

namespace {

IMat columns_of(const std::vector<IVec>& cols) {
  IMat m(cols.at(0).size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < cols[j].size(); ++i) m(i, j) = cols[j][i];
  return m;
}

}  // namespace

SubspaceWithBasis b_subspace(int big_n, int v, const ConstructionParams& p) {
  if (v < 1 || v > p.q + 1) throw Error("b_subspace: v out of range");
  if (big_n < 0) throw Error("b_subspace: N out of range");
  std::vector<IVec> span;
  for (int j = 1; j <= p.d; ++j)
    for (int k = 0; k < v; ++k) span.push_back(x_vec(big_n + k, j, p));
  SubspaceWithBasis out{lattice::RationalSubspace::from_integer_span(columns_of(span)), IMat()};
  if (v <= p.q) {
    std::vector<IVec> claimed;
    for (int j = 1; j <= p.d; ++j) claimed.push_back(x_vec(big_n, j, p));
    for (int j = 1; j <= p.d; ++j)
      for (int k = big_n + 1; k <= big_n + v - 1; ++k) claimed.push_back(v_vec(k, j, p));
    out.claimed_zbasis = columns_of(claimed);
  }
  return out;
}

SubspaceWithBasis c_subspace(int big_n, int e, const ConstructionParams& p) {
  if (e < p.d || e > p.qd()) throw Error("c_subspace: e out of range");
  if (big_n < 0) throw Error("c_subspace: N out of range");
  const auto [qe, re] = p.qe_re(e);
  std::vector<IVec> span;
  for (int j = 1; j <= p.d; ++j)
    for (int k = 1; k <= qe; ++k) span.push_back(x_vec(big_n + k, j, p));
  for (int j = 1; j <= re; ++j) span.push_back(x_vec(big_n, j, p));
  std::vector<IVec> claimed;
  for (int j = 1; j <= re; ++j) {
    claimed.push_back(x_vec(big_n, j, p));
    for (int k = 1; k <= qe; ++k) claimed.push_back(v_vec(big_n + k, j, p));
  }
  for (int j = re + 1; j <= p.d; ++j) {
    claimed.push_back(x_vec(big_n + 1, j, p));
    for (int k = 2; k <= qe; ++k) claimed.push_back(v_vec(big_n + k, j, p));
  }
  return {lattice::RationalSubspace::from_integer_span(columns_of(span)), columns_of(claimed)};
}

SubspaceWithBasis d_subspace(int big_n, int e, const ConstructionParams& p) {
  if (e < 1 || e > p.d) throw Error("d_subspace: e out of range");
  if (big_n < 0) throw Error("d_subspace: N out of range");
  std::vector<IVec> span;
  for (int j = 1; j <= e; ++j) span.push_back(x_vec(big_n, j, p));
  const IMat m = columns_of(span);
  return {lattice::RationalSubspace::from_integer_span(m), m};
}

TruncatedA a_truncated(const ConstructionParams& p, std::optional<int> target_n) {
  const int tn = target_n.value_or(p.trunc_order - p.q - 1);
  if (tn < 0) throw InfeasibleError("a_truncated: M too small for any measurement level");
  TruncatedA a;
  a.order = p.trunc_order;
  a.target_n = tn;
  a.basis = QMat(p.n, p.d);
  for (int j = 1; j <= p.d; ++j) {
    const QVec z = z_vec(p.trunc_order, j, p);
    for (int i = 0; i < p.n; ++i) a.basis(i, j - 1) = z[i];
  }
  a.trunc_bound = p.truncation_error_bound(tn);
  return a;
}

}  // namespace dioph::construction
