#include "dioph/experiments.hpp"

#include <json.hpp>

#include <algorithm>
#include <exception>
#include <map>
#include <sstream>

#include "dioph/exterior.hpp"

namespace dioph::experiments {

using construction::a_truncated;
using construction::b_subspace;
using construction::c_subspace;
using construction::d_subspace;
using construction::DigitTable;
using construction::SubspaceWithBasis;
using lattice::RationalSubspace;

ExactRat theorem_mu(int d, int e, const ExactRat& alpha) {
  if (e < 1) throw Error("theorem_mu: e out of range");
  const int qe = e / d, re = e % d;
  if (e >= d) return rat_pow(alpha, qe + 1) / (ExactRat(re) + ExactRat(d - re) * alpha);
  return alpha / e;
}

ExactRat theorem_mu(const ConstructionParams& p, int e) {
  if (e < 1 || e > p.qd()) throw Error("theorem_mu: e out of range");
  return theorem_mu(p.d, e, p.alpha);
}

namespace {

SubspaceWithBasis family_subspace(const ConstructionParams& p, Family f, int n_level, int e) {
  return f == Family::C ? c_subspace(n_level, e, p) : d_subspace(n_level, e, p);
}

BigFloat ratio_of(const BigFloat& psi, const ExactInt& h2, long prec) {
  if (psi.sgn() <= 0) throw Error("exponent ratio undefined: psi must be in (0,1)");
  const BigFloat log_h = log(BigFloat::of(h2, prec)) / BigFloat::of(2L, prec);
  if (log_h.sgn() <= 0) throw Error("exponent ratio undefined: H must be > 1");
  return -log(psi.round_to(prec)) / log_h;
}

}  // namespace

std::vector<ExponentRow> measure_family(const ConstructionParams& p, Family family, int e,
                                        const std::vector<int>& n_levels, long bits_override) {
  if (n_levels.empty()) throw Error("measure_family: empty N range");
  if (family == Family::C && (e < p.d || e > p.qd()))
    throw Error("measure_family: family C needs e in [d, qd]");
  if (family == Family::D && (e < 1 || e > p.d))
    throw Error("measure_family: family D needs e in [1, d]");
  const int n_max = *std::max_element(n_levels.begin(), n_levels.end());
  // Certifies that the truncation error sits below the measured angle scale.
  p.truncation_error_bound(n_max);
  const long bits = bits_override > 0 ? bits_override : p.precision_budget(n_max).bits;
  const auto model = a_truncated(p, n_max);
  const int t = std::min(p.d, e);
  std::vector<ExponentRow> rows(n_levels.size());
  std::exception_ptr first_error;
  const long long count = static_cast<long long>(n_levels.size());
#pragma omp parallel for schedule(dynamic)
  for (long long idx = 0; idx < count; ++idx) {
    try {
      const int n_level = n_levels[idx];
      const auto sub = family_subspace(p, family, n_level, e);
      const auto rep =
          angles::psi_profile(model.basis, to_rational(sub.space.zbasis()), bits);
      ExponentRow row;
      row.e = e;
      row.n_level = n_level;
      row.family = family;
      row.height_sq = sub.space.height_sq();
      row.psi_last = rep.psi.at(t - 1);
      row.psi_error = rep.error_bound;
      row.ratio = ratio_of(row.psi_last, row.height_sq, bits);
      rows[idx] = std::move(row);
    } catch (...) {
#pragma omp critical
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  std::sort(rows.begin(), rows.end(),
            [](const ExponentRow& a, const ExponentRow& b) { return a.n_level < b.n_level; });
  return rows;
}

ExponentEstimate estimate(const ConstructionParams& p, Family family, int e,
                          const std::vector<int>& n_levels, long bits_override) {
  ExponentEstimate est;
  est.e = e;
  est.family = family;
  est.rows = measure_family(p, family, e, n_levels, bits_override);
  est.target = theorem_mu(p, e);
  const long prec = 256;
  est.last_ratio = est.rows.back().ratio;
  // Least-squares slope of -log psi against log H.
  const std::size_t m = est.rows.size();
  if (m >= 2) {
    std::vector<BigFloat> xs, ys;
    BigFloat xbar(prec), ybar(prec);
    for (const auto& r : est.rows) {
      const BigFloat x = log(BigFloat::of(r.height_sq, prec)) / BigFloat::of(2L, prec);
      const BigFloat y = r.ratio.round_to(prec) * x;
      xbar = xbar + x;
      ybar = ybar + y;
      xs.push_back(x);
      ys.push_back(y);
    }
    const BigFloat mm = BigFloat::of(static_cast<long>(m), prec);
    xbar = xbar / mm;
    ybar = ybar / mm;
    BigFloat num(prec), den(prec);
    for (std::size_t i = 0; i < m; ++i) {
      num = num + (xs[i] - xbar) * (ys[i] - ybar);
      den = den + (xs[i] - xbar) * (xs[i] - xbar);
    }
    est.lsq_slope = num / den;
  } else {
    est.lsq_slope = est.last_ratio;
  }
  const BigFloat target_f = BigFloat::of(est.target, prec);
  est.rel_gap = abs(est.last_ratio.round_to(prec) - target_f) / target_f;
  return est;
}

// ---------------------------------------------------------------------------
// Lemma verification.
// ---------------------------------------------------------------------------
namespace {

std::string window_detail(double lo, double hi) {
  std::ostringstream os;
  os.precision(6);
  os << "min=" << lo << " max=" << hi << " spread=" << (lo > 0 ? hi / lo : 0.0);
  return os.str();
}

}  // namespace

VerifyReport verify_lemmas(const ConstructionParams& p, const std::vector<int>& n_levels,
                           std::uint64_t seed) {
  VerifyReport rep;
  auto add = [&](const std::string& name, bool pass, const std::string& detail = "") {
    rep.checks.push_back({name, pass, detail});
  };
  const int n_max = *std::max_element(n_levels.begin(), n_levels.end());
  const DigitTable tbl(p);

  // Digit table: support uniqueness, value range, per-(i,N) support pair.
  {
    bool ok = true;
    std::string detail;
    const int k_hi = 3 * p.qd() + n_max + p.q + 2;
    for (int k = 0; k <= k_hi && ok; ++k)
      for (int j = 1; j <= p.d && ok; ++j) {
        int hits = 0;
        for (int i = 0; i < p.qd(); ++i) {
          const int u = tbl.u(i, j, k);
          if (u == 0) continue;
          ++hits;
          if (i != tbl.phi(j, k) || (u != 2 && u != 3)) {
            ok = false;
            detail = "bad digit at i=" + std::to_string(i) + " j=" + std::to_string(j) +
                     " k=" + std::to_string(k);
          }
        }
        if (ok && hits != 1) {
          ok = false;
          detail = "support count " + std::to_string(hits) + " at j=" + std::to_string(j) +
                   " k=" + std::to_string(k);
        }
      }
    for (int i = 0; i < p.qd() && ok; ++i)
      for (int nn = 0; nn <= 2 * p.qd() && ok; ++nn) {
        int hits = 0;
        for (int k = 0; k < p.q; ++k)
          for (int j = 1; j <= p.d; ++j)
            if (tbl.u(i, j, nn + k) != 0) ++hits;
        if (hits != 1) {
          ok = false;
          detail = "support pair not unique at i=" + std::to_string(i) + " N=" + std::to_string(nn);
        }
      }
    add("digit_table", ok, detail);
  }

  // Exact recurrence X_{N+1} = theta^(...) X_N + U_{N+1}.
  {
    bool ok = true;
    for (int j = 1; j <= p.d && ok; ++j)
      for (int nn = 0; nn <= n_max + p.q && ok; ++nn) {
        const IVec x0 = construction::x_vec(nn, j, p);
        const IVec x1 = construction::x_vec(nn + 1, j, p);
        const IVec u1 = construction::u_vec(nn + 1, j, p);
        const ExactInt diff = floor_pow(p.alpha, nn + 1) - floor_pow(p.alpha, nn);
        const ExactInt fac = int_pow(p.theta, diff.get_ui());
        for (int i = 0; i < p.n; ++i)
          if (x1[i] != fac * x0[i] + u1[i]) ok = false;
      }
    add("recurrence_X", ok);
  }

  // Norm window for X_N.
  {
    double lo = 1e300, hi = 0;
    for (int j = 1; j <= p.d; ++j)
      for (int nn = 0; nn <= n_max + 1; ++nn) {
        const IVec x = construction::x_vec(nn, j, p);
        ExactInt n2(0);
        for (const auto& c : x) n2 += c * c;
        const BigFloat r2 = BigFloat::of(n2, 2048) /
                            pow_rat_exponent(p.theta, 2 * rat_pow(p.alpha, nn), 2048);
        const double r = std::sqrt(r2.to_double());
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
    add("norm_X_window", hi > 0 && hi / lo < 100.0, window_detail(lo, hi));
  }

  // Z-basis lemma for B_{N,v}, all v in [1,q].
  for (int v = 1; v <= p.q; ++v) {
    bool ok = true;
    std::string detail;
    for (int nn : n_levels) {
      const auto b = b_subspace(nn, v, p);
      if (b.space.dim() != p.d * v) {
        ok = false;
        detail = "dim mismatch at N=" + std::to_string(nn);
        break;
      }
      if (lattice::hnf_columns(b.claimed_zbasis, false).h != b.space.zbasis()) {
        ok = false;
        detail = "claimed basis is not a Z-basis at N=" + std::to_string(nn);
        break;
      }
    }
    add("zbasis_B[v=" + std::to_string(v) + "]", ok, detail);
  }

  // Z-basis lemma for D_{N,e}.
  for (int e = 1; e <= p.d; ++e) {
    bool ok = true;
    for (int nn : n_levels) {
      const auto dsub = d_subspace(nn, e, p);
      ok = ok && dsub.space.dim() == e &&
           lattice::hnf_columns(dsub.claimed_zbasis, false).h == dsub.space.zbasis();
    }
    add("zbasis_D[e=" + std::to_string(e) + "]", ok);
  }

  // C_{N,e}: dimension, Z-basis, inclusion chain, r_e = 0 collapse.
  for (int e = p.d; e <= p.qd(); ++e) {
    const auto [qe, re] = p.qe_re(e);
    bool ok = true;
    std::string detail;
    for (int nn : n_levels) {
      const auto c = c_subspace(nn, e, p);
      if (c.space.dim() != e) {
        ok = false;
        detail = "dim(C) != e at N=" + std::to_string(nn);
        break;
      }
      if (lattice::hnf_columns(c.claimed_zbasis, false).h != c.space.zbasis()) {
        ok = false;
        detail = "claimed basis not a Z-basis at N=" + std::to_string(nn);
        break;
      }
      const auto b_low = b_subspace(nn + 1, qe, p);
      const auto b_high = b_subspace(nn, qe + 1, p);
      if (!c.space.contains(b_low.space) || !b_high.space.contains(c.space)) {
        ok = false;
        detail = "inclusion chain broken at N=" + std::to_string(nn);
        break;
      }
      if (re == 0 && !(c.space.zbasis() == b_low.space.zbasis())) {
        ok = false;
        detail = "C != B_{N+1,q_e} with r_e = 0 at N=" + std::to_string(nn);
        break;
      }
    }
    add("subspace_C[e=" + std::to_string(e) + "]", ok, detail);
  }

  // Height windows.
  for (int e = p.d; e <= p.qd(); ++e) {
    const auto [qe, re] = p.qe_re(e);
    bool exact_ok = true;
    double lo = 1e300, hi = 0;
    for (int nn : n_levels) {
      const auto c = c_subspace(nn, e, p);
      const ExactInt expo =
          ExactInt(re) * floor_pow(p.alpha, nn) + ExactInt(p.d - re) * floor_pow(p.alpha, nn + 1);
      exact_ok = exact_ok && int_pow(p.theta, 2 * expo.get_ui()) <= c.space.height_sq();
      const ExactRat real_expo =
          ExactRat(re) * rat_pow(p.alpha, nn) + ExactRat(p.d - re) * rat_pow(p.alpha, nn + 1);
      const BigFloat r2 = BigFloat::of(c.space.height_sq(), 8192) /
                          pow_rat_exponent(p.theta, 2 * real_expo, 8192);
      const double r = std::sqrt(r2.to_double());
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    add("height_window_C[e=" + std::to_string(e) + "]", exact_ok && hi / lo < 4.0,
        window_detail(lo, hi));
  }
  for (int e = 1; e <= p.d; ++e) {
    bool exact_ok = true;
    double lo = 1e300, hi = 0;
    for (int nn : n_levels) {
      const auto dsub = d_subspace(nn, e, p);
      const ExactInt expo = ExactInt(e) * floor_pow(p.alpha, nn);
      exact_ok = exact_ok && int_pow(p.theta, 2 * expo.get_ui()) <= dsub.space.height_sq();
      const BigFloat r2 = BigFloat::of(dsub.space.height_sq(), 8192) /
                          pow_rat_exponent(p.theta, 2 * ExactRat(e) * rat_pow(p.alpha, nn), 8192);
      const double r = std::sqrt(r2.to_double());
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    add("height_window_D[e=" + std::to_string(e) + "]", exact_ok && hi / lo < 4.0,
        window_detail(lo, hi));
  }

  // omega(Y_j, Z_N^j) <= c theta^(-alpha^(N+1)) with stable measured constant.
  {
    const long bits = p.precision_budget(n_max).bits;
    const auto model = a_truncated(p, n_max);
    double lo = 1e300, hi = 0;
    bool ok = true;
    for (int j = 1; j <= p.d; ++j)
      for (int nn : n_levels) {
        const auto [w2, w] = angles::omega(model.basis.col(j - 1), construction::z_vec(nn, j, p),
                                           bits);
        const BigFloat scale = pow_rat_exponent(p.theta, rat_pow(p.alpha, nn + 1), bits);
        const double c = (w * scale).to_double();
        if (c <= 0) ok = false;
        lo = std::min(lo, c);
        hi = std::max(hi, c);
      }
    add("omega_Y_Z_window", ok && hi / lo < 100.0, window_detail(lo, hi));
  }

  // psi_1(span(Y_1), C_{N,e}) stays within a stable factor of
  // theta^(-alpha^(N+q_e+1)).
  {
    const long bits = p.precision_budget(n_max).bits;
    const auto model = a_truncated(p, n_max);
    QMat y1(p.n, 1);
    for (int i = 0; i < p.n; ++i) y1(i, 0) = model.basis(i, 0);
    for (int e = p.d; e <= p.qd(); ++e) {
      const auto [qe, re] = p.qe_re(e);
      double lo = 1e300, hi = 0;
      bool ok = true;
      for (int nn : n_levels) {
        const auto c = c_subspace(nn, e, p);
        const auto arep = angles::psi_profile(y1, to_rational(c.space.zbasis()), bits);
        const BigFloat scale =
            pow_rat_exponent(p.theta, rat_pow(p.alpha, nn + qe + 1), bits);
        const double cc = (arep.psi.at(0) * scale).to_double();
        if (cc <= 0) ok = false;
        lo = std::min(lo, cc);
        hi = std::max(hi, cc);
      }
      add("psi1_Y1_C_window[e=" + std::to_string(e) + "]", ok && hi / lo < 100.0,
          window_detail(lo, hi));
    }
  }

  // Ideal norm of the concatenated basis of B_{N+1,v} + W, W sampled inside
  // span(X_N^1..X_N^d): N(I) <= 6^(2d), and the height lower bound with the
  // explicit constant 6^(-2d) theta^(r fl(a^N) + (d-r) fl(a^(N+1))).
  {
    bool ok = true;
    std::string detail;
    int tested = 0;
    ExactInt max_ni(0);
    if (p.q >= 2) {
      SplitMix64 rng(seed ^ 0x9d2c5680u);
      const ExactInt cap = int_pow(6, 2 * p.d);
      for (int v = 1; v <= p.q - 1 && ok; ++v)
        for (int r = 0; r <= p.d - 1 && ok; ++r)
          for (int nn : n_levels) {
            if (!ok) break;
            for (int s = 0; s < (r == 0 ? 1 : 10) && ok; ++s) {
              // W = X_N * coef with integer coefficients in [-3,3], rank r.
              IMat xn(p.n, p.d);
              for (int j = 1; j <= p.d; ++j) {
                const IVec x = construction::x_vec(nn, j, p);
                for (int i = 0; i < p.n; ++i) xn(i, j - 1) = x[i];
              }
              IMat w_span;
              if (r > 0) {
                IMat coef(p.d, r);
                int tries = 0;
                do {
                  for (int i = 0; i < p.d; ++i)
                    for (int c = 0; c < r; ++c) coef(i, c) = rng.range(-3, 3);
                  if (++tries > 200) throw Error("verify: cannot sample full-rank W");
                } while (q_rank(to_rational(coef)) != static_cast<std::size_t>(r));
                w_span = xn * coef;
              }
              const auto b = b_subspace(nn + 1, v, p);
              const int total = p.d * v + r;
              IMat concat(p.n, total);
              for (int i = 0; i < p.n; ++i)
                for (std::size_t c = 0; c < b.claimed_zbasis.cols(); ++c)
                  concat(i, c) = b.claimed_zbasis(i, c);
              if (r > 0) {
                const IMat wz = lattice::z_basis(w_span);
                for (int i = 0; i < p.n; ++i)
                  for (int c = 0; c < r; ++c) concat(i, p.d * v + c) = wz(i, c);
              }
              const auto s_sum = RationalSubspace::from_integer_span(concat);
              if (s_sum.dim() != total) {
                ok = false;
                detail = "B + W is not a direct sum";
                break;
              }
              const ExactInt ni = lattice::ideal_norm(concat, s_sum);
              if (ni > max_ni) max_ni = ni;
              if (ni > cap) {
                ok = false;
                detail = "N(I) = " + ni.get_str() + " exceeds 6^(2d)";
                break;
              }
              const ExactInt expo = ExactInt(r) * floor_pow(p.alpha, nn) +
                                    ExactInt(p.d - r) * floor_pow(p.alpha, nn + 1);
              ExactInt lower = int_pow(p.theta, 2 * expo.get_ui());
              // H^2 * 6^(4d) >= theta^(2 expo), exactly.
              if (s_sum.height_sq() * int_pow(6, 4 * p.d) < lower) {
                ok = false;
                detail = "height lower bound fails";
                break;
              }
              ++tested;
            }
          }
      if (ok) detail = "samples=" + std::to_string(tested) + " max N(I)=" + max_ni.get_str();
    } else {
      detail = "no admissible v (q = 1); vacuous";
    }
    add("ideal_norm_sum", ok, detail);
  }

  return rep;
}

std::string VerifyReport::to_text(const ConstructionParams& p) const {
  std::ostringstream os;
  os << "# construction verification report\n";
  os << "params: " << p.to_json() << "\n";
  for (const auto& c : checks) {
    os << "check " << c.name << ": " << (c.pass ? "PASS" : "FAIL");
    if (!c.detail.empty()) os << " (" << c.detail << ")";
    os << "\n";
  }
  std::size_t npass = 0;
  for (const auto& c : checks) npass += c.pass ? 1 : 0;
  os << "result: " << (all_pass() ? "PASS" : "FAIL") << " (" << npass << "/" << checks.size()
     << ")\n";
  return os.str();
}

std::string VerifyReport::to_json(const ConstructionParams& p) const {
  nlohmann::ordered_json j;
  j["params"] = nlohmann::ordered_json::parse(p.to_json());
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["pass"] = c.pass;
    e["detail"] = c.detail;
    arr.push_back(e);
  }
  j["checks"] = arr;
  j["result"] = all_pass() ? "PASS" : "FAIL";
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// N selection from a target height.
// ---------------------------------------------------------------------------
namespace {

// Finds k >= 0 with alpha^k <= lam < alpha^(k+1), where lam is only known as
// x * ln(H)/(den * ln(theta)); retries at doubled precision when the value
// sits too close to a power of alpha to decide.
SelectResult sandwich_exponent(const BigFloat& height, const ExactRat& x, const ExactRat& den,
                               const ConstructionParams& p) {
  if (x <= 0) throw Error("select_n: nonpositive exponent (invalid parameters)");
  if (!(height > BigFloat::of(1L, 64))) return {false, 0, "H too small (H <= 1)"};
  long prec = std::max(height.prec(), 128L);
  for (int attempt = 0; attempt < 5; ++attempt, prec *= 2) {
    const BigFloat ln_h_lo = log(height.round_to(prec), MPFR_RNDD);
    const BigFloat ln_h_hi = log(height.round_to(prec), MPFR_RNDU);
    const BigFloat ln_t_lo = log(BigFloat::of(p.theta, prec), MPFR_RNDD);
    const BigFloat ln_t_hi = log(BigFloat::of(p.theta, prec), MPFR_RNDU);
    const BigFloat num_lo = BigFloat::mul(BigFloat::of(x, prec, MPFR_RNDD), ln_h_lo, MPFR_RNDD);
    const BigFloat num_hi = BigFloat::mul(BigFloat::of(x, prec, MPFR_RNDU), ln_h_hi, MPFR_RNDU);
    const BigFloat den_lo = BigFloat::mul(BigFloat::of(den, prec, MPFR_RNDD), ln_t_lo, MPFR_RNDD);
    const BigFloat den_hi = BigFloat::mul(BigFloat::of(den, prec, MPFR_RNDU), ln_t_hi, MPFR_RNDU);
    const BigFloat lam_lo = BigFloat::div(num_lo, den_hi, MPFR_RNDD);
    const BigFloat lam_hi = BigFloat::div(num_hi, den_lo, MPFR_RNDU);
    if (BigFloat::of(ExactRat(1), prec, MPFR_RNDU) > lam_hi)
      return {false, 0, "H too small (below the first sandwich window)"};
    if (lam_lo.sgn() <= 0) continue;  // interval too loose
    // largest k with alpha^k <= lam, certified from both ends
    int k = 0;
    bool decided = false;
    for (; k < 4096; ++k) {
      const ExactRat ak1 = rat_pow(p.alpha, k + 1);
      const bool above_lo = BigFloat::of(ak1, prec, MPFR_RNDU) <= lam_lo;   // alpha^(k+1) <= lam
      const bool beyond_hi = BigFloat::of(ak1, prec, MPFR_RNDD) > lam_hi;   // lam < alpha^(k+1)
      if (above_lo) continue;
      if (beyond_hi) {
        decided = true;
        break;
      }
      break;  // straddles: retry at higher precision
    }
    if (decided) {
      // also certify alpha^k <= lam
      if (BigFloat::of(rat_pow(p.alpha, k), prec, MPFR_RNDU) <= lam_lo || k == 0) {
        if (k == 0 && !(BigFloat::of(ExactRat(1), prec) <= lam_lo)) continue;
        return {true, k, ""};
      }
    }
  }
  throw PrecisionError("select_n: height sits on a sandwich boundary");
}

}  // namespace

SelectResult select_n_large_e(const BigFloat& height, const ExactRat& eps,
                              const ConstructionParams& p, int e) {
  if (e < p.d || e > p.qd()) throw Error("select_n_large_e: e out of range");
  if (eps <= 0) throw Error("select_n_large_e: eps must be > 0");
  const auto [qe, re] = p.qe_re(e);
  const ExactRat x = theorem_mu(p, e) + eps / 2 - 1;
  auto res = sandwich_exponent(height, x, ExactRat(1), p);
  if (!res.ok) return res;
  const int n_level = res.n_level - qe;
  if (n_level < 0) return {false, n_level, "H too small for this family"};
  return {true, n_level, ""};
}

SelectResult select_n_small_e(const BigFloat& height, const ExactRat& eps,
                              const ConstructionParams& p, int e) {
  if (e < 1 || e > p.d) throw Error("select_n_small_e: e out of range");
  if (eps <= 0) throw Error("select_n_small_e: eps must be > 0");
  const ExactRat x = (p.alpha - 1) / e + eps / 2;
  return sandwich_exponent(height, x, ExactRat(p.d), p);
}

// ---------------------------------------------------------------------------
// Exhaustive short-vector enumeration (exact Fincke-Pohst).
// ---------------------------------------------------------------------------
namespace {

// Rational s >= sqrt(q) for q >= 0.
ExactRat sqrt_upper(const ExactRat& q) {
  if (q < 0) throw Error("sqrt_upper: negative");
  const ExactInt prod = q.get_num() * q.get_den();
  ExactInt root;
  mpz_sqrt(root.get_mpz_t(), prod.get_mpz_t());
  return make_rat(root + 1, q.get_den());
}

ExactInt floor_rat(const ExactRat& q) {
  ExactInt r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return r;
}
ExactInt ceil_rat(const ExactRat& q) {
  ExactInt r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return r;
}

struct Enumerator {
  const QMat& l;
  const QVec& diag;
  const IMat& basis;
  long long nodes = 0;
  ExactRat radius_sq;
  bool found = false;
  IVec best_coeff;
  ExactRat best_norm;

  void run(int level, IVec& coeff, const ExactRat& rem) {
    if (level < 0) {
      bool zero = true;
      for (const auto& c : coeff) zero = zero && c == 0;
      if (zero) return;
      const ExactRat norm = radius_sq - rem;  // accumulated quadratic form
      if (!found || norm < best_norm) {
        found = true;
        best_norm = norm;
        best_coeff = coeff;
      }
      return;
    }
    // center = sum_{j>level} L(j,level) x_j
    ExactRat center(0);
    for (std::size_t j = level + 1; j < coeff.size(); ++j)
      center += l(j, level) * ExactRat(coeff[j]);
    const ExactRat s = sqrt_upper(rem / diag[level]);
    const ExactInt lo = ceil_rat(-center - s);
    const ExactInt hi = floor_rat(-center + s);
    for (ExactInt x = lo; x <= hi; ++x) {
      if (++nodes > 10000000LL) throw Error("shortest_vector_enum: enumeration volume exceeded");
      const ExactRat off = ExactRat(x) + center;
      const ExactRat used = diag[level] * off * off;
      if (used > rem) continue;
      coeff[static_cast<std::size_t>(level)] = x;
      run(level - 1, coeff, rem - used);
      coeff[static_cast<std::size_t>(level)] = 0;
    }
  }
};

}  // namespace

ShortestVector shortest_vector_enum(const IMat& basis, const ExactRat& radius_sq) {
  const std::size_t rank = basis.cols();
  if (rank == 0 || rank > 4) throw Error("shortest_vector_enum: rank must be in [1,4]");
  if (radius_sq <= 0) throw Error("shortest_vector_enum: radius must be positive");
  const QMat q = to_rational(basis);
  const QMat g = q.transpose() * q;
  // LDL^T with unit lower triangular L.
  QMat l = QMat::identity(rank);
  QVec diag(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    ExactRat di = g(i, i);
    for (std::size_t k = 0; k < i; ++k) di -= l(i, k) * l(i, k) * diag[k];
    if (di <= 0) throw Error("shortest_vector_enum: basis not full rank");
    diag[i] = di;
    for (std::size_t j = i + 1; j < rank; ++j) {
      ExactRat v = g(j, i);
      for (std::size_t k = 0; k < i; ++k) v -= l(j, k) * l(i, k) * diag[k];
      l(j, i) = v / di;
    }
  }
  Enumerator en{l, diag, basis, 0, radius_sq, false, IVec(rank, ExactInt(0)), ExactRat(0)};
  IVec coeff(rank, ExactInt(0));
  en.run(static_cast<int>(rank) - 1, coeff, radius_sq);
  ShortestVector out;
  out.nodes = en.nodes;
  if (!en.found) return out;
  out.found = true;
  out.vec = IVec(basis.rows(), ExactInt(0));
  for (std::size_t i = 0; i < basis.rows(); ++i)
    for (std::size_t j = 0; j < rank; ++j) out.vec[i] += basis(i, j) * en.best_coeff[j];
  ExactInt n2(0);
  for (const auto& c : out.vec) n2 += c * c;
  out.norm_sq = n2;
  return out;
}

ShortestVector shortest_vector_enum(const RationalSubspace& s, const ExactRat& radius_sq) {
  return shortest_vector_enum(s.zbasis(), radius_sq);
}

// ---------------------------------------------------------------------------
// n = 2 best approximation scan.
// ---------------------------------------------------------------------------
BestApproxTable best_approx_enum_n2(const ExactRat& sigma_hat, const ExactRat& sigma_err,
                                    const ExactRat& alpha, long q_max) {
  if (q_max < 1 || q_max > 100000) throw Error("best_approx_enum_n2: q_max out of range");
  if (sigma_err < 0) throw Error("best_approx_enum_n2: negative error bound");
  // Guard: |sigma - sigma_hat| < q_max^(-alpha-2).
  const unsigned long pa = alpha.get_num().get_ui();
  const unsigned long ra = alpha.get_den().get_ui();
  const ExactRat lhs = rat_pow(sigma_err, ra) * ExactRat(int_pow(ExactInt(q_max), pa + 2 * ra));
  if (!(lhs < 1))
    throw InfeasibleError("best_approx_enum_n2: sigma_hat precision insufficient for q_max");
  BestApproxTable table;
  ExactRat best(2);  // any error is below 2
  for (long b = 1; b <= q_max; ++b) {
    const ExactRat t = sigma_hat * b;
    const ExactInt fl = floor_rat(t);
    ExactInt a = fl;
    const ExactRat d0 = t - ExactRat(fl);
    if (d0 > make_rat(1, 2)) a = fl + 1;
    ExactRat err = sigma_hat - make_rat(a, b);
    if (err < 0) err = -err;
    if (err < best) {
      best = err;
      table.records.push_back({b, a, err});
    }
    // err >= b^(-9/2)  <=>  err^2 b^9 >= 1. b = 1 is excluded: every number
    // sits within 1/2 of an integer, which says nothing about the exponent.
    if (b > 1 && err * err * ExactRat(int_pow(ExactInt(b), 9)) < 1) table.no_fast_approx = false;
  }
  return table;
}

// ---------------------------------------------------------------------------
// Export.
// ---------------------------------------------------------------------------
std::string exponents_csv(const ConstructionParams& p, const std::vector<ExponentEstimate>& ests) {
  std::ostringstream os;
  os << "d,q,theta,alpha,e,N,height_sq,psi_hex,ratio,target,rel_gap\n";
  auto sorted = ests;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ExponentEstimate& a, const ExponentEstimate& b) { return a.e < b.e; });
  for (const auto& est : sorted) {
    const BigFloat target_f = BigFloat::of(est.target, 256);
    for (const auto& r : est.rows) {
      const BigFloat row_gap = abs(r.ratio.round_to(256) - target_f) / target_f;
      os << p.d << ',' << p.q << ',' << p.theta.get_str() << ',' << rat_to_string(p.alpha) << ','
         << r.e << ',' << r.n_level << ',' << r.height_sq.get_str() << ',' << r.psi_last.hex()
         << ',' << r.ratio.dec(12) << ',' << rat_to_string(est.target) << ','
         << row_gap.dec(6) << "\n";
    }
  }
  return os.str();
}

std::string exponents_json(const ConstructionParams& p,
                           const std::vector<ExponentEstimate>& ests) {
  nlohmann::ordered_json j;
  j["params"] = nlohmann::ordered_json::parse(p.to_json());
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  auto sorted = ests;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ExponentEstimate& a, const ExponentEstimate& b) { return a.e < b.e; });
  for (const auto& est : sorted) {
    nlohmann::ordered_json ej;
    ej["e"] = est.e;
    ej["family"] = est.family == Family::C ? "C" : "D";
    ej["target"] = rat_to_string(est.target);
    ej["last_ratio"] = est.last_ratio.dec(12);
    ej["lsq_slope"] = est.lsq_slope.dec(12);
    ej["rel_gap"] = est.rel_gap.dec(6);
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : est.rows) {
      nlohmann::ordered_json rj;
      rj["N"] = r.n_level;
      rj["height_sq"] = r.height_sq.get_str();
      rj["psi_hex"] = r.psi_last.hex();
      rj["psi_error"] = r.psi_error.hex();
      rj["ratio"] = r.ratio.dec(12);
      rows.push_back(rj);
    }
    ej["rows"] = rows;
    arr.push_back(ej);
  }
  j["estimates"] = arr;
  return j.dump(2) + "\n";
}

}  // namespace dioph::experiments
