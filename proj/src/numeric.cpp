#include "dioph/numeric.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>

namespace dioph {

ExactRat make_rat(const ExactInt& num, const ExactInt& den) {
  if (den == 0) throw Error("rational with zero denominator");
  ExactRat q(num, den);
  q.canonicalize();
  return q;
}

ExactRat rat_from_string(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) {
    return make_rat(ExactInt(s), 1);
  }
  return make_rat(ExactInt(s.substr(0, slash)), ExactInt(s.substr(slash + 1)));
}

std::string rat_to_string(const ExactRat& x) {
  if (x.get_den() == 1) return x.get_num().get_str();
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

ExactRat rat_pow(const ExactRat& x, unsigned long k) {
  ExactInt num, den;
  mpz_pow_ui(num.get_mpz_t(), x.get_num().get_mpz_t(), k);
  mpz_pow_ui(den.get_mpz_t(), x.get_den().get_mpz_t(), k);
  return make_rat(num, den);
}

ExactInt floor_pow(const ExactRat& alpha, unsigned long k) {
  if (alpha <= 1) throw InfeasibleError("floor_pow: alpha must be > 1");
  ExactInt num, den, q;
  mpz_pow_ui(num.get_mpz_t(), alpha.get_num().get_mpz_t(), k);
  mpz_pow_ui(den.get_mpz_t(), alpha.get_den().get_mpz_t(), k);
  mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return q;
}

ExactInt int_pow(const ExactInt& base, unsigned long e) {
  ExactInt r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

PrecisionBudget required_precision(const ExactRat& alpha, const ExactInt& theta,
                                   int trunc_order_m, int q, int n_max) {
  if (alpha <= 1) throw InfeasibleError("required_precision: alpha must be > 1");
  if (trunc_order_m < 0) throw InfeasibleError("required_precision: M must be >= 0");
  const long scratch = 256;
  const ExactRat am1 = rat_pow(alpha, static_cast<unsigned long>(trunc_order_m) + 1);
  BigFloat x = BigFloat::of(am1, scratch, MPFR_RNDU);
  BigFloat l2t = log2(BigFloat::of(theta, scratch, MPFR_RNDU), MPFR_RNDU);
  BigFloat prod = BigFloat::mul(x, l2t, MPFR_RNDU);
  mpfr_t ceil_v;
  mpfr_init2(ceil_v, scratch);
  mpfr_ceil(ceil_v, prod.raw());
  if (!mpfr_fits_slong_p(ceil_v, MPFR_RNDN)) {
    mpfr_clear(ceil_v);
    throw InfeasibleError("required_precision: parameters infeasible at desk scale");
  }
  long c = mpfr_get_si(ceil_v, MPFR_RNDN);
  mpfr_clear(ceil_v);
  if (c < 0 || c > ((1L << 30) - 16)) {
    throw InfeasibleError("required_precision: parameters infeasible at desk scale");
  }
  long bits = 16 + 2 * c;
  PrecisionBudget b;
  b.derivation = "dominant term alpha^(M+1)*log2(theta) with M=" + std::to_string(trunc_order_m);
  if (bits < 64) {
    bits = 64;
    b.derivation += ", clamped to 64";
  }
  if (bits > (1L << 31)) {
    throw InfeasibleError("required_precision: parameters infeasible at desk scale");
  }
  // Note whether the budget certifiably covers the smallest measured angle,
  // of order theta^{-alpha^{n_max+q+1}}, with 32 guard bits.
  if (n_max >= 0 && q >= 0) {
    const ExactRat small = rat_pow(alpha, static_cast<unsigned long>(n_max + q + 1));
    BigFloat p2 = BigFloat::mul(BigFloat::of(small, scratch, MPFR_RNDU), l2t, MPFR_RNDU);
    BigFloat need = BigFloat::add(BigFloat::mul(p2, BigFloat::of(2L, scratch), MPFR_RNDU),
                                  BigFloat::of(32L, scratch), MPFR_RNDU);
    if (BigFloat::of(bits, scratch) < need) {
      b.derivation += "; WARNING: below 2*alpha^(N_max+q+1)*log2(theta)+32";
    }
  }
  b.bits = bits;
  return b;
}

std::string BigFloat::hex() const {
  char* s = nullptr;
  mpfr_asprintf(&s, "%Ra", v_);
  std::string out(s);
  mpfr_free_str(s);
  return out;
}

std::string BigFloat::dec(int digits) const {
  char* s = nullptr;
  mpfr_asprintf(&s, "%.*Re", digits, v_);
  std::string out(s);
  mpfr_free_str(s);
  return out;
}

std::string BigFloat::fixed(int digits) const {
  char* s = nullptr;
  mpfr_asprintf(&s, "%.*Rf", digits, v_);
  std::string out(s);
  mpfr_free_str(s);
  return out;
}

BigFloat pow_rat_exponent(const ExactInt& theta, const ExactRat& x, long prec, mpfr_rnd_t rnd) {
  if (theta <= 1) throw Error("pow_rat_exponent: base must be > 1");
  // Directional care: for an upper bound of theta^x we need an upper bound of
  // x*ln(theta); ln(theta) > 0, so round it away from the exact value in the
  // direction matching sgn(x).
  const long work = prec + 64;
  mpfr_rnd_t ln_rnd = MPFR_RNDN;
  if (rnd == MPFR_RNDU) ln_rnd = sgn(x) >= 0 ? MPFR_RNDU : MPFR_RNDD;
  if (rnd == MPFR_RNDD) ln_rnd = sgn(x) >= 0 ? MPFR_RNDD : MPFR_RNDU;
  BigFloat lt = log(BigFloat::of(theta, work, MPFR_RNDN), ln_rnd);
  BigFloat xf = BigFloat::of(x, work, rnd);
  BigFloat prod = BigFloat::mul(xf, lt, rnd);
  BigFloat r = exp(prod, rnd);
  return r.round_to(prec, rnd);
}

QMat to_rational(const IMat& m) {
  QMat q(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) q(i, j) = ExactRat(m(i, j));
  return q;
}

std::pair<IMat, std::vector<ExactInt>> clear_denominators(const QMat& m) {
  IMat out(m.rows(), m.cols());
  std::vector<ExactInt> scales(m.cols(), ExactInt(1));
  for (std::size_t j = 0; j < m.cols(); ++j) {
    ExactInt l(1);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      ExactInt g;
      mpz_lcm(g.get_mpz_t(), l.get_mpz_t(), m(i, j).get_den().get_mpz_t());
      l = g;
    }
    for (std::size_t i = 0; i < m.rows(); ++i) {
      ExactRat v = m(i, j) * ExactRat(l);
      if (v.get_den() != 1) throw Error("clear_denominators: internal");
      out(i, j) = v.get_num();
    }
    scales[j] = l;
  }
  return {out, scales};
}

namespace {

// Row echelon over Q in place; returns pivot columns. Deterministic: picks
// the first row with a nonzero entry as pivot.
std::vector<std::size_t> q_echelon(QMat& m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && m(p, c) == 0) ++p;
    if (p == m.rows()) continue;
    if (p != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(r, j), m(p, j));
    const ExactRat inv = ExactRat(1) / m(r, c);
    for (std::size_t j = c; j < m.cols(); ++j) m(r, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c) == 0) continue;
      const ExactRat f = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace

std::size_t q_rank(QMat m) { return q_echelon(m).size(); }

bool q_solve(const QMat& a, const QMat& rhs, QMat& x) {
  if (a.rows() != rhs.rows()) throw Error("q_solve: shape mismatch");
  QMat aug(a.rows(), a.cols() + rhs.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
    for (std::size_t j = 0; j < rhs.cols(); ++j) aug(i, a.cols() + j) = rhs(i, j);
  }
  const auto pivots = q_echelon(aug);
  // Any pivot in the rhs block means inconsistency.
  for (auto p : pivots)
    if (p >= a.cols()) return false;
  x = QMat(a.cols(), rhs.cols());
  for (std::size_t k = 0; k < pivots.size(); ++k)
    for (std::size_t j = 0; j < rhs.cols(); ++j) x(pivots[k], j) = aug(k, a.cols() + j);
  return true;
}

QMat q_inverse(const QMat& a) {
  if (a.rows() != a.cols()) throw Error("q_inverse: not square");
  QMat x;
  if (!q_solve(a, QMat::identity(a.rows()), x) || q_rank(a) != a.rows())
    throw Error("q_inverse: singular matrix");
  return x;
}

QMat q_nullspace(const QMat& a) {
  QMat m = a;
  const auto pivots = q_echelon(m);
  std::vector<bool> is_pivot(a.cols(), false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<std::size_t> free_cols;
  for (std::size_t j = 0; j < a.cols(); ++j)
    if (!is_pivot[j]) free_cols.push_back(j);
  QMat ns(a.cols(), free_cols.size());
  for (std::size_t k = 0; k < free_cols.size(); ++k) {
    const std::size_t f = free_cols[k];
    ns(f, k) = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) ns(pivots[r], k) = -m(r, f);
  }
  return ns;
}

ExactInt bareiss_det(IMat m) {
  if (m.rows() != m.cols()) throw Error("bareiss_det: not square");
  const std::size_t n = m.rows();
  if (n == 0) return ExactInt(1);
  ExactInt prev(1);
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && m(p, k) == 0) ++p;
      if (p == n) return ExactInt(0);
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        ExactInt t = m(i, j) * m(k, k) - m(i, k) * m(k, j);
        mpz_divexact(m(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      m(i, k) = 0;
    }
    prev = m(k, k);
  }
  return sign > 0 ? m(n - 1, n - 1) : ExactInt(-m(n - 1, n - 1));
}

ExactInt laplace_det(const IMat& m) {
  if (m.rows() != m.cols()) throw Error("laplace_det: not square");
  const std::size_t n = m.rows();
  if (n == 0) return ExactInt(1);
  if (n == 1) return m(0, 0);
  if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  ExactInt acc(0);
  for (std::size_t j = 0; j < n; ++j) {
    if (m(0, j) == 0) continue;
    IMat sub(n - 1, n - 1);
    for (std::size_t i = 1; i < n; ++i) {
      std::size_t cc = 0;
      for (std::size_t c = 0; c < n; ++c) {
        if (c == j) continue;
        sub(i - 1, cc++) = m(i, c);
      }
    }
    const ExactInt term = m(0, j) * laplace_det(sub);
    if (j % 2 == 0)
      acc += term;
    else
      acc -= term;
  }
  return acc;
}

ExactRat q_det(QMat m) {
  if (m.rows() != m.cols()) throw Error("q_det: not square");
  const std::size_t n = m.rows();
  ExactRat det(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m(p, c) == 0) ++p;
    if (p == n) return ExactRat(0);
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(c, j), m(p, j));
      det = -det;
    }
    det *= m(c, c);
    const ExactRat inv = ExactRat(1) / m(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      if (m(i, c) == 0) continue;
      const ExactRat f = m(i, c) * inv;
      for (std::size_t j = c; j < n; ++j) m(i, j) -= f * m(c, j);
    }
  }
  return det;
}

std::uint64_t hash_mix(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
  SplitMix64 s(a ^ 0x243f6a8885a308d3ULL);
  s.state ^= s.next() + b;
  s.state ^= s.next() + c;
  s.state ^= s.next() + d;
  return s.next();
}

}  // namespace dioph
