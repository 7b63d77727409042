#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dioph {

// Exact arbitrary-precision integers and rationals. Rationals are kept in
// lowest terms with positive denominator (GMP canonical form).
using ExactInt = mpz_class;
using ExactRat = mpq_class;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Configuration / parameter problems (CLI exit code 2).
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& msg) : Error(msg) {}
};

// A certified-precision computation failed its stability re-run.
class PrecisionError : public Error {
 public:
  explicit PrecisionError(const std::string& msg) : Error(msg) {}
};

ExactRat make_rat(const ExactInt& num, const ExactInt& den);
ExactRat rat_from_string(const std::string& s);  // "p" or "p/q"
std::string rat_to_string(const ExactRat& x);

// x^k for rational x, exact.
ExactRat rat_pow(const ExactRat& x, unsigned long k);

// floor(alpha^k) for rational alpha > 1, via exact integer powering.
ExactInt floor_pow(const ExactRat& alpha, unsigned long k);

// theta^e for e >= 0.
ExactInt int_pow(const ExactInt& base, unsigned long e);

struct PrecisionBudget {
  long bits = 64;
  std::string derivation;
};

// Precision needed so that angles of order theta^{-alpha^{N_max+q+1}} survive
// the floating stage with >= 32 guard bits, sized from the truncation order M:
// bits = max(64, 16 + 2*ceil(alpha^{M+1} * log2(theta))).
PrecisionBudget required_precision(const ExactRat& alpha, const ExactInt& theta,
                                   int trunc_order_m, int q, int n_max);

// ---------------------------------------------------------------------------
// BigFloat: an MPFR value that carries the precision it was computed at.
// Arithmetic results use max(operand precisions); rounding is to nearest
// unless a directional mode is passed explicitly.
// ---------------------------------------------------------------------------
class BigFloat {
 public:
  BigFloat() : BigFloat(64) {}
  explicit BigFloat(long prec) {
    mpfr_init2(v_, clamp_prec(prec));
    mpfr_set_zero(v_, 1);
  }
  BigFloat(const BigFloat& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  BigFloat(BigFloat&& o) noexcept {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_swap(v_, o.v_);
  }
  BigFloat& operator=(const BigFloat& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  BigFloat& operator=(BigFloat&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(v_); }

  static BigFloat of(const ExactRat& q, long prec, mpfr_rnd_t rnd = MPFR_RNDN) {
    BigFloat r(prec);
    mpfr_set_q(r.v_, q.get_mpq_t(), rnd);
    return r;
  }
  static BigFloat of(const ExactInt& z, long prec, mpfr_rnd_t rnd = MPFR_RNDN) {
    BigFloat r(prec);
    mpfr_set_z(r.v_, z.get_mpz_t(), rnd);
    return r;
  }
  static BigFloat of(double d, long prec) {
    BigFloat r(prec);
    mpfr_set_d(r.v_, d, MPFR_RNDN);
    return r;
  }
  static BigFloat of(long i, long prec) {
    BigFloat r(prec);
    mpfr_set_si(r.v_, i, MPFR_RNDN);
    return r;
  }
  // 2^e at the given precision (exact).
  static BigFloat pow2(long e, long prec = 64) {
    BigFloat r(prec);
    mpfr_set_ui_2exp(r.v_, 1, e, MPFR_RNDN);
    return r;
  }

  long prec() const { return mpfr_get_prec(v_); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sgn() const { return mpfr_sgn(v_); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

  std::string hex() const;              // exact "%Ra" form
  std::string dec(int digits) const;    // "%.<digits>Re"
  std::string fixed(int digits) const;  // "%.<digits>Rf"

  BigFloat round_to(long prec, mpfr_rnd_t rnd = MPFR_RNDN) const {
    BigFloat r(prec);
    mpfr_set(r.v_, v_, rnd);
    return r;
  }

  int cmp(const BigFloat& o) const { return mpfr_cmp(v_, o.v_); }
  friend bool operator<(const BigFloat& a, const BigFloat& b) { return a.cmp(b) < 0; }
  friend bool operator<=(const BigFloat& a, const BigFloat& b) { return a.cmp(b) <= 0; }
  friend bool operator>(const BigFloat& a, const BigFloat& b) { return a.cmp(b) > 0; }
  friend bool operator>=(const BigFloat& a, const BigFloat& b) { return a.cmp(b) >= 0; }
  friend bool operator==(const BigFloat& a, const BigFloat& b) { return a.cmp(b) == 0; }

  static BigFloat add(const BigFloat& a, const BigFloat& b, mpfr_rnd_t rnd = MPFR_RNDN) {
    BigFloat r(std::max(a.prec(), b.prec()));
    mpfr_add(r.v_, a.v_, b.v_, rnd);
    return r;
  }
  static BigFloat sub(const BigFloat& a, const BigFloat& b, mpfr_rnd_t rnd = MPFR_RNDN) {
    BigFloat r(std::max(a.prec(), b.prec()));
    mpfr_sub(r.v_, a.v_, b.v_, rnd);
    return r;
  }
  static BigFloat mul(const BigFloat& a, const BigFloat& b, mpfr_rnd_t rnd = MPFR_RNDN) {
    BigFloat r(std::max(a.prec(), b.prec()));
    mpfr_mul(r.v_, a.v_, b.v_, rnd);
    return r;
  }
  static BigFloat div(const BigFloat& a, const BigFloat& b, mpfr_rnd_t rnd = MPFR_RNDN) {
    BigFloat r(std::max(a.prec(), b.prec()));
    mpfr_div(r.v_, a.v_, b.v_, rnd);
    return r;
  }

  friend BigFloat operator+(const BigFloat& a, const BigFloat& b) { return add(a, b); }
  friend BigFloat operator-(const BigFloat& a, const BigFloat& b) { return sub(a, b); }
  friend BigFloat operator*(const BigFloat& a, const BigFloat& b) { return mul(a, b); }
  friend BigFloat operator/(const BigFloat& a, const BigFloat& b) { return div(a, b); }
  friend BigFloat operator-(const BigFloat& a) {
    BigFloat r(a.prec());
    mpfr_neg(r.v_, a.v_, MPFR_RNDN);
    return r;
  }

  friend BigFloat sqrt(const BigFloat& a, mpfr_rnd_t rnd = MPFR_RNDN) {
    BigFloat r(a.prec());
    mpfr_sqrt(r.v_, a.v_, rnd);
    return r;
  }
  friend BigFloat log(const BigFloat& a, mpfr_rnd_t rnd = MPFR_RNDN) {
    BigFloat r(a.prec());
    mpfr_log(r.v_, a.v_, rnd);
    return r;
  }
  friend BigFloat log2(const BigFloat& a, mpfr_rnd_t rnd = MPFR_RNDN) {
    BigFloat r(a.prec());
    mpfr_log2(r.v_, a.v_, rnd);
    return r;
  }
  friend BigFloat exp(const BigFloat& a, mpfr_rnd_t rnd = MPFR_RNDN) {
    BigFloat r(a.prec());
    mpfr_exp(r.v_, a.v_, rnd);
    return r;
  }
  friend BigFloat abs(const BigFloat& a) {
    BigFloat r(a.prec());
    mpfr_abs(r.v_, a.v_, MPFR_RNDN);
    return r;
  }

  mpfr_srcptr raw() const { return v_; }
  mpfr_ptr raw() { return v_; }

 private:
  static long clamp_prec(long p) { return p < MPFR_PREC_MIN ? MPFR_PREC_MIN : p; }
  mpfr_t v_;
};

// theta^x for rational exponent x, with directional rounding honored through
// the log/exp chain (used for outward-rounded bounds).
BigFloat pow_rat_exponent(const ExactInt& theta, const ExactRat& x, long prec,
                          mpfr_rnd_t rnd = MPFR_RNDN);

// ---------------------------------------------------------------------------
// Dense matrix over an exact scalar, row major, value semantics.
// ---------------------------------------------------------------------------
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  T& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  std::vector<T> col(std::size_t j) const {
    std::vector<T> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }
  void set_col(std::size_t j, const std::vector<T>& c) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix submatrix_rows(const std::vector<int>& rows) const {
    Matrix s(rows.size(), cols_);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols_; ++j) s(i, j) = (*this)(rows[i], j);
    return s;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw Error("matrix product: shape mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (aik == T(0)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> a_;
};

using IMat = Matrix<ExactInt>;
using QMat = Matrix<ExactRat>;
using IVec = std::vector<ExactInt>;
using QVec = std::vector<ExactRat>;

QMat to_rational(const IMat& m);
// Clears denominators column by column; returns the integer matrix and the
// per-column scale factors c_j such that int_col_j = c_j * rat_col_j.
std::pair<IMat, std::vector<ExactInt>> clear_denominators(const QMat& m);

// Exact rational Gaussian elimination utilities.
std::size_t q_rank(QMat m);
// Solves a * x = rhs column-wise; returns false if any column is unsolvable.
bool q_solve(const QMat& a, const QMat& rhs, QMat& x);
QMat q_inverse(const QMat& a);  // throws on singular input
// Basis of the right nullspace of a (columns), exact.
QMat q_nullspace(const QMat& a);

// Fraction-free Bareiss determinant of a square integer matrix.
ExactInt bareiss_det(IMat m);
// Laplace-expansion determinant; the slow serial reference.
ExactInt laplace_det(const IMat& m);
ExactRat q_det(QMat m);

// Deterministic RNG used for seeded digit rules and sampling; the algorithm
// is pinned so reports are reproducible across platforms.
struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // Uniform in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t lim = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= lim);
    return x % n;
  }
  // Uniform integer in [lo, hi].
  long range(long lo, long hi) {
    return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }
};

std::uint64_t hash_mix(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d);

}  // namespace dioph
