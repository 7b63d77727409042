#include "dioph/lattice.hpp"

#include <json.hpp>

#include "dioph/exterior.hpp"

namespace dioph::lattice {

namespace {

void neg_col(IMat& m, std::size_t j) {
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) = -m(i, j);
}

void swap_cols(IMat& m, std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t i = 0; i < m.rows(); ++i) std::swap(m(i, a), m(i, b));
}

// col_j -= q * col_r
void axpy_col(IMat& m, std::size_t j, std::size_t r, const ExactInt& q) {
  if (q == 0) return;
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) -= q * m(i, r);
}

}  // namespace

HnfResult hnf_columns(IMat m, bool want_transform) {
  const std::size_t nrows = m.rows(), ncols = m.cols();
  IMat u;
  if (want_transform) u = IMat::identity(ncols);
  std::size_t r = 0;
  std::vector<int> pivot_rows;
  for (std::size_t i = 0; i < nrows && r < ncols; ++i) {
    // Reduce entries of row i in the working columns [r, ncols) to a single
    // positive gcd entry at column r.
    while (true) {
      std::size_t best = ncols;
      for (std::size_t j = r; j < ncols; ++j) {
        if (m(i, j) == 0) continue;
        if (best == ncols || cmp(abs(m(i, j)), abs(m(i, best))) < 0) best = j;
      }
      if (best == ncols) break;  // row has no pivot among working columns
      swap_cols(m, r, best);
      if (want_transform) swap_cols(u, r, best);
      if (m(i, r) < 0) {
        neg_col(m, r);
        if (want_transform) neg_col(u, r);
      }
      bool clean = true;
      for (std::size_t j = r + 1; j < ncols; ++j) {
        if (m(i, j) == 0) continue;
        ExactInt q;
        mpz_fdiv_q(q.get_mpz_t(), m(i, j).get_mpz_t(), m(i, r).get_mpz_t());
        axpy_col(m, j, r, q);
        if (want_transform) axpy_col(u, j, r, q);
        if (m(i, j) != 0) clean = false;
      }
      if (clean) break;
    }
    if (r < ncols && m(i, r) != 0) {
      // Reduce earlier columns at this pivot row into [0, pivot).
      for (std::size_t j = 0; j < r; ++j) {
        ExactInt q;
        mpz_fdiv_q(q.get_mpz_t(), m(i, j).get_mpz_t(), m(i, r).get_mpz_t());
        axpy_col(m, j, r, q);
        if (want_transform) axpy_col(u, j, r, q);
      }
      pivot_rows.push_back(static_cast<int>(i));
      ++r;
    }
  }
  HnfResult res;
  res.rank = r;
  res.pivot_rows = std::move(pivot_rows);
  res.h = IMat(nrows, r);
  for (std::size_t i = 0; i < nrows; ++i)
    for (std::size_t j = 0; j < r; ++j) res.h(i, j) = m(i, j);
  if (want_transform) res.u = std::move(u);
  return res;
}

IMat integer_kernel(const IMat& k) {
  if (k.rows() == 0) return IMat::identity(k.cols());
  auto res = hnf_columns(k, true);
  const std::size_t dim = k.cols() - res.rank;
  IMat ker(k.cols(), dim);
  for (std::size_t i = 0; i < k.cols(); ++i)
    for (std::size_t j = 0; j < dim; ++j) ker(i, j) = res.u(i, res.rank + j);
  return ker;
}

IMat z_basis(const IMat& span) {
  const std::size_t n = span.rows(), e = span.cols();
  if (e == 0 || n == 0) throw Error("z_basis: empty span");
  QMat qs = to_rational(span);
  if (q_rank(qs) != e) throw Error("z_basis: rank-deficient span");
  if (e == n) return IMat::identity(n);  // saturation of the full space

  // Extend to a basis of Q^n with unit vectors.
  QMat full(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < e; ++j) full(i, j) = qs(i, j);
  std::size_t have = e;
  for (std::size_t unit = 0; unit < n && have < n; ++unit) {
    full(unit, have) = 1;
    QMat probe(n, have + 1);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= have; ++j) probe(i, j) = full(i, j);
    if (q_rank(probe) == have + 1) {
      ++have;
    } else {
      full(unit, have) = 0;
    }
  }
  if (have != n) throw Error("z_basis: failed to extend basis");

  // Rows e..n-1 of the inverse vanish exactly on span(S).
  const QMat inv = q_inverse(full);
  QMat rows(n - e, n);
  for (std::size_t i = 0; i < n - e; ++i)
    for (std::size_t j = 0; j < n; ++j) rows(i, j) = inv(e + i, j);
  auto [k, scales] = clear_denominators(rows.transpose());
  (void)scales;  // per-column scaling of K^T, harmless for the kernel
  const IMat kint = k.transpose();
  IMat ker = integer_kernel(kint);
  if (ker.cols() != e) throw Error("z_basis: internal kernel dimension");
  return hnf_columns(ker, false).h;
}

RationalSubspace RationalSubspace::from_integer_span(const IMat& span) {
  RationalSubspace s;
  s.n_ = static_cast<int>(span.rows());
  s.e_ = static_cast<int>(span.cols());
  if (s.e_ == 0) throw Error("RationalSubspace: empty span");
  s.span_ = span;
  s.zbasis_ = z_basis(span);  // exact rank check happens here
  const ExactRat h2 = exterior::norm_sq(exterior::wedge(s.zbasis_));
  if (h2.get_den() != 1) throw Error("RationalSubspace: non-integral height^2");
  s.height_sq_ = h2.get_num();
  if (s.height_sq_ < 1) throw Error("RationalSubspace: height^2 < 1");
  return s;
}

RationalSubspace RationalSubspace::from_rational_span(const QMat& span) {
  auto [ints, scales] = clear_denominators(span);
  (void)scales;
  return from_integer_span(ints);
}

std::pair<ExactInt, BigFloat> RationalSubspace::height(long prec) const {
  return {height_sq_, sqrt(BigFloat::of(height_sq_, prec))};
}

bool RationalSubspace::member(const QVec& v) const {
  if (static_cast<int>(v.size()) != n_) throw Error("member: ambient mismatch");
  QMat rhs(n_, 1);
  for (int i = 0; i < n_; ++i) rhs(i, 0) = v[i];
  QMat x;
  return q_solve(to_rational(zbasis_), rhs, x);
}

bool RationalSubspace::contains(const RationalSubspace& other) const {
  if (other.n_ != n_) throw Error("contains: ambient mismatch");
  for (int j = 0; j < other.e_; ++j) {
    QVec v(n_);
    for (int i = 0; i < n_; ++i) v[i] = ExactRat(other.zbasis_(i, j));
    if (!member(v)) return false;
  }
  return true;
}

std::string RationalSubspace::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = n_;
  j["dim"] = e_;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (int i = 0; i < n_; ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int c = 0; c < e_; ++c) row.push_back(zbasis_(i, c).get_str());
    rows.push_back(row);
  }
  j["zbasis"] = rows;
  j["height_sq"] = height_sq_.get_str();
  return j.dump();
}

RationalSubspace RationalSubspace::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  const int n = j.at("n").get<int>();
  const int e = j.at("dim").get<int>();
  IMat b(n, e);
  const auto& rows = j.at("zbasis");
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < e; ++c) b(i, c) = ExactInt(rows.at(i).at(c).get<std::string>());
  auto s = from_integer_span(b);
  if (s.height_sq().get_str() != j.at("height_sq").get<std::string>())
    throw Error("RationalSubspace::from_json: height mismatch");
  return s;
}

RationalSubspace sum(const RationalSubspace& a, const RationalSubspace& b) {
  if (a.ambient() != b.ambient()) throw Error("sum: ambient mismatch");
  const int n = a.ambient();
  IMat m(n, a.dim() + b.dim());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < a.dim(); ++j) m(i, j) = a.zbasis()(i, j);
    for (int j = 0; j < b.dim(); ++j) m(i, a.dim() + j) = b.zbasis()(i, j);
  }
  // Drop dependent columns to obtain a spanning set of full column rank.
  QMat qm = to_rational(m);
  std::vector<int> keep;
  for (int j = 0; j < static_cast<int>(m.cols()); ++j) {
    QMat probe(n, keep.size() + 1);
    for (int i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < keep.size(); ++k) probe(i, k) = qm(i, keep[k]);
      probe(i, keep.size()) = qm(i, j);
    }
    if (q_rank(probe) == keep.size() + 1) keep.push_back(j);
  }
  IMat span(n, keep.size());
  for (int i = 0; i < n; ++i)
    for (std::size_t k = 0; k < keep.size(); ++k) span(i, k) = m(i, keep[k]);
  return RationalSubspace::from_integer_span(span);
}

RationalSubspace intersect(const RationalSubspace& a, const RationalSubspace& b) {
  if (a.ambient() != b.ambient()) throw Error("intersect: ambient mismatch");
  const int n = a.ambient();
  // Kernel method: solutions of A x = B y give the intersection as A x.
  QMat stacked(n, a.dim() + b.dim());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < a.dim(); ++j) stacked(i, j) = ExactRat(a.zbasis()(i, j));
    for (int j = 0; j < b.dim(); ++j) stacked(i, a.dim() + j) = ExactRat(-b.zbasis()(i, j));
  }
  const QMat ns = q_nullspace(stacked);
  if (ns.cols() == 0) throw Error("intersect: trivial intersection");
  QMat vecs(n, ns.cols());
  for (std::size_t k = 0; k < ns.cols(); ++k)
    for (int i = 0; i < n; ++i) {
      ExactRat acc(0);
      for (int j = 0; j < a.dim(); ++j) acc += ExactRat(a.zbasis()(i, j)) * ns(j, k);
      vecs(i, k) = acc;
    }
  return RationalSubspace::from_rational_span(vecs);
}

ExactInt ideal_norm(const IMat& given_basis, const RationalSubspace& s) {
  if (static_cast<int>(given_basis.rows()) != s.ambient() ||
      static_cast<int>(given_basis.cols()) != s.dim())
    throw Error("ideal_norm: shape mismatch");
  // Same real span both ways.
  const auto gb = RationalSubspace::from_integer_span(given_basis);
  if (!gb.contains(s) || !s.contains(gb)) throw Error("ideal_norm: span mismatch");
  const ExactRat w2 = exterior::norm_sq(exterior::wedge(given_basis));
  if (w2.get_den() != 1) throw Error("ideal_norm: internal");
  ExactInt q, r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), w2.get_num().get_mpz_t(), s.height_sq().get_mpz_t());
  if (r != 0) throw Error("ideal_norm: non-integral index squared (internal bug)");
  if (mpz_perfect_square_p(q.get_mpz_t()) == 0)
    throw Error("ideal_norm: index squared not a perfect square (internal bug)");
  ExactInt k;
  mpz_sqrt(k.get_mpz_t(), q.get_mpz_t());
  return k;
}

IMat orthogonal_complement_zbasis(const RationalSubspace& s) {
  return hnf_columns(integer_kernel(s.zbasis().transpose()), false).h;
}

}  // namespace dioph::lattice
