#include "dioph/angles.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace dioph::angles {

namespace {

ExactRat dot(const QVec& a, const QVec& b) {
  ExactRat acc(0);
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

QMat gram(const QMat& a, const QMat& b) {
  return a.transpose() * b;
}

// Exact data of the angle pencil on the smaller side:
//   g = Gram of the small basis, r = M Gbig^-1 M^T, s = g - r.
// Eigenvalues of (r, g) are squared cosines, of (s, g) squared sines.
struct Pencil {
  QMat g, r, s;
  int t = 0;
};

Pencil build_pencil(const QMat& a, const QMat& b) {
  if (a.rows() != b.rows()) throw Error("psi_profile: ambient mismatch");
  if (a.cols() == 0 || b.cols() == 0) throw Error("psi_profile: empty basis");
  const QMat* small = &a;
  const QMat* big = &b;
  if (a.cols() > b.cols()) std::swap(small, big);
  Pencil p;
  p.t = static_cast<int>(small->cols());
  p.g = gram(*small, *small);
  const QMat gbig = gram(*big, *big);
  const QMat m = gram(*small, *big);
  QMat w;
  if (!q_solve(gbig, m.transpose(), w)) throw Error("psi_profile: Gram solve failed");
  p.r = m * w;
  p.s = QMat(p.t, p.t);
  for (int i = 0; i < p.t; ++i)
    for (int j = 0; j < p.t; ++j) p.s(i, j) = p.g(i, j) - p.r(i, j);
  return p;
}

// ---------------------------------------------------------------------------
// MPFR stage: Cholesky, triangular solves, cyclic Jacobi.
// ---------------------------------------------------------------------------
using FMat = std::vector<std::vector<BigFloat>>;

FMat fmat_of(const QMat& m, long prec) {
  FMat f(m.rows(), std::vector<BigFloat>(m.cols(), BigFloat(prec)));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) f[i][j] = BigFloat::of(m(i, j), prec);
  return f;
}

FMat cholesky(const FMat& a, long prec) {
  const std::size_t n = a.size();
  FMat l(n, std::vector<BigFloat>(n, BigFloat(prec)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      BigFloat acc = a[i][j];
      for (std::size_t k = 0; k < j; ++k) acc = acc - l[i][k] * l[j][k];
      if (i == j) {
        if (acc.sgn() <= 0) throw PrecisionError("cholesky: matrix lost definiteness");
        l[i][i] = sqrt(acc);
      } else {
        l[i][j] = acc / l[j][j];
      }
    }
  }
  return l;
}

// X = L^-1 B
FMat forward_solve(const FMat& l, const FMat& b) {
  const std::size_t n = l.size(), m = b[0].size();
  FMat x(n, std::vector<BigFloat>(m));
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      BigFloat acc = b[i][j];
      for (std::size_t k = 0; k < i; ++k) acc = acc - l[i][k] * x[k][j];
      x[i][j] = acc / l[i][i];
    }
  return x;
}

FMat fmat_transpose(const FMat& a) {
  FMat t(a[0].size(), std::vector<BigFloat>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
  return t;
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
std::vector<BigFloat> jacobi_eigen(FMat a, long prec) {
  const std::size_t n = a.size();
  std::vector<BigFloat> out;
  if (n == 1) return {a[0][0]};
  BigFloat scale(prec);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (abs(a[i][j]) > scale) scale = abs(a[i][j]);
  if (scale.is_zero()) return std::vector<BigFloat>(n, BigFloat(prec));
  const BigFloat stop = scale * BigFloat::pow2(-(prec - 8), 64);
  const BigFloat one = BigFloat::of(1L, prec);
  for (int sweep = 0; sweep < 128; ++sweep) {
    BigFloat off(prec);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (abs(a[i][j]) > off) off = abs(a[i][j]);
    if (off <= stop) {
      for (std::size_t i = 0; i < n; ++i) out.push_back(a[i][i]);
      return out;
    }
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (abs(a[p][q]) <= stop) continue;
        const BigFloat apq = a[p][q];
        BigFloat beta = (a[q][q] - a[p][p]) / (apq * BigFloat::of(2L, prec));
        BigFloat tf(prec);
        if (beta.is_zero()) {
          tf = one;
        } else {
          BigFloat denom = abs(beta) + sqrt(beta * beta + one);
          tf = one / denom;
          if (beta.sgn() < 0) tf = -tf;
        }
        const BigFloat c = one / sqrt(tf * tf + one);
        const BigFloat s = tf * c;
        const BigFloat app = a[p][p], aqq = a[q][q];
        a[p][p] = app - tf * apq;
        a[q][q] = aqq + tf * apq;
        a[p][q] = BigFloat(prec);
        a[q][p] = BigFloat(prec);
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const BigFloat akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[p][k] = a[k][p];
          a[k][q] = s * akp + c * akq;
          a[q][k] = a[k][q];
        }
      }
    }
  }
  throw PrecisionError("jacobi_eigen: no convergence");
}

BigFloat clamp01(const BigFloat& x, long prec) {
  if (x.sgn() < 0) return BigFloat(prec);
  if (x > BigFloat::of(1L, prec)) return BigFloat::of(1L, prec);
  return x;
}

std::vector<BigFloat> psi_attempt(const Pencil& pen, long attempt_bits, long budget_bits) {
  const long wp = attempt_bits + 64;
  const FMat gf = fmat_of(pen.g, wp);
  const FMat l = cholesky(gf, wp);
  auto whiten = [&](const QMat& m) {
    const FMat x = forward_solve(l, fmat_of(m, wp));
    return forward_solve(l, fmat_transpose(x));
  };
  std::vector<BigFloat> cos2 = jacobi_eigen(whiten(pen.r), wp);
  std::sort(cos2.begin(), cos2.end(), [](const BigFloat& a, const BigFloat& b) { return b < a; });
  const BigFloat near_one =
      BigFloat::of(1L, wp) - BigFloat::pow2(-(budget_bits / 4), wp);
  bool tiny_sine = false;
  for (auto& c : cos2)
    if (c > near_one) tiny_sine = true;
  std::vector<BigFloat> psi;
  if (tiny_sine) {
    std::vector<BigFloat> sin2 = jacobi_eigen(whiten(pen.s), wp);
    std::sort(sin2.begin(), sin2.end());
    for (auto& v : sin2) psi.push_back(sqrt(clamp01(v, wp)));
  } else {
    for (auto& c : cos2) psi.push_back(sqrt(clamp01(BigFloat::of(1L, wp) - c, wp)));
  }
  std::sort(psi.begin(), psi.end());
  return psi;
}

}  // namespace

std::pair<ExactRat, BigFloat> omega(const QVec& x, const QVec& y, long prec) {
  if (x.size() != y.size()) throw Error("omega: dimension mismatch");
  const ExactRat xx = dot(x, x), yy = dot(y, y), xy = dot(x, y);
  if (xx == 0 || yy == 0) throw Error("omega: zero vector");
  ExactRat w2 = 1 - xy * xy / (xx * yy);
  if (w2 < 0 || w2 > 1) throw Error("omega: internal");
  return {w2, sqrt(BigFloat::of(w2, prec))};
}

std::string AngleReport::to_json() const {
  nlohmann::ordered_json j;
  j["t"] = t;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& p : psi) arr.push_back(p.hex());
  j["psi"] = arr;
  j["error_bound"] = error_bound.hex();
  j["precision_bits"] = precision_bits;
  return j.dump();
}

AngleReport psi_profile(const QMat& a_basis, const QMat& b_basis, long bits) {
  if (bits < 64) bits = 64;
  const Pencil pen = build_pencil(a_basis, b_basis);
  const auto lo = psi_attempt(pen, bits, bits);
  const auto hi = psi_attempt(pen, 2 * bits, bits);
  const BigFloat rel_tol = BigFloat::pow2(-32, 64);
  const BigFloat abs_floor = BigFloat::pow2(-(bits / 2), 64);
  BigFloat max_diff(64);
  for (int j = 0; j < pen.t; ++j) {
    const BigFloat diff = abs(lo[j] - hi[j]);
    if (diff > max_diff) max_diff = diff;
    const BigFloat mag = lo[j] > hi[j] ? lo[j] : hi[j];
    if (mag <= abs_floor) continue;  // certified zero at this precision
    if (diff > mag * rel_tol)
      throw PrecisionError("psi_profile: precision runs disagree beyond 2^-32 relative");
  }
  AngleReport rep;
  rep.t = pen.t;
  rep.precision_bits = bits;
  rep.error_bound = (max_diff + BigFloat::pow2(-bits + 4, 64)).round_to(64, MPFR_RNDU);
  rep.psi.reserve(pen.t);
  for (int j = 0; j < pen.t; ++j) rep.psi.push_back(hi[j]);
  return rep;
}

AngleReport psi_profile(const lattice::RationalSubspace& a, const lattice::RationalSubspace& b,
                        long bits) {
  if (a.ambient() != b.ambient()) throw Error("psi_profile: ambient mismatch");
  return psi_profile(to_rational(a.zbasis()), to_rational(b.zbasis()), bits);
}

// ---------------------------------------------------------------------------
// Exact characteristic polynomial oracle.
// ---------------------------------------------------------------------------
namespace {

using Poly = std::vector<ExactRat>;  // coefficients, low degree first

int degree(const Poly& p) {
  int d = static_cast<int>(p.size()) - 1;
  while (d > 0 && p[d] == 0) --d;
  return p.empty() || (d == 0 && p[0] == 0) ? -1 : d;
}

void trim(Poly& p) {
  while (p.size() > 1 && p.back() == 0) p.pop_back();
  if (p.size() == 1 && p[0] == 0) p.clear();
}

Poly derivative(const Poly& p) {
  Poly d;
  for (std::size_t k = 1; k < p.size(); ++k) d.push_back(p[k] * ExactRat(static_cast<long>(k)));
  trim(d);
  return d;
}

ExactRat eval(const Poly& p, const ExactRat& x) {
  ExactRat acc(0);
  for (std::size_t k = p.size(); k-- > 0;) acc = acc * x + p[k];
  return acc;
}

// Remainder of the Euclidean division a / b over Q.
Poly poly_rem(Poly a, const Poly& b) {
  trim(a);
  const int db = degree(b);
  if (db < 0) throw Error("poly_rem: division by zero polynomial");
  while (degree(a) >= db && degree(a) >= 0) {
    const int da = degree(a);
    const ExactRat f = a[da] / b[db];
    for (int k = 0; k <= db; ++k) a[da - db + k] -= f * b[k];
    a[da] = 0;
    trim(a);
    if (a.empty()) break;
  }
  return a;
}

Poly poly_div_exact(Poly a, const Poly& b) {
  trim(a);
  const int db = degree(b);
  Poly q(std::max<std::size_t>(1, a.size()), ExactRat(0));
  while (degree(a) >= db && degree(a) >= 0) {
    const int da = degree(a);
    const ExactRat f = a[da] / b[db];
    q[da - db] = f;
    for (int k = 0; k <= db; ++k) a[da - db + k] -= f * b[k];
    trim(a);
    if (a.empty()) break;
  }
  if (!a.empty() && degree(a) >= 0) throw Error("poly_div_exact: nonzero remainder");
  trim(q);
  return q;
}

Poly monic(Poly p) {
  const int d = degree(p);
  if (d < 0) return p;
  const ExactRat lead = p[d];
  for (auto& c : p) c /= lead;
  return p;
}

Poly poly_gcd(Poly a, Poly b) {
  trim(a);
  trim(b);
  while (!b.empty() && degree(b) >= 0) {
    Poly r = poly_rem(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a);
}

// Yun's square-free decomposition: p = prod f_i^i. Returns (factor, mult).
std::vector<std::pair<Poly, int>> square_free(const Poly& p) {
  std::vector<std::pair<Poly, int>> out;
  Poly dp = derivative(p);
  Poly g = poly_gcd(p, dp);
  if (degree(g) <= 0) {
    out.push_back({monic(p), 1});
    return out;
  }
  Poly w = poly_div_exact(p, g);
  Poly y = poly_div_exact(dp, g);
  int i = 1;
  while (degree(w) > 0) {
    Poly z = y;
    const Poly dw = derivative(w);
    for (std::size_t k = 0; k < z.size() || k < dw.size(); ++k) {
      if (k >= z.size()) z.push_back(ExactRat(0));
      if (k < dw.size()) z[k] -= dw[k];
    }
    trim(z);
    Poly f = poly_gcd(w, z);
    if (degree(f) > 0) out.push_back({monic(f), i});
    w = poly_div_exact(w, f);
    if (!z.empty())
      y = poly_div_exact(z, f);
    else
      y = z;
    ++i;
  }
  return out;
}

std::vector<Poly> sturm_chain(const Poly& f) {
  std::vector<Poly> chain{f, derivative(f)};
  while (degree(chain.back()) > 0) {
    Poly r = poly_rem(chain[chain.size() - 2], chain.back());
    if (r.empty() || degree(r) < 0) break;
    for (auto& c : r) c = -c;
    chain.push_back(std::move(r));
  }
  return chain;
}

int sign_variations(const std::vector<Poly>& chain, const ExactRat& x) {
  int v = 0, prev = 0;
  for (const auto& p : chain) {
    if (p.empty()) continue;
    const int s = sgn(eval(p, x));
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++v;
    prev = s;
  }
  return v;
}

// Divides out rational root r as many times as it divides p; returns count.
int deflate_root(Poly& p, const ExactRat& r) {
  int count = 0;
  Poly lin{-r, ExactRat(1)};
  while (degree(p) >= 1 && eval(p, r) == 0) {
    p = poly_div_exact(p, lin);
    ++count;
  }
  return count;
}

struct RootEnclosure {
  ExactRat value;  // midpoint, exact for rational roots
  int multiplicity;
};

// Isolates and refines the real roots of square-free f inside (lo, hi],
// each to relative width 2^-96 (exact rationals when bisection hits them).
std::vector<ExactRat> isolate_refine(const Poly& f, ExactRat lo, ExactRat hi) {
  std::vector<ExactRat> roots;
  const auto chain = sturm_chain(f);
  auto vars = [&](const ExactRat& x) { return sign_variations(chain, x); };
  struct Item {
    ExactRat a, b;
    int count;
  };
  std::vector<Item> stack;
  const int total = vars(lo) - vars(hi);
  if (total > 0) stack.push_back({lo, hi, total});
  const ExactRat eps_rel = make_rat(1, ExactInt(1) << 96);
  int guard = 0;
  while (!stack.empty()) {
    if (++guard > 100000) throw Error("root isolation: too many steps");
    Item it = stack.back();
    stack.pop_back();
    if (it.count == 1) {
      ExactRat a = it.a, b = it.b;
      const int sa = sgn(eval(f, a));
      int steps = 0;
      bool exact = false;
      while (!exact) {
        if (a > 0 && (b - a) <= a * eps_rel) break;
        if (++steps > 1024) throw Error("root refinement: too many steps");
        const ExactRat m = (a + b) / 2;
        const int sm = sgn(eval(f, m));
        if (sm == 0) {
          a = b = m;
          exact = true;
        } else if (sm == sa) {
          a = m;
        } else {
          b = m;
        }
      }
      roots.push_back((a + b) / 2);
      continue;
    }
    ExactRat m = (it.a + it.b) / 2;
    if (eval(f, m) == 0) {
      // Exact root at the split point: carve out a slab around it that
      // contains no other root, then recurse on the two sides.
      roots.push_back(m);
      ExactRat w = (it.b - it.a) / 4;
      int shrink = 0;
      while (vars(m - w) - vars(m + w) > 1) {
        w /= 2;
        if (++shrink > 512) throw Error("root isolation: cluster too tight");
      }
      const int left = vars(it.a) - vars(m - w);
      const int right = vars(m + w) - vars(it.b);
      if (left > 0) stack.push_back({it.a, m - w, left});
      if (right > 0) stack.push_back({m + w, it.b, right});
      continue;
    }
    const int vm = vars(m);
    const int left = vars(it.a) - vm;
    const int right = vm - vars(it.b);
    if (left > 0) stack.push_back({it.a, m, left});
    if (right > 0) stack.push_back({m, it.b, right});
  }
  return roots;
}

Poly char_poly(const QMat& a) {
  // Faddeev-LeVerrier: p(y) = y^n + c_1 y^(n-1) + ... + c_n with
  // M_1 = I, c_k = -tr(A M_k)/k, M_{k+1} = A M_k + c_k I.
  const std::size_t n = a.rows();
  std::vector<ExactRat> c(n + 1, ExactRat(0));
  c[n] = 1;
  QMat m = QMat::identity(n);
  ExactRat ck(0);
  for (std::size_t k = 1; k <= n; ++k) {
    if (k > 1)
      for (std::size_t i = 0; i < n; ++i) m(i, i) += ck;
    m = a * m;
    ExactRat tr(0);
    for (std::size_t i = 0; i < n; ++i) tr += m(i, i);
    ck = -tr / ExactRat(static_cast<long>(k));
    c[n - k] = ck;
  }
  return c;
}

}  // namespace

std::vector<ExactRat> psi_profile_exact_oracle(const QMat& a_basis, const QMat& b_basis) {
  const Pencil pen = build_pencil(a_basis, b_basis);
  if (pen.t > 3 || a_basis.rows() > 6)
    throw Error("psi_profile_exact_oracle: dimensions too large");
  QMat t;
  if (!q_solve(pen.g, pen.s, t)) throw Error("oracle: Gram solve failed");
  Poly p = char_poly(t);  // roots are the squared sines, all in [0,1]
  std::vector<RootEnclosure> found;
  // Rational roots first (0, 1 and any other exact hits on the lattice of
  // candidate denominators are caught by deflation at the bisection points;
  // 0 and 1 are the structurally meaningful ones).
  for (const ExactRat& r : {ExactRat(0), ExactRat(1)}) {
    const int m = deflate_root(p, r);
    if (m > 0) found.push_back({r, m});
  }
  if (degree(p) >= 1) {
    for (const auto& [factor, mult] : square_free(p)) {
      if (degree(factor) < 1) continue;
      Poly f = factor;
      // Catch remaining rational roots of the factor at small denominators by
      // checking the bisection start points; general rational roots are rare
      // and handled by the refinement hitting them exactly.
      const auto roots = isolate_refine(f, make_rat(-1, 8), make_rat(9, 8));
      for (const auto& r : roots) found.push_back({r, mult});
    }
  }
  std::vector<ExactRat> out;
  for (const auto& re : found)
    for (int i = 0; i < re.multiplicity; ++i) out.push_back(re.value);
  if (static_cast<int>(out.size()) != pen.t)
    throw Error("oracle: root count does not match pencil size");
  std::sort(out.begin(), out.end());
  for (auto& v : out) {
    if (v < 0) v = 0;
    if (v > 1) v = 1;
  }
  return out;
}

std::vector<ExactRat> psi_profile_exact_oracle(const lattice::RationalSubspace& a,
                                               const lattice::RationalSubspace& b) {
  return psi_profile_exact_oracle(to_rational(a.zbasis()), to_rational(b.zbasis()));
}

// ---------------------------------------------------------------------------
// Brute-force minimization over the product of unit spheres.
// ---------------------------------------------------------------------------
namespace {

using DVec = std::vector<double>;
using DMat = std::vector<DVec>;

DMat orthonormalize(const QMat& basis) {
  const std::size_t n = basis.rows(), k = basis.cols();
  DMat b(k, DVec(n));
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < n; ++i) b[j][i] = basis(i, j).get_d();
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t l = 0; l < j; ++l) {
      double d = 0;
      for (std::size_t i = 0; i < n; ++i) d += b[j][i] * b[l][i];
      for (std::size_t i = 0; i < n; ++i) b[j][i] -= d * b[l][i];
    }
    double nn = 0;
    for (double v : b[j]) nn += v * v;
    nn = std::sqrt(nn);
    if (nn < 1e-300) throw Error("psi_min_bruteforce: degenerate basis");
    for (double& v : b[j]) v /= nn;
  }
  return b;
}

// Unit vector from spherical parameters in an orthonormal k-frame.
DVec direction(const DMat& frame, const DVec& params) {
  const std::size_t n = frame[0].size(), k = frame.size();
  DVec coef(k, 1.0);
  // coef via nested sin/cos: k=1 -> (1); k=2 -> (cos t, sin t);
  // k=3 -> (cos u, sin u cos t, sin u sin t)
  if (k == 2) {
    coef[0] = std::cos(params[0]);
    coef[1] = std::sin(params[0]);
  } else if (k == 3) {
    coef[0] = std::cos(params[0]);
    coef[1] = std::sin(params[0]) * std::cos(params[1]);
    coef[2] = std::sin(params[0]) * std::sin(params[1]);
  }
  DVec v(n, 0.0);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < n; ++i) v[i] += coef[j] * frame[j][i];
  return v;
}

double omega_unit(const DVec& x, const DVec& y) {
  double d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) d += x[i] * y[i];
  const double s2 = 1.0 - d * d;
  return s2 <= 0 ? 0.0 : std::sqrt(s2);
}

}  // namespace

double psi_min_bruteforce(const QMat& a_basis, const QMat& b_basis, int grid_depth) {
  const std::size_t da = a_basis.cols(), db = b_basis.cols();
  if (da + db > 4) throw Error("psi_min_bruteforce: dim A + dim B must be <= 4");
  const DMat fa = orthonormalize(a_basis);
  const DMat fb = orthonormalize(b_basis);
  const std::size_t pa = da - 1, pb = db - 1;  // spherical parameters per side
  const std::size_t np = pa + pb;
  const double pi = 3.14159265358979323846;
  DVec lo(np, 0.0), hi(np, pi);
  auto eval_at = [&](const DVec& params) {
    DVec qa(params.begin(), params.begin() + pa);
    DVec qb(params.begin() + pa, params.end());
    return omega_unit(direction(fa, qa), direction(fb, qb));
  };
  if (np == 0) return eval_at({});
  double best = 1e18;
  DVec best_p(np, 0.0);
  const int rounds = grid_depth + 3;
  const int grid = np == 1 ? 257 : 65;
  for (int round = 0; round < rounds; ++round) {
    DVec p(np);
    std::vector<int> idx(np, 0);
    while (true) {
      for (std::size_t k = 0; k < np; ++k)
        p[k] = lo[k] + (hi[k] - lo[k]) * idx[k] / (grid - 1);
      const double v = eval_at(p);
      if (v < best) {
        best = v;
        best_p = p;
      }
      std::size_t k = 0;
      while (k < np && ++idx[k] == grid) idx[k++] = 0;
      if (k == np) break;
    }
    for (std::size_t k = 0; k < np; ++k) {
      const double w = (hi[k] - lo[k]) / (grid - 1);
      lo[k] = best_p[k] - 2 * w;
      hi[k] = best_p[k] + 2 * w;
    }
  }
  return best;
}

BigFloat truncation_error_bound(int d, int q, const ExactInt& theta, const ExactRat& alpha,
                                int trunc_order_m, int target_n, long prec) {
  if (trunc_order_m < target_n + q + 1)
    throw InfeasibleError("truncation_error_bound: M too small for target N");
  // d * 4 * theta/(theta-1) * theta^(-floor(alpha^(M+1))), outward rounded.
  const ExactInt e = floor_pow(alpha, static_cast<unsigned long>(trunc_order_m) + 1);
  if (!e.fits_ulong_p()) throw InfeasibleError("truncation_error_bound: exponent too large");
  const ExactInt tp = int_pow(theta, e.get_ui());
  ExactRat bound_q = make_rat(4 * d, 1) * make_rat(theta, theta - 1) / ExactRat(tp);
  const BigFloat bound = BigFloat::of(bound_q, prec, MPFR_RNDU);
  // The bound must sit strictly below the measured angle scale.
  const ExactRat level = -rat_pow(alpha, static_cast<unsigned long>(target_n + q + 1));
  const BigFloat scale = pow_rat_exponent(theta, level, prec, MPFR_RNDD);
  if (!(bound < scale))
    throw InfeasibleError("truncation_error_bound: bound not below measured angle scale");
  return bound;
}

}  // namespace dioph::angles
