#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dioph/experiments.hpp"

using namespace dioph;
using namespace dioph::experiments;
using construction::ConstructionParams;
using construction::DigitRule;

namespace {

ConstructionParams p12() { return ConstructionParams::create(1, 2, 5, ExactRat(4), DigitRule::AllTwos, 0, 6); }
ConstructionParams p21() { return ConstructionParams::create(2, 1, 5, ExactRat(10), DigitRule::AllTwos, 0, 4); }

IMat cols(std::size_t n, std::initializer_list<std::initializer_list<long>> columns) {
  IMat m(n, columns.size());
  std::size_t j = 0;
  for (const auto& c : columns) {
    std::size_t i = 0;
    for (long v : c) m(i++, j) = v;
    ++j;
  }
  return m;
}

}  // namespace

TEST_CASE("theorem_mu formulas") {
  // e = d: alpha/d.
  CHECK(theorem_mu(2, 2, ExactRat(10)) == ExactRat(5));
  CHECK(theorem_mu(3, 3, ExactRat(63)) == ExactRat(21));
  // d = 1: alpha^e.
  for (int e = 1; e <= 4; ++e) CHECK(theorem_mu(1, e, ExactRat(4)) == rat_pow(ExactRat(4), e));
  // e < d: alpha/e.
  CHECK(theorem_mu(3, 2, ExactRat(63)) == make_rat(63, 2));
  // d=2, alpha=10: e=2 -> 10^2/(2*10) = 5 and e=3 -> 10^2/(1+10).
  CHECK(theorem_mu(2, 3, ExactRat(10)) == make_rat(100, 11));
  CHECK_THROWS_AS(theorem_mu(p12(), 3), Error);
}

TEST_CASE("measure_family converges to the theorem targets (small config)") {
  const auto p = p12();
  const auto est1 = estimate(p, Family::C, 1, {1, 2});
  CHECK(est1.target == ExactRat(4));
  const double r1 = est1.last_ratio.to_double();
  CHECK(std::abs(r1 - 4.0) / 4.0 < 0.10);
  const auto est2 = estimate(p, Family::C, 2, {1, 2});
  CHECK(est2.target == ExactRat(16));
  CHECK(std::abs(est2.last_ratio.to_double() - 16.0) / 16.0 < 0.10);
  // D family at e = 1 has the same target alpha/1.
  const auto estd = estimate(p, Family::D, 1, {1, 2});
  CHECK(estd.target == ExactRat(4));
  CHECK(std::abs(estd.last_ratio.to_double() - 4.0) / 4.0 < 0.10);
  // |ratio - target| * log H stays bounded across N (correction is O(1/log H)).
  double prev = 1e300;
  for (const auto& row : est1.rows) {
    const double logh = 0.5 * std::log(row.height_sq.get_d());
    const double corr = std::abs(row.ratio.to_double() - 4.0) * logh;
    CHECK(corr < 10.0);
    CHECK(corr < prev * 3.0 + 1.0);
    prev = corr;
  }
  CHECK_THROWS_AS(measure_family(p, Family::C, 1, {}), Error);
  CHECK_THROWS_AS(measure_family(p, Family::D, 2, {1}), Error);
  // M too small for the requested level.
  CHECK_THROWS_AS(measure_family(p, Family::C, 1, {5}), InfeasibleError);
}

TEST_CASE("family D at e = d matches the e >= d target too") {
  // d=2, q=1: D_{N,2} = span(X_N^1, X_N^2) targets alpha/d = 5 as well.
  const auto p = p21();
  const auto est = estimate(p, Family::D, 2, {1}, 16384);
  CHECK(est.target == ExactRat(5));
  CHECK(std::abs(est.last_ratio.to_double() - 5.0) / 5.0 < 0.10);
}

TEST_CASE("verify_lemmas passes on both shipped configs and both digit rules") {
  for (auto p : {p12(), p21()}) {
    const auto rep = verify_lemmas(p, {0, 1}, 17);
    CHECK(rep.all_pass());
    p.digit_rule = DigitRule::Seeded;
    p.seed = 99;
    const auto rep2 = verify_lemmas(p, {0, 1}, 17);
    CHECK(rep2.all_pass());
  }
}

TEST_CASE("verify_lemmas flags a corrupted digit table") {
  auto p = p12();
  p.corrupt_digits = true;
  const auto rep = verify_lemmas(p, {0, 1}, 17);
  CHECK_FALSE(rep.all_pass());
  CHECK(rep.first_failure() == "digit_table");
}

TEST_CASE("verify report is byte-stable") {
  const auto p = p12();
  const auto a = verify_lemmas(p, {0, 1, 2}, 5).to_text(p);
  const auto b = verify_lemmas(p, {0, 1, 2}, 5).to_text(p);
  CHECK(a == b);
  const auto c = verify_lemmas(p, {0, 1, 2}, 6).to_text(p);
  CHECK(!a.empty());
  (void)c;  // different seed may legitimately differ in sampled details
}

TEST_CASE("select_n consistency against the constructed families") {
  const auto p = p12();
  const ExactRat eps = make_rat(1, 10);
  for (int e = 1; e <= 2; ++e) {
    for (int nn = 1; nn <= 3; ++nn) {
      const auto c = construction::c_subspace(nn, e, p);
      const auto [h2, h] = c.space.height(512);
      const auto res = select_n_large_e(h, eps, p, e);
      REQUIRE(res.ok);
      CHECK(std::abs(res.n_level - nn) <= 1);
    }
  }
  for (int nn = 1; nn <= 3; ++nn) {
    const auto dsub = construction::d_subspace(nn, 1, p);
    const auto [h2, h] = dsub.space.height(512);
    const auto res = select_n_small_e(h, eps, p, 1);
    REQUIRE(res.ok);
    CHECK(std::abs(res.n_level - nn) <= 1);
  }
  // Monotone in H: selected N never decreases as H grows.
  int last = -1;
  for (int nn = 1; nn <= 4; ++nn) {
    const auto c = construction::c_subspace(nn, 1, p);
    const auto res = select_n_large_e(c.space.height(512).second, eps, p, 1);
    REQUIRE(res.ok);
    CHECK(res.n_level >= last);
    last = res.n_level;
  }
  // Tiny heights: diagnostic instead of a level.
  const auto small = select_n_large_e(BigFloat::of(ExactRat(1), 128), eps, p, 1);
  CHECK_FALSE(small.ok);
  CHECK(!small.diagnostic.empty());
}

TEST_CASE("select_n hits the exact window when the height is safely inside") {
  const auto p = p12();
  const ExactRat eps = make_rat(1, 10);
  for (int e = 1; e <= 2; ++e) {
    const auto [qe, re] = p.qe_re(e);
    const ExactRat x = theorem_mu(p, e) + eps / 2 - 1;
    for (int k = 1; k <= 3; ++k) {
      // lambda = 2 * alpha^(k+q_e) lies strictly inside [alpha^(k+q_e), alpha^(k+q_e+1)).
      const ExactRat lam = 2 * rat_pow(p.alpha, k + qe);
      const BigFloat h = pow_rat_exponent(p.theta, lam / x, 512);
      const auto res = select_n_large_e(h, eps, p, e);
      REQUIRE(res.ok);
      CHECK(res.n_level == k);
    }
  }
  const ExactRat xs = (p.alpha - 1) / 1 + eps / 2;
  for (int k = 1; k <= 3; ++k) {
    const ExactRat lam = 2 * rat_pow(p.alpha, k) * p.d;
    const BigFloat h = pow_rat_exponent(p.theta, lam / xs, 512);
    const auto res = select_n_small_e(h, eps, p, 1);
    REQUIRE(res.ok);
    CHECK(res.n_level == k);
  }
}

TEST_CASE("C is the stated direct sum (lattice-level check, r_e > 0)") {
  // d=2, q=2, e=3: q_e = 1, r_e = 1.
  const auto p = ConstructionParams::create(2, 2, 5, ExactRat(10), DigitRule::AllTwos, 0, 3);
  for (int nn = 0; nn <= 1; ++nn) {
    const auto c = construction::c_subspace(nn, 3, p);
    CHECK(c.space.dim() == 3);
    const auto b = construction::b_subspace(nn + 1, 1, p);
    const auto d1 = construction::d_subspace(nn, 1, p);
    const auto total = lattice::sum(b.space, d1.space);
    CHECK(total.dim() == 3);
    CHECK(total.zbasis() == c.space.zbasis());
    const auto both = lattice::intersect(c.space, construction::d_subspace(nn, 2, p).space);
    CHECK(both.dim() == 1);  // only the X_N^1 line survives
  }
}

TEST_CASE("shortest_vector_enum basics") {
  // Z^2: shortest length 1.
  const auto z2 = shortest_vector_enum(IMat::identity(2), ExactRat(2));
  REQUIRE(z2.found);
  CHECK(z2.norm_sq == 1);
  // Basis (2,0),(1,2): shortest is (2,0) with norm^2 = 4 (candidates 4, 5, ...).
  const auto l = shortest_vector_enum(cols(2, {{2, 0}, {1, 2}}), ExactRat(9));
  REQUIRE(l.found);
  CHECK(l.norm_sq == 4);
  // Empty radius: no vector.
  const auto none = shortest_vector_enum(cols(2, {{5, 0}, {0, 5}}), ExactRat(8));
  CHECK_FALSE(none.found);
  CHECK_THROWS_AS(shortest_vector_enum(cols(2, {{1, 0}, {2, 0}}), ExactRat(4)), Error);
}

TEST_CASE("Minkowski bound holds on random rank-2 and rank-3 lattices") {
  SplitMix64 rng(300);
  int done = 0;
  while (done < 100) {
    const std::size_t rank = 2 + done % 2;
    IMat b(rank, rank);
    for (std::size_t i = 0; i < rank; ++i)
      for (std::size_t j = 0; j < rank; ++j) b(i, j) = rng.range(-6, 6);
    if (q_rank(to_rational(b)) != rank) continue;
    ++done;
    // det(L) = |det basis|; lambda_1 <= 2 (det(L)/V_rank)^(1/rank).
    const ExactInt det = abs(bareiss_det(b));
    const double detd = det.get_d();
    const double vball = rank == 2 ? M_PI : 4.0 * M_PI / 3.0;
    const double bound = 2.0 * std::pow(detd / vball, 1.0 / rank);
    const ExactRat radius_sq(std::ceil(bound * bound) + 1);
    const auto sv = shortest_vector_enum(b, radius_sq);
    REQUIRE(sv.found);  // Minkowski guarantees a vector inside the bound
    CHECK(sv.norm_sq.get_d() <= bound * bound * (1 + 1e-9));
  }
}

TEST_CASE("best approximation scan for the n=2 number") {
  const auto p = ConstructionParams::create(1, 1, 5, ExactRat(4), DigitRule::AllTwos, 0, 4);
  const ExactRat sigma = construction::sigma_trunc(0, 1, 3, p);
  const ExactRat err_bound = make_rat(4, int_pow(5, floor_pow(ExactRat(4), 4).get_ui()));
  const auto table = best_approx_enum_n2(sigma, err_bound, p.alpha, 10000);
  CHECK(table.no_fast_approx);
  // b = 1: error is the fractional distance to the nearest integer.
  REQUIRE(!table.records.empty());
  CHECK(table.records.front().denom == 1);
  CHECK(table.records.front().err == sigma);  // sigma in (0, 1/2)
  bool has5 = false, has625 = false;
  for (const auto& r : table.records) {
    if (r.denom == 5) {
      has5 = true;
      // tail: 2/5^4 + 2/5^16 + ... within 1% of 2/5^4
      const double tail = r.err.get_d() * std::pow(5.0, 4) / 2.0;
      CHECK(tail < 1.01);
      CHECK(tail > 0.99);
    }
    if (r.denom == 625) {
      has625 = true;
      const double tail = r.err.get_d() * std::pow(5.0, 16) / 2.0;
      CHECK(tail < 1.01);
      CHECK(tail > 0.99);
    }
  }
  CHECK(has5);
  CHECK(has625);
  // Guard: insufficient precision rejected.
  CHECK_THROWS_AS(best_approx_enum_n2(sigma, make_rat(1, 100), p.alpha, 10000), InfeasibleError);
}

TEST_CASE("csv export shape and determinism") {
  const auto p = p12();
  std::vector<ExponentEstimate> ests{estimate(p, Family::C, 1, {0, 1}),
                                     estimate(p, Family::C, 2, {0, 1})};
  const auto csv = exponents_csv(p, ests);
  CHECK(csv.rfind("d,q,theta,alpha,e,N,height_sq,psi_hex,ratio,target,rel_gap\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  const auto csv2 = exponents_csv(p, ests);
  CHECK(csv == csv2);
  const auto js = exponents_json(p, ests);
  CHECK(js.find("\"estimates\"") != std::string::npos);
}
