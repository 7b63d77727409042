// Acceptance suite: one criterion per section, one PASS/FAIL line each.
// Exits 0 only if every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dioph/cli.hpp"
#include "dioph/exterior.hpp"
#include "dioph/experiments.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace dioph;
using construction::ConstructionParams;
using construction::DigitRule;
using experiments::Family;

namespace {

struct Criterion {
  std::string name;
  double limit_s;
  std::function<void()> body;
};

struct Failure {
  std::string what;
};

void require(bool cond, const std::string& msg) {
  if (!cond) throw Failure{msg};
}

IMat random_frame(SplitMix64& rng, std::size_t n, std::size_t g, long lo = -9, long hi = 9) {
  IMat m(n, g);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < g; ++j) m(i, j) = rng.range(lo, hi);
  return m;
}

QMat random_rational_basis(SplitMix64& rng, std::size_t n, std::size_t k) {
  while (true) {
    QMat m(n, k);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < k; ++j) m(i, j) = make_rat(rng.range(-5, 5), rng.range(1, 3));
    if (q_rank(m) == k) return m;
  }
}

ConstructionParams config_11() { return ConstructionParams::create(1, 1, 5, ExactRat(4), DigitRule::AllTwos, 0, 4); }
ConstructionParams config_12() { return ConstructionParams::create(1, 2, 5, ExactRat(4), DigitRule::AllTwos, 0, 6); }
ConstructionParams config_21() { return ConstructionParams::create(2, 1, 5, ExactRat(10), DigitRule::AllTwos, 0, 4); }
ConstructionParams config_22() { return ConstructionParams::create(2, 2, 5, ExactRat(10), DigitRule::AllTwos, 0, 4); }

// ---------------------------------------------------------------------------

void criterion_exact_algebra() {
  SplitMix64 rng(20250811);
  for (int iter = 0; iter < 200; ++iter) {
    const std::size_t n = 4 + rng.below(4);            // 4..7
    const std::size_t g = 1 + rng.below(std::min<std::size_t>(4, n));  // 1..4
    const IMat v = random_frame(rng, n, g);
    const QMat q = to_rational(v);
    const ExactRat gram = q_det(q.transpose() * q);
    require(exterior::norm_sq(exterior::wedge(v)) == gram, "Cauchy-Binet mismatch");
  }
  // Antisymmetry and unimodular invariance, exact.
  for (int iter = 0; iter < 40; ++iter) {
    const IMat v = random_frame(rng, 6, 3);
    IMat sw = v;
    for (std::size_t i = 0; i < 6; ++i) std::swap(sw(i, 0), sw(i, 1));
    const auto w1 = exterior::wedge(v), w2 = exterior::wedge(sw);
    for (std::size_t k = 0; k < w1.coords().size(); ++k)
      require(w1.coord(k) == -w2.coord(k), "antisymmetry violated");
    IMat u = IMat::identity(3);
    for (int s = 0; s < 6; ++s) {
      const std::size_t a = rng.below(3);
      std::size_t b = rng.below(3);
      if (a == b) b = (b + 1) % 3;
      const long f = rng.range(-2, 2);
      for (std::size_t i = 0; i < 3; ++i) u(i, a) += f * u(i, b);
    }
    const ExactInt du = bareiss_det(u);
    require(abs(du) == 1, "unimodular generator broken");
    const auto w3 = exterior::wedge(v * u);
    for (std::size_t k = 0; k < w1.coords().size(); ++k)
      require(w3.coord(k) == (du == 1 ? w1.coord(k) : ExactRat(-w1.coord(k))),
              "unimodular invariance violated");
  }
}

void criterion_zbasis_lemma() {
  for (const auto& p : {config_11(), config_12(), config_21()}) {
    for (int nn = 0; nn <= 2; ++nn) {
      for (int v = 1; v <= p.q; ++v) {
        const auto b = construction::b_subspace(nn, v, p);
        require(b.space.dim() == p.d * v, "dim(B_{N,v}) != dv");
        require(lattice::hnf_columns(b.claimed_zbasis, false).h == b.space.zbasis(),
                "claimed basis of B is not a Z-basis (HNF mismatch)");
      }
      for (int e = 1; e <= p.d; ++e) {
        const auto dsub = construction::d_subspace(nn, e, p);
        require(lattice::hnf_columns(dsub.claimed_zbasis, false).h == dsub.space.zbasis(),
                "D_{N,e} generators are not a Z-basis");
      }
    }
  }
}

void criterion_height_windows() {
  for (const auto& p : {config_11(), config_12(), config_21()}) {
    for (int e = p.d; e <= p.qd(); ++e) {
      const auto [qe, re] = p.qe_re(e);
      double lo = 1e300, hi = 0;
      for (int nn = 0; nn <= 2; ++nn) {
        const auto c = construction::c_subspace(nn, e, p);
        const ExactInt expo =
            ExactInt(re) * floor_pow(p.alpha, nn) + ExactInt(p.d - re) * floor_pow(p.alpha, nn + 1);
        require(int_pow(p.theta, 2 * expo.get_ui()) <= c.space.height_sq(),
                "exact height lower bound fails for C");
        const ExactRat rexpo =
            ExactRat(re) * rat_pow(p.alpha, nn) + ExactRat(p.d - re) * rat_pow(p.alpha, nn + 1);
        const BigFloat r2 = BigFloat::of(c.space.height_sq(), 8192) /
                            pow_rat_exponent(p.theta, 2 * rexpo, 8192);
        const double r = std::sqrt(r2.to_double());
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
      require(hi / lo < 4.0, "height ratio window for C wider than factor 4");
    }
    for (int e = 1; e <= p.d; ++e) {
      double lo = 1e300, hi = 0;
      for (int nn = 0; nn <= 2; ++nn) {
        const auto dsub = construction::d_subspace(nn, e, p);
        const ExactInt expo = ExactInt(e) * floor_pow(p.alpha, nn);
        require(int_pow(p.theta, 2 * expo.get_ui()) <= dsub.space.height_sq(),
                "exact height lower bound fails for D");
        const BigFloat r2 =
            BigFloat::of(dsub.space.height_sq(), 8192) /
            pow_rat_exponent(p.theta, 2 * ExactRat(e) * rat_pow(p.alpha, nn), 8192);
        const double r = std::sqrt(r2.to_double());
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
      require(hi / lo < 4.0, "height ratio window for D wider than factor 4");
    }
  }
}

void criterion_slopes_n3() {
  const auto p = config_12();
  const long bits = p.precision_budget(3).bits;
  require(bits >= 76073 && bits <= 86000, "precision budget not ~80k bits");
  for (int e = 1; e <= 2; ++e) {
    const auto est = experiments::estimate(p, Family::C, e, {3});
    const double target = e == 1 ? 4.0 : 16.0;
    const double ratio = est.last_ratio.to_double();
    require(std::abs(ratio - target) / target < 0.10,
            "ratio at N=3 off by more than 10% for e=" + std::to_string(e));
  }
}

void criterion_slopes_n4() {
  const auto p = config_21();
  const long bits = p.precision_budget(2).bits;
  require(bits >= 464387 && bits <= 480000, "precision budget not ~500k bits");
  const auto est1 = experiments::estimate(p, Family::D, 1, {2});
  require(std::abs(est1.last_ratio.to_double() - 10.0) / 10.0 < 0.15,
          "ratio at N=2 off by more than 15% for e=1");
  const auto est2 = experiments::estimate(p, Family::C, 2, {2});
  require(std::abs(est2.last_ratio.to_double() - 5.0) / 5.0 < 0.15,
          "ratio at N=2 off by more than 15% for e=2");
}

void criterion_cd_values() {
  const ExactRat tol = make_rat(1, 1000000);
  const ExactRat c11 = construction::compute_Cd(1, 1, tol);
  const BigFloat ref = BigFloat::of(2L, 256) + sqrt(BigFloat::of(3L, 256));
  require(abs(BigFloat::of(c11, 256) - ref) <= BigFloat::of(tol, 256),
          "C_d(1,1) not within 1e-6 of 2+sqrt(3)");
  const ExactRat c21 = construction::compute_Cd(2, 1, tol);
  require(abs(BigFloat::of(c21, 256) - BigFloat::of(10L, 256)) <= BigFloat::of(tol, 256),
          "C_d(2,1) not within 1e-6 of 10");
  require(c11 <= ExactRat(15), "C_1 above 3d(d+4)");
  require(c21 <= ExactRat(36), "C_2 above 3d(d+4)");
}

void criterion_psi_oracles() {
  SplitMix64 rng(777);
  int done = 0;
  while (done < 100) {
    const std::size_t n = 3 + rng.below(3);  // 3..5
    const std::size_t da = 1 + rng.below(2);
    const std::size_t db = 1 + rng.below(n - 1);
    const std::size_t small = std::min(da, db), big = std::max(da, db);
    if (small > 3) continue;
    const QMat a = random_rational_basis(rng, n, small);
    const QMat b = random_rational_basis(rng, n, big);
    const auto rep = angles::psi_profile(a, b, 256);
    const auto sin2 = angles::psi_profile_exact_oracle(a, b);
    require(static_cast<int>(sin2.size()) == rep.t, "oracle root count mismatch");
    for (int j = 0; j < rep.t; ++j) {
      const BigFloat oracle = sqrt(BigFloat::of(sin2[j], 512));
      const BigFloat tol = BigFloat::pow2(-64, 64) * (oracle + BigFloat::pow2(-200, 64));
      require(abs(oracle - rep.psi[j]) <= tol, "oracle and certified profile disagree at 2^-64");
    }
    ++done;
  }
  // Grid brute force against psi_1 on 50 low-dimensional pairs.
  for (int iter = 0; iter < 50; ++iter) {
    const std::size_t n = 3 + rng.below(2);
    const std::size_t da = 1 + rng.below(2);
    const std::size_t db = 1 + rng.below(2);
    const QMat a = random_rational_basis(rng, n, da);
    const QMat b = random_rational_basis(rng, n, db);
    const auto rep = angles::psi_profile(a, b, 192);
    const double bf = angles::psi_min_bruteforce(a, b, 5);
    require(std::abs(bf - rep.psi[0].to_double()) < 1e-6,
            "grid brute force disagrees with psi_1 beyond 1e-6");
  }
}

void criterion_best_approx() {
  const auto p = config_11();
  const ExactRat sigma = construction::sigma_trunc(0, 1, 3, p);
  const ExactRat err_bound = make_rat(4, int_pow(5, floor_pow(ExactRat(4), 4).get_ui()));
  const auto table = experiments::best_approx_enum_n2(sigma, err_bound, p.alpha, 10000);
  bool has5 = false, has625 = false;
  for (const auto& r : table.records) {
    if (r.denom == 5) {
      has5 = true;
      const double t = r.err.get_d() * std::pow(5.0, 4) / 2.0;
      require(std::abs(t - 1.0) < 0.01, "record error at b=5 does not match the series tail");
    }
    if (r.denom == 625) {
      has625 = true;
      const double t = r.err.get_d() * std::pow(5.0, 16) / 2.0;
      require(std::abs(t - 1.0) < 0.01, "record error at b=5^4 does not match the series tail");
    }
  }
  require(has5 && has625, "records at b in {5, 5^4} missing");
  require(table.no_fast_approx, "some b >= 2 beats the b^(-4.5) floor");
}

void criterion_minkowski_ideal_norm() {
  // N(I) <= 6^(2d) on sampled B_{N+1,v} + W concatenations. The (1,2) config
  // only admits W = {0}; (2,2) exercises r in {0,1}.
  for (const auto& p : {config_12(), config_22()}) {
    SplitMix64 rng(4242);
    const ExactInt cap = int_pow(6, 2 * p.d);
    for (int v = 1; v <= p.q - 1; ++v)
      for (int r = 0; r <= p.d - 1; ++r)
        for (int nn = 0; nn <= 1; ++nn) {
          for (int s = 0; s < (r == 0 ? 1 : 10); ++s) {
            IMat xn(p.n, p.d);
            for (int j = 1; j <= p.d; ++j) {
              const IVec x = construction::x_vec(nn, j, p);
              for (int i = 0; i < p.n; ++i) xn(i, j - 1) = x[i];
            }
            IMat w_span;
            if (r > 0) {
              IMat coef(p.d, r);
              do {
                for (int i = 0; i < p.d; ++i)
                  for (int c = 0; c < r; ++c) coef(i, c) = rng.range(-3, 3);
              } while (q_rank(to_rational(coef)) != static_cast<std::size_t>(r));
              w_span = xn * coef;
            }
            const auto b = construction::b_subspace(nn + 1, v, p);
            IMat concat(p.n, p.d * v + r);
            for (int i = 0; i < p.n; ++i)
              for (std::size_t c = 0; c < b.claimed_zbasis.cols(); ++c)
                concat(i, c) = b.claimed_zbasis(i, c);
            if (r > 0) {
              const IMat wz = lattice::z_basis(w_span);
              for (int i = 0; i < p.n; ++i)
                for (int c = 0; c < r; ++c) concat(i, p.d * v + c) = wz(i, c);
            }
            const auto s_sum = lattice::RationalSubspace::from_integer_span(concat);
            const ExactInt ni = lattice::ideal_norm(concat, s_sum);
            require(ni <= cap, "N(I) exceeds 6^(2d)");
          }
        }
  }
  // Minkowski determinant bound on 100 random rank-2/3 lattices.
  SplitMix64 rng(321);
  int done = 0;
  while (done < 100) {
    const std::size_t rank = 2 + done % 2;
    IMat b(rank, rank);
    for (std::size_t i = 0; i < rank; ++i)
      for (std::size_t j = 0; j < rank; ++j) b(i, j) = rng.range(-7, 7);
    if (q_rank(to_rational(b)) != rank) continue;
    ++done;
    const ExactInt det = abs(bareiss_det(b));
    const double vball = rank == 2 ? M_PI : 4.0 * M_PI / 3.0;
    const double bound = 2.0 * std::pow(det.get_d() / vball, 1.0 / rank);
    const auto sv =
        experiments::shortest_vector_enum(b, ExactRat(static_cast<long>(std::ceil(bound * bound)) + 1));
    require(sv.found, "Minkowski radius contains no lattice vector");
    require(sv.norm_sq.get_d() <= bound * bound * (1 + 1e-9), "shortest vector above Minkowski bound");
  }
}

void criterion_determinism() {
  const std::string params = "acceptance_params.json";
  {
    std::ofstream f(params);
    f << config_12().to_json();
  }
  auto run_cli = [&](std::vector<std::string> args) {
    std::ostringstream out, err;
    const int rc = cli::run(std::move(args), out, err);
    require(rc == 0, "cli run failed: " + err.str());
    return out.str();
  };
  const auto v1 = run_cli({"verify", "--params", params, "--n-range", "0..2", "--seed", "3",
                           "--threads", "1"});
  const auto v2 = run_cli({"verify", "--params", params, "--n-range", "0..2", "--seed", "3",
                           "--threads", "4"});
  require(v1 == v2 && !v1.empty(), "verify reports differ across thread counts");
  const auto e1 = run_cli({"exponents", "--params", params, "--e", "1,2", "--n-range", "1..2",
                           "--seed", "3", "--threads", "1"});
  const auto e2 = run_cli({"exponents", "--params", params, "--e", "1,2", "--n-range", "1..2",
                           "--seed", "3", "--threads", "4"});
  require(e1 == e2 && !e1.empty(), "exponent reports differ across thread counts");
  const auto e3 = run_cli({"exponents", "--params", params, "--e", "1,2", "--n-range", "1..2",
                           "--seed", "3", "--threads", "2"});
  require(e1 == e3, "exponent reports differ across repeated runs");
  // rel_gap < 0.15 at the largest N in the shipped default config.
  std::stringstream ss(e1);
  std::string line;
  std::getline(ss, line);  // header
  while (std::getline(ss, line)) {
    const auto pos = line.rfind(',');
    require(pos != std::string::npos, "malformed csv");
    const double gap = std::stod(line.substr(pos + 1));
    require(gap < 0.15, "rel_gap >= 0.15 in shipped config");
  }
  std::remove(params.c_str());
}

}  // namespace

int main() {
  std::vector<Criterion> criteria{
      {"exact-algebra (Cauchy-Binet, antisymmetry, unimodular)", 10.0, criterion_exact_algebra},
      {"z-basis lemma over (1,1),(1,2),(2,1)", 60.0, criterion_zbasis_lemma},
      {"height windows for C and D families", 120.0, criterion_height_windows},
      {"exponent slopes d=1,q=2,alpha=4 at N=3", 300.0, criterion_slopes_n3},
      {"exponent slopes d=2,q=1,alpha=10 at N=2", 1200.0, criterion_slopes_n4},
      {"admissibility thresholds C_d", 5.0, criterion_cd_values},
      {"psi oracle equivalence (char-poly + grid)", 300.0, criterion_psi_oracles},
      {"n=2 best-approximation records", 60.0, criterion_best_approx},
      {"Minkowski / ideal norm suite", 120.0, criterion_minkowski_ideal_norm},
      {"determinism across runs and thread counts", 300.0, criterion_determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    std::printf("[%2zu/%zu] %-55s ", i + 1, criteria.size(), c.name.c_str());
    std::fflush(stdout);
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body();
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (secs > c.limit_s) {
        ++failures;
        std::printf("FAIL (runtime %.1f s over limit %.0f s)\n", secs, c.limit_s);
      } else {
        std::printf("PASS (%.2f s)\n", secs);
      }
    } catch (const Failure& f) {
      ++failures;
      std::printf("FAIL (%s)\n", f.what.c_str());
    } catch (const std::exception& e) {
      ++failures;
      std::printf("FAIL (exception: %s)\n", e.what());
    }
  }
  std::printf("acceptance: %zu/%zu criteria passed\n", criteria.size() - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
