#include "dioph/exterior.hpp"

#include <json.hpp>

#include <stdexcept>

namespace dioph::exterior {

std::vector<std::vector<int>> lex_subsets(int n, int g) {
  std::vector<std::vector<int>> out;
  if (g < 0 || g > n) return out;
  std::vector<int> cur(g);
  for (int i = 0; i < g; ++i) cur[i] = i;
  while (true) {
    out.push_back(cur);
    int i = g - 1;
    while (i >= 0 && cur[i] == n - g + i) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < g; ++j) cur[j] = cur[j - 1] + 1;
  }
  if (g == 0) out.assign(1, {});
  return out;
}

long long binomial(int n, int g) {
  if (g < 0 || g > n) return 0;
  long long r = 1;
  for (int i = 1; i <= g; ++i) r = r * (n - g + i) / i;
  return r;
}

Multivector::Multivector(int n, int grade, QVec coords) : n_(n), grade_(grade), coords_(std::move(coords)) {
  if (static_cast<long long>(coords_.size()) != binomial(n, grade))
    throw Error("Multivector: coordinate count must be C(n, grade)");
}

bool Multivector::is_zero() const {
  for (const auto& c : coords_)
    if (c != 0) return false;
  return true;
}

bool Multivector::integral() const {
  for (const auto& c : coords_)
    if (c.get_den() != 1) return false;
  return true;
}

std::string Multivector::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = n_;
  j["grade"] = grade_;
  auto subsets = lex_subsets(n_, grade_);
  nlohmann::ordered_json coords = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < coords_.size(); ++k) {
    nlohmann::ordered_json sub = nlohmann::ordered_json::array();
    nlohmann::ordered_json idx = nlohmann::ordered_json::array();
    for (int i : subsets[k]) idx.push_back(i + 1);  // 1-based in the interchange form
    sub.push_back(idx);
    sub.push_back(rat_to_string(coords_[k]));
    coords.push_back(sub);
  }
  j["coords"] = coords;
  return j.dump();
}

Multivector Multivector::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  const int n = j.at("n").get<int>();
  const int grade = j.at("grade").get<int>();
  auto subsets = lex_subsets(n, grade);
  QVec coords(subsets.size(), ExactRat(0));
  for (const auto& entry : j.at("coords")) {
    std::vector<int> idx;
    for (const auto& v : entry.at(0)) idx.push_back(v.get<int>() - 1);
    const ExactRat val = rat_from_string(entry.at(1).get<std::string>());
    bool placed = false;
    for (std::size_t k = 0; k < subsets.size(); ++k) {
      if (subsets[k] == idx) {
        coords[k] = val;
        placed = true;
        break;
      }
    }
    if (!placed) throw Error("Multivector::from_json: bad subset index");
  }
  return Multivector(n, grade, std::move(coords));
}

namespace {

ExactInt minor_bareiss(const IMat& m, const std::vector<int>& rows) {
  const std::size_t g = rows.size();
  IMat sub(g, g);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j) sub(i, j) = m(rows[i], j);
  return bareiss_det(sub);
}

ExactInt minor_laplace(const IMat& m, const std::vector<int>& rows) {
  const std::size_t g = rows.size();
  IMat sub(g, g);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j) sub(i, j) = m(rows[i], j);
  return laplace_det(sub);
}

Multivector wedge_impl(const IMat& vectors, const ExactRat& scale, bool parallel) {
  const int n = static_cast<int>(vectors.rows());
  const int g = static_cast<int>(vectors.cols());
  if (g > n) throw Error("wedge: more vectors than ambient dimension");
  const auto subsets = lex_subsets(n, g);
  QVec coords(subsets.size());
  const long long count = static_cast<long long>(subsets.size());
  if (parallel) {
    // Per-minor cost below roughly a matrix scan does not amortize the
    // scheduling; run those batches inline.
    std::size_t max_bits = 1;
    for (std::size_t i = 0; i < vectors.rows(); ++i)
      for (std::size_t j = 0; j < vectors.cols(); ++j)
        max_bits = std::max(max_bits, mpz_sizeinbase(vectors(i, j).get_mpz_t(), 2));
    const bool worth_it = count >= 8 && static_cast<long long>(max_bits) * g * g * count > 200000;
#pragma omp parallel for schedule(dynamic, 4) if (worth_it)
    for (long long k = 0; k < count; ++k) {
      coords[k] = ExactRat(minor_bareiss(vectors, subsets[k])) * scale;
    }
  } else {
    for (long long k = 0; k < count; ++k) {
      coords[k] = ExactRat(minor_laplace(vectors, subsets[k])) * scale;
    }
  }
  return Multivector(n, g, std::move(coords));
}

}  // namespace

Multivector wedge(const IMat& vectors) { return wedge_impl(vectors, ExactRat(1), true); }

Multivector wedge_serial(const IMat& vectors) { return wedge_impl(vectors, ExactRat(1), false); }

Multivector wedge(const QMat& vectors) {
  auto [ints, scales] = clear_denominators(vectors);
  ExactRat scale(1);
  for (const auto& s : scales) scale /= ExactRat(s);
  return wedge_impl(ints, scale, true);
}

ExactRat norm_sq(const Multivector& m) {
  ExactRat acc(0);
  for (const auto& c : m.coords()) acc += c * c;
  return acc;
}

Multivector primitive_normalize(const Multivector& m) {
  if (!m.integral()) throw Error("primitive_normalize: coordinates must be integral");
  if (m.is_zero()) throw Error("primitive_normalize: zero multivector");
  ExactInt g(0);
  for (const auto& c : m.coords()) {
    ExactInt t;
    mpz_gcd(t.get_mpz_t(), g.get_mpz_t(), c.get_num().get_mpz_t());
    g = t;
  }
  int sign = 0;
  for (const auto& c : m.coords()) {
    if (c != 0) {
      sign = sgn(c) > 0 ? 1 : -1;
      break;
    }
  }
  if (sign < 0) g = -g;
  QVec out(m.coords().size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = m.coord(k) / ExactRat(g);
  return Multivector(m.n(), m.grade(), std::move(out));
}

}  // namespace dioph::exterior
