#include "dioph/cli.hpp"

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include <fstream>
#include <sstream>

#include "dioph/experiments.hpp"

namespace dioph::cli {

namespace {

using construction::ConstructionParams;
using experiments::Family;

ExactRat parse_rat_flexible(const std::string& s) {
  if (s.find('e') != std::string::npos || s.find('E') != std::string::npos ||
      s.find('.') != std::string::npos) {
    const double d = std::stod(s);
    ExactRat q;
    mpq_set_d(q.get_mpq_t(), d);
    return q;
  }
  return rat_from_string(s);
}

std::pair<int, int> parse_range(const std::string& s) {
  const auto pos = s.find("..");
  if (pos == std::string::npos) {
    const int v = std::stoi(s);
    return {v, v};
  }
  const int a = std::stoi(s.substr(0, pos));
  const int b = std::stoi(s.substr(pos + 2));
  if (b < a) throw InfeasibleError("bad N range '" + s + "'");
  return {a, b};
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  if (out.empty()) throw InfeasibleError("empty list '" + s + "'");
  return out;
}

ConstructionParams load_params(const std::string& path, std::uint64_t seed_override,
                               bool has_seed) {
  std::ifstream in(path);
  if (!in) throw InfeasibleError("cannot open params file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  auto p = ConstructionParams::from_json(ss.str());
  if (has_seed) p.seed = seed_override;
  return p;
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw InfeasibleError("cannot write to '" + out_path + "'");
  f << text;
}

void set_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  // Normalize `--command X` into a leading subcommand.
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--command" && i + 1 < args.size()) {
      const std::string cmd = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      args.insert(args.begin(), cmd);
      break;
    }
  }

  CLI::App app{"exact-arithmetic laboratory for heights, angles and exponents of rational subspaces"};
  app.require_subcommand(0, 1);

  // cd
  auto* cmd_cd = app.add_subcommand("cd", "admissibility threshold for alpha at given (d, q)");
  int cd_d = 1, cd_q = 1;
  std::string cd_tol = "1e-6";
  cmd_cd->add_option("--d", cd_d, "block dimension d")->required();
  cmd_cd->add_option("--q", cd_q, "ratio q (ambient n = (q+1)d)")->required();
  cmd_cd->add_option("--tol", cd_tol, "bisection tolerance (rational or decimal)");

  // shared flags
  std::string params_path, out_path, format = "csv", n_range = "0..2", e_list;
  std::uint64_t seed = 0;
  bool has_seed = false;
  int threads = 0;
  long precision_bits = 0;
  bool corrupt = false;

  auto add_common = [&](CLI::App* c, bool with_format_default_json) {
    c->add_option("--params", params_path, "params JSON file")->required();
    c->add_option("--out", out_path, "output path (default: stdout)");
    c->add_option("--n-range", n_range, "N levels, e.g. 0..3");
    c->add_option("--seed", seed, "seed for sampled checks / seeded digit rule")
        ->each([&](const std::string&) { has_seed = true; });
    c->add_option("--threads", threads, "worker threads (default: all cores)");
    if (with_format_default_json) c->add_option("--format", format, "csv or json");
  };

  auto* cmd_verify = app.add_subcommand("verify", "run the lemma verification suite");
  add_common(cmd_verify, false);
  cmd_verify->add_option("--format", format, "text or json");
  cmd_verify->add_flag("--corrupt-digits", corrupt, "test hook: plant an off-support digit")
      ->group("");  // hidden

  auto* cmd_exponents = app.add_subcommand("exponents", "measure exponent ratios per e");
  add_common(cmd_exponents, true);
  cmd_exponents->add_option("--e", e_list, "comma list of subspace dimensions e");
  cmd_exponents->add_option("--precision-bits", precision_bits, "override the precision budget");

  auto* cmd_oracle = app.add_subcommand("oracle", "n=2 exhaustive best-approximation scan");
  long qmax = 10000;
  int sigma_order = 3;
  cmd_oracle->add_option("--params", params_path, "params JSON file")->required();
  cmd_oracle->add_option("--out", out_path, "output path (default: stdout)");
  cmd_oracle->add_option("--qmax", qmax, "largest denominator scanned");
  cmd_oracle->add_option("--sigma-order", sigma_order, "truncation order of the scanned number");

  std::vector<const char*> argv;
  argv.push_back("diophlab");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (app.got_subcommand(cmd_cd)) {
      const ExactRat tol = parse_rat_flexible(cd_tol);
      const ExactRat bound = construction::compute_Cd(cd_d, cd_q, tol);
      std::ostringstream os;
      os << "C_d(d=" << cd_d << ",q=" << cd_q << ") <= " << rat_to_string(bound) << " ~= "
         << BigFloat::of(bound, 128).fixed(6) << "\n";
      emit(os.str(), out_path, out);
      return 0;
    }

    if (app.got_subcommand(cmd_verify)) {
      set_threads(threads);
      auto p = load_params(params_path, seed, has_seed);
      p.corrupt_digits = corrupt;
      const auto [n_lo, n_hi] = parse_range(n_range);
      std::vector<int> levels;
      for (int v = n_lo; v <= n_hi; ++v) levels.push_back(v);
      const auto report = experiments::verify_lemmas(p, levels, p.seed);
      emit(format == "json" ? report.to_json(p) : report.to_text(p), out_path, out);
      if (!report.all_pass()) {
        err << "verification failed: " << report.first_failure() << "\n";
        return 1;
      }
      return 0;
    }

    if (app.got_subcommand(cmd_exponents)) {
      set_threads(threads);
      const auto p = load_params(params_path, seed, has_seed);
      const auto [n_lo, n_hi] = parse_range(n_range);
      std::vector<int> levels;
      for (int v = n_lo; v <= n_hi; ++v) levels.push_back(v);
      std::vector<int> es;
      if (e_list.empty())
        for (int e = 1; e <= p.qd(); ++e) es.push_back(e);
      else
        es = parse_int_list(e_list);
      std::vector<experiments::ExponentEstimate> ests;
      for (int e : es) {
        if (e < 1 || e > p.qd()) throw InfeasibleError("e out of range: " + std::to_string(e));
        const Family fam = e < p.d ? Family::D : Family::C;
        ests.push_back(experiments::estimate(p, fam, e, levels, precision_bits));
      }
      emit(format == "json" ? experiments::exponents_json(p, ests)
                            : experiments::exponents_csv(p, ests),
           out_path, out);
      return 0;
    }

    if (app.got_subcommand(cmd_oracle)) {
      const auto p = load_params(params_path, seed, has_seed);
      if (p.n != 2) throw InfeasibleError("oracle requires the n = 2 configuration (d = q = 1)");
      const ExactRat sigma_hat = construction::sigma_trunc(0, 1, sigma_order, p);
      const ExactInt fl = floor_pow(p.alpha, sigma_order + 1);
      const ExactRat sigma_err = make_rat(4, int_pow(p.theta, fl.get_ui()));
      const auto table = experiments::best_approx_enum_n2(sigma_hat, sigma_err, p.alpha, qmax);
      std::ostringstream os;
      os << "b,a,err\n";
      for (const auto& rec : table.records)
        os << rec.denom << ',' << rec.numer.get_str() << ',' << rat_to_string(rec.err) << "\n";
      os << "no_fast_approx," << (table.no_fast_approx ? "true" : "false") << ",\n";
      emit(os.str(), out_path, out);
      return 0;
    }
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const PrecisionError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  err << app.help();
  return 2;
}

}  // namespace dioph::cli
