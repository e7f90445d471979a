#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "remu/benchmarks.hpp"
#include "remu/corrected.hpp"
#include "remu/diagnostics.hpp"
#include "remu/tn_experiment.hpp"

namespace fs = std::filesystem;
using namespace remu;

namespace {

struct Options {
  std::vector<std::string> problems;
  std::vector<std::string> variants;
  std::vector<std::string> weights;
  std::string set_size;  // empty selects the command's default
  std::string form = "printed";
  double budget_mult = 50.0;
  std::uint64_t seed = 0;
  double sigma = 1e-2;
  std::string out = ".";
  unsigned workers = 1;
  std::string input;
  // diagnose
  int dim = 2;
  double eps = 1e-2;
  int grid = 200;
  // tn-error
  std::size_t iterations = 100;
};

SetSize parse_set_size(const std::string& s) {
  if (s == "n+3") return SetSize::n_plus_3;
  if (s == "2n+1") return SetSize::two_n_plus_1;
  throw std::invalid_argument("--set-size must be n+3 or 2n+1");
}

SolverSpec parse_solver(const std::string& text, const SolverConfig& cfg) {
  if (text == "corrected") return SolverSpec::corrected(cfg);
  return SolverSpec::fixed(parse_weights(text), cfg);
}

std::vector<Variant> variants_of(const Options& o, std::vector<Variant> fallback) {
  if (o.variants.empty()) return fallback;
  std::vector<Variant> out;
  for (const auto& v : o.variants) out.push_back(parse_variant(v));
  return out;
}

fs::path output_dir(const Options& o) {
  fs::path dir(o.out);
  fs::create_directories(dir);
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

SolverConfig base_config(const Options& o) {
  SolverConfig cfg;
  cfg.set_size = parse_set_size(o.set_size.empty() ? "2n+1" : o.set_size);
  cfg.rng_seed = o.seed;
  return cfg;
}

int cmd_solve(const Options& o) {
  if (o.problems.size() != 1) throw std::invalid_argument("solve needs exactly one --problem");
  const std::string weights = o.weights.empty() ? "1/3,1/3,1/3" : o.weights.front();
  const SolverConfig cfg = base_config(o);
  const SolverSpec spec = parse_solver(weights, cfg);
  const TestProblem prob{find_problem(o.problems.front()), variants_of(o, {Variant::smooth}).front(), o.sigma, o.seed};
  const auto budget = static_cast<std::size_t>(std::ceil(o.budget_mult * (prob.base.n + 1)));
  const SolverResult res = run_solver(spec, make_objective(prob), prob.base.x0, budget, prob.key());

  const fs::path path = output_dir(o) / ("solve_" + prob.base.name + "_" + to_string(prob.variant) + ".json");
  open_out(path) << to_json(res).dump(2) << "\n";
  std::cout << std::setprecision(10) << prob.key() << " " << spec.name << ": f(x0) = " << res.history.front().second
            << ", best f = " << res.best_f << " after " << res.history.size() << " evaluations ("
            << to_string(res.termination) << ")\n"
            << "wrote " << path.string() << "\n";
  return 0;
}

int cmd_bench(const Options& o) {
  const SolverConfig cfg = base_config(o);
  std::vector<SolverSpec> solvers;
  const std::vector<std::string> names =
      o.weights.empty() ? std::vector<std::string>{"0,0,1", "1/3,1/3,1/3", "corrected"} : o.weights;
  for (const auto& w : names) solvers.push_back(parse_solver(w, cfg));
  const auto problems = make_problems(o.problems, variants_of(o, all_variants()), o.sigma, o.seed);
  const SuiteResult suite = run_suite(problems, solvers, o.budget_mult, o.workers);

  const fs::path dir = output_dir(o);
  {
    auto f = open_out(dir / "histories.csv");
    write_histories_csv(f, suite);
  }
  std::vector<double> alpha, beta;
  for (int i = 0; i <= 64; ++i) alpha.push_back(std::pow(2.0, i / 8.0));
  for (int i = 0; i <= static_cast<int>(o.budget_mult); ++i) beta.push_back(i);
  {
    auto f = open_out(dir / "profiles.csv");
    write_profiles_csv(f, suite, {1e-1, 1e-3, 1e-5, 1e-7}, alpha, beta);
  }
  std::size_t failures = 0;
  for (const auto& r : suite.runs) failures += r.failed;
  std::cout << suite.runs.size() << " runs (" << failures << " failed) over " << problems.size()
            << " problems; wrote histories.csv and profiles.csv to " << dir.string() << "\n";
  for (double tau : {1e-1, 1e-3, 1e-5}) {
    const auto t = suite.table(tau);
    std::cout << "tau = " << tau << ":";
    for (std::size_t a = 0; a < t.solvers.size(); ++a) {
      std::size_t solved = 0;
      for (double N : t.evals[a]) solved += std::isfinite(N);
      std::cout << "  [" << t.solvers[a] << "] " << solved << "/" << t.problems.size();
    }
    std::cout << "\n";
  }
  return 0;
}

int cmd_profiles(const Options& o) {
  if (o.input.empty()) throw std::invalid_argument("profiles needs --in histories.csv");
  std::ifstream in(o.input);
  if (!in) throw std::runtime_error("cannot read " + o.input);
  const SuiteResult suite = read_histories_csv(in);
  std::vector<double> alpha, beta;
  for (int i = 0; i <= 64; ++i) alpha.push_back(std::pow(2.0, i / 8.0));
  for (int i = 0; i <= static_cast<int>(o.budget_mult); ++i) beta.push_back(i);
  const fs::path path = output_dir(o) / "profiles.csv";
  auto f = open_out(path);
  write_profiles_csv(f, suite, {1e-1, 1e-3, 1e-5, 1e-7}, alpha, beta);
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

int cmd_diagnose(const Options& o) {
  if (o.dim < 1) throw std::invalid_argument("--dim must be positive");
  if (!(o.eps > 0.0 && o.eps < 1.0)) throw std::invalid_argument("--eps must lie in (0, 1)");
  if (o.grid < 2) throw std::invalid_argument("--grid must be at least 2");
  const ErrorForm form = o.form == "exact" ? ErrorForm::exact : ErrorForm::printed;
  auto surface = [&](double c1, double c2) { return limiting_error_terms({c1, c2}, o.dim, o.eps, form).e2; };
  const GridArgmin arg = region_grid_argmin(surface, o.eps, o.grid);
  const double target = (1.0 - o.eps) / 3.0;
  const BarycenterCheck bary = euclidean_barycenter_check(o.eps, o.grid);

  const fs::path path = output_dir(o) / "error_surface.csv";
  auto f = open_out(path);
  write_error_surface_csv(f, surface, o.eps, o.grid);
  std::cout << std::setprecision(8) << "n = " << o.dim << ", eps = " << o.eps << ", grid = " << o.grid << "\n"
            << "grid argmin of the limiting average error: (" << arg.c1 << ", " << arg.c2 << "), value " << arg.value
            << "\n"
            << "predicted minimizer: (" << target << ", " << target << ")\n"
            << "euclidean barycenter of the region: (" << bary.closed_form.c1 << ", " << bary.closed_form.c2
            << "), grid check " << (bary.verified ? "agrees" : "disagrees") << "\n"
            << "wrote " << path.string() << "\n";
  return 0;
}

int cmd_rosenbrock(const Options& o) {
  struct Published {
    double f;
    double x1, x2;
  };
  const std::vector<Published> published = {
      {0.0147, 1.0426, 1.0984}, {0.0193, 1.0421, 1.0992}, {0.0078, 1.0455, 1.1008}, {0.0031, 1.0495, 1.1040},
      {0.0203, 1.0418, 1.0990}, {0.0169, 1.0427, 1.0996}, {0.0242, 1.0412, 1.0991},
  };
  const ProblemDescriptor& rosen = find_problem("rosenbrock");
  const auto f = make_objective({rosen, Variant::smooth, 0.0, 0});
  Vector x0(2);
  x0 << 1.04, 1.1;
  SolverConfig cfg;
  cfg.delta0 = 1e-4;
  cfg.max_evals = 16;
  cfg.set_size = SetSize::two_n_plus_1;

  const fs::path path = output_dir(o) / "rosenbrock_example.csv";
  auto csv = open_out(path);
  csv << "weights,f,x1,x2,published_f,published_x1,published_x2\n";
  csv.precision(17);
  std::cout << "f(x0) = " << std::setprecision(6) << f(x0) << "\n"
            << std::left << std::setw(22) << "weights" << std::setw(12) << "final f" << std::setw(24) << "solution"
            << std::setw(12) << "published" << "published solution\n";
  const auto& rows = standard_weight_rows();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SolverResult res = run(f, x0, cfg, rows[i], "rosenbrock");
    const Vector& x = res.best_x;
    std::ostringstream sol, pub;
    sol << std::fixed << std::setprecision(4) << "(" << x[0] << ", " << x[1] << ")";
    pub << std::fixed << std::setprecision(4) << "(" << published[i].x1 << ", " << published[i].x2 << ")";
    std::ostringstream fv;
    fv << std::fixed << std::setprecision(4) << res.best_f;
    std::ostringstream label;
    label << std::setprecision(4) << rows[i].c1() << "," << rows[i].c2() << "," << rows[i].c3();
    std::cout << std::setw(22) << label.str() << std::setw(12) << fv.str() << std::setw(24) << sol.str()
              << std::setw(12) << published[i].f << pub.str() << "\n";
    csv << "\"" << format_weights(rows[i]) << "\"," << res.best_f << "," << x[0] << "," << x[1] << ","
        << published[i].f << "," << published[i].x1 << "," << published[i].x2 << "\n";
  }
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

int cmd_tn_error(const Options& o) {
  TnExperimentConfig cfg;
  const std::string name = o.problems.empty() ? "osborne2" : o.problems.front();
  const Variant variant = variants_of(o, {Variant::stoch_add_unif}).front();
  cfg.problem = TestProblem{find_problem(name), variant, o.sigma, o.seed};
  cfg.iterations = o.iterations;
  cfg.set_size = parse_set_size(o.set_size.empty() ? "n+3" : o.set_size);
  if (!o.weights.empty()) cfg.generator = parse_weights(o.weights.front());
  const TnExperimentResult res = tn_error_experiment(cfg);

  const fs::path dir = output_dir(o);
  {
    auto f = open_out(dir / "tn_error.csv");
    write_tn_error_csv(f, res);
  }
  {
    auto f = open_out(dir / "tn_quantiles.csv");
    write_tn_quantiles_csv(f, res);
  }
  std::cout << cfg.problem.key() << ": " << res.rows.size() / std::max<std::size_t>(1, res.weights.size())
            << " iterations, " << res.build_failures << " model build failures, " << res.singular_fallbacks
            << " least-squares step fallbacks\n"
            << std::left << std::setw(64) << "weights" << "q30         q50         q70\n";
  for (std::size_t w = 0; w < res.weights.size(); ++w) {
    const auto e = res.errors_for(w);
    if (e.empty()) continue;
    std::cout << std::setw(64) << format_weights(res.weights[w]) << std::fixed << std::setprecision(6)
              << std::setw(12) << quantile(e, 0.3) << std::setw(12) << quantile(e, 0.5) << quantile(e, 0.7)
              << "\n";
    std::cout.unsetf(std::ios::fixed);
  }
  std::cout << "wrote tn_error.csv and tn_quantiles.csv to " << dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ReMU derivative-free trust-region toolkit"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--problem", o.problems, "Problem name (repeatable)");
    sub->add_option("--variant", o.variants, "Variant name (repeatable)");
    sub->add_option("--weights", o.weights, "C1,C2,C3 or 'corrected' (repeatable for bench)");
    sub->add_option("--set-size", o.set_size, "n+3 or 2n+1")->check(CLI::IsMember({"n+3", "2n+1"}));
    sub->add_option("--budget-mult", o.budget_mult, "Evaluation budget per (n+1)")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "Noise seed");
    sub->add_option("--sigma", o.sigma, "Noise level")->check(CLI::NonNegativeNumber);
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--workers", o.workers, "Worker threads for bench")->check(CLI::PositiveNumber);
  };

  auto* solve = app.add_subcommand("solve", "Run one solver on one problem and write its JSON result");
  common(solve);
  auto* bench = app.add_subcommand("bench", "Run a benchmark suite and write histories.csv and profiles.csv");
  common(bench);
  auto* profiles = app.add_subcommand("profiles", "Recompute profiles.csv from a histories.csv");
  common(profiles);
  profiles->add_option("--in", o.input, "histories.csv to read")->required();
  auto* diagnose = app.add_subcommand("diagnose", "Limiting KKT error surface over the coefficient region");
  diagnose->add_option("--dim", o.dim, "Problem dimension n");
  diagnose->add_option("--eps", o.eps, "Lower bound on C3");
  diagnose->add_option("--grid", o.grid, "Grid points per axis");
  diagnose->add_option("--form", o.form, "printed or exact error terms")->check(CLI::IsMember({"printed", "exact"}));
  diagnose->add_option("--out", o.out, "Output directory");
  auto* rosen = app.add_subcommand("rosenbrock-example", "Seven weight rows on the 2-D Rosenbrock example");
  rosen->add_option("--out", o.out, "Output directory");
  auto* tn = app.add_subcommand("tn-error", "Truncated Newton step errors along one generator trajectory");
  common(tn);
  tn->add_option("--iterations", o.iterations, "Generator iterations");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*solve) return cmd_solve(o);
    if (*bench) return cmd_bench(o);
    if (*profiles) return cmd_profiles(o);
    if (*diagnose) return cmd_diagnose(o);
    if (*rosen) return cmd_rosenbrock(o);
    if (*tn) return cmd_tn_error(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
