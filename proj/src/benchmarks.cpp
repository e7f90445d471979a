#include "remu/benchmarks.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <map>
#include <set>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace remu {

double f_accuracy(const std::vector<double>& history, double f0, double f_best) {
  if (!(f_best < f0)) throw std::invalid_argument("f_accuracy: f_best must be below f0");
  if (history.empty()) return 0.0;
  const double fN = *std::min_element(history.begin(), history.end());
  return std::clamp((fN - f0) / (f_best - f0), 0.0, 1.0);
}

double evals_to_accuracy(const std::vector<double>& history, double tau, double f0, double f_best,
                         std::size_t n_max) {
  if (!(f_best < f0)) throw std::invalid_argument("evals_to_accuracy: f_best must be below f0");
  const double target = 1.0 - tau;
  double best = std::numeric_limits<double>::infinity();
  const std::size_t limit = std::min(n_max, history.size());
  for (std::size_t N = 1; N <= limit; ++N) {
    best = std::min(best, history[N - 1]);
    if (std::clamp((best - f0) / (f_best - f0), 0.0, 1.0) >= target) return static_cast<double>(N);
  }
  return kUnsolved;
}

ProfileCurves performance_profile(const ProfileTable& table, const std::vector<double>& alpha_grid) {
  const std::size_t S = table.solvers.size(), P = table.problems.size();
  std::vector<std::vector<double>> ratio(S, std::vector<double>(P, kUnsolved));
  for (std::size_t p = 0; p < P; ++p) {
    double best = kUnsolved;
    for (std::size_t a = 0; a < S; ++a) best = std::min(best, table.at(a, p));
    if (best == kUnsolved) continue;
    for (std::size_t a = 0; a < S; ++a) ratio[a][p] = table.at(a, p) / best;
  }
  ProfileCurves out;
  for (std::size_t a = 0; a < S; ++a) {
    auto& curve = out[table.solvers[a]];
    for (double alpha : alpha_grid) {
      std::size_t hits = 0;
      for (std::size_t p = 0; p < P; ++p) hits += ratio[a][p] <= alpha;
      curve.push_back(P ? static_cast<double>(hits) / static_cast<double>(P) : 0.0);
    }
  }
  return out;
}

ProfileCurves data_profile(const ProfileTable& table, const std::vector<double>& beta_grid) {
  const std::size_t S = table.solvers.size(), P = table.problems.size();
  ProfileCurves out;
  for (std::size_t a = 0; a < S; ++a) {
    auto& curve = out[table.solvers[a]];
    for (double beta : beta_grid) {
      std::size_t hits = 0;
      for (std::size_t p = 0; p < P; ++p) hits += table.at(a, p) <= beta * (table.problems[p].n + 1.0);
      curve.push_back(P ? static_cast<double>(hits) / static_cast<double>(P) : 0.0);
    }
  }
  return out;
}

SolverSpec SolverSpec::fixed(const WeightCoefficients& w, SolverConfig config) {
  SolverSpec s;
  s.name = format_weights(w);
  s.weights = w;
  s.config = config;
  return s;
}

SolverSpec SolverSpec::corrected(SolverConfig config, CoefficientMenu menu) {
  SolverSpec s;
  s.name = "corrected";
  s.menu = std::move(menu);
  s.config = config;
  return s;
}

SolverResult run_solver(const SolverSpec& solver, const Objective& objective, const Vector& x0,
                        std::size_t budget, const std::string& problem) {
  SolverConfig cfg = solver.config;
  cfg.max_evals = budget;
  if (solver.weights) return run(objective, x0, cfg, *solver.weights, problem);
  return run_corrected(objective, x0, cfg, solver.menu, {}, problem);
}

std::pair<double, double> SuiteResult::reference_values(const TestProblem& problem) const {
  const std::string variant = to_string(problem.variant);
  double f0 = std::numeric_limits<double>::quiet_NaN();
  double best = problem.known_f_best().value_or(std::numeric_limits<double>::infinity());
  for (const auto& r : runs) {
    if (r.problem != problem.base.name || r.variant != variant || r.history.empty()) continue;
    if (std::isnan(f0)) f0 = r.history.front();
    best = std::min(best, *std::min_element(r.history.begin(), r.history.end()));
  }
  return {f0, best};
}

ProfileTable SuiteResult::table(double tau) const {
  ProfileTable t;
  t.solvers = solvers;
  t.evals.assign(solvers.size(), {});
  for (const auto& prob : problems) {
    const auto [f0, f_best] = reference_values(prob);
    if (!(f_best < f0)) continue;
    const std::string variant = to_string(prob.variant);
    t.problems.push_back({prob.key(), prob.base.n});
    for (std::size_t a = 0; a < solvers.size(); ++a) {
      double N = kUnsolved;
      for (const auto& r : runs) {
        if (r.solver == solvers[a] && r.problem == prob.base.name && r.variant == variant && !r.failed) {
          N = evals_to_accuracy(r.history, tau, f0, f_best, r.history.size());
        }
      }
      t.evals[a].push_back(N);
    }
  }
  return t;
}

SuiteResult run_suite(const std::vector<TestProblem>& problems, const std::vector<SolverSpec>& solvers,
                      double budget_multiplier, unsigned workers) {
  if (!(budget_multiplier > 0.0)) throw std::invalid_argument("run_suite: budget multiplier must be positive");
  SuiteResult suite;
  suite.problems = problems;
  for (const auto& s : solvers) suite.solvers.push_back(s.name);

  const std::size_t cells = problems.size() * solvers.size();
  suite.runs.resize(cells);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t c = next++; c < cells; c = next++) {
      const auto& prob = problems[c / solvers.size()];
      const auto& solver = solvers[c % solvers.size()];
      RunRecord rec;
      rec.solver = solver.name;
      rec.problem = prob.base.name;
      rec.variant = to_string(prob.variant);
      rec.n = prob.base.n;
      rec.seed = prob.seed;
      const auto budget = static_cast<std::size_t>(std::llround(budget_multiplier * (prob.base.n + 1)));
      try {
        const auto res = run_solver(solver, make_objective(prob), prob.base.x0, budget, prob.key());
        for (const auto& [k, f] : res.history) rec.history.push_back(f);
        rec.kkt_warnings = res.kkt_warnings;
        for (const auto& it : res.iterations) rec.any_kkt_warning |= !(it.kkt_residual <= 1e-8);
      } catch (const std::exception& e) {
        rec.failed = true;
        rec.error = e.what();
      }
      suite.runs[c] = std::move(rec);
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(cells)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::stable_sort(suite.runs.begin(), suite.runs.end(), [](const RunRecord& a, const RunRecord& b) {
    return std::tie(a.solver, a.problem, a.variant) < std::tie(b.solver, b.problem, b.variant);
  });
  return suite;
}

namespace {

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  if (quoted) throw std::invalid_argument("csv: unterminated quote");
  return fields;
}

}  // namespace

void write_histories_csv(std::ostream& out, const SuiteResult& suite) {
  out.precision(17);
  out << "solver,problem,variant,n,seed,eval_index,f\n";
  for (const auto& r : suite.runs) {
    for (std::size_t i = 0; i < r.history.size(); ++i) {
      out << csv_field(r.solver) << ',' << r.problem << ',' << r.variant << ',' << r.n << ',' << r.seed << ',' << i + 1
          << ',' << r.history[i] << '\n';
    }
  }
}

void write_profiles_csv(std::ostream& out, const SuiteResult& suite, const std::vector<double>& taus,
                        const std::vector<double>& alpha_grid, const std::vector<double>& beta_grid) {
  out.precision(17);
  out << "kind,solver,tau,x,value\n";
  for (double tau : taus) {
    const auto table = suite.table(tau);
    const auto perf = performance_profile(table, alpha_grid);
    const auto data = data_profile(table, beta_grid);
    for (const auto& name : suite.solvers) {
      for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
        out << "perf," << csv_field(name) << ',' << tau << ',' << alpha_grid[i] << ',' << perf.at(name)[i] << '\n';
      }
    }
    for (const auto& name : suite.solvers) {
      for (std::size_t i = 0; i < beta_grid.size(); ++i) {
        out << "data," << csv_field(name) << ',' << tau << ',' << beta_grid[i] << ',' << data.at(name)[i] << '\n';
      }
    }
  }
}

SuiteResult read_histories_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) !=
                                     std::vector<std::string>{"solver", "problem", "variant", "n", "seed", "eval_index", "f"}) {
    throw std::invalid_argument("histories csv: unexpected header");
  }
  SuiteResult suite;
  std::map<std::tuple<std::string, std::string, std::string>, std::size_t> index;
  std::set<std::pair<std::string, std::string>> seen_problems;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 7) throw std::invalid_argument("histories csv: line " + std::to_string(lineno) + " needs 7 fields");
    const auto key = std::make_tuple(f[0], f[1], f[2]);
    auto it = index.find(key);
    if (it == index.end()) {
      RunRecord rec;
      rec.solver = f[0];
      rec.problem = f[1];
      rec.variant = f[2];
      rec.n = std::stoi(f[3]);
      rec.seed = std::stoull(f[4]);
      it = index.emplace(key, suite.runs.size()).first;
      suite.runs.push_back(std::move(rec));
      if (std::find(suite.solvers.begin(), suite.solvers.end(), f[0]) == suite.solvers.end()) {
        suite.solvers.push_back(f[0]);
      }
      if (seen_problems.insert({f[1], f[2]}).second) {
        suite.problems.push_back({find_problem(f[1]), parse_variant(f[2]), 0.0, std::stoull(f[4])});
      }
    }
    auto& rec = suite.runs[it->second];
    if (std::stoull(f[5]) != rec.history.size() + 1) {
      throw std::invalid_argument("histories csv: line " + std::to_string(lineno) + " breaks eval_index order");
    }
    rec.history.push_back(std::stod(f[6]));
  }
  std::stable_sort(suite.runs.begin(), suite.runs.end(), [](const RunRecord& a, const RunRecord& b) {
    return std::tie(a.solver, a.problem, a.variant) < std::tie(b.solver, b.problem, b.variant);
  });
  return suite;
}

std::vector<TestProblem> make_problems(const std::vector<std::string>& names, const std::vector<Variant>& variants,
                                       double sigma, std::uint64_t seed) {
  std::vector<TestProblem> out;
  std::vector<ProblemDescriptor> base;
  if (names.empty()) {
    base = problem_registry();
  } else {
    for (const auto& n : names) base.push_back(find_problem(n));
  }
  for (const auto& b : base) {
    for (Variant v : variants) out.push_back({b, v, sigma, seed});
  }
  return out;
}

}  // namespace remu
