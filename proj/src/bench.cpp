#include "eeg/bench.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <Eigen/SVD>

#include "eeg/linesearch.hpp"
#include "eeg/plot.hpp"

namespace eeg {

ProblemData generate_problem_data(Index n, Index p, double delta, std::uint64_t seed,
                                  std::optional<double> lambda) {
  if (n <= 0 || p <= 0) throw std::invalid_argument("generate_problem: n and p must be positive");
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("generate_problem: delta must be a finite nonnegative number");
  }
  const double lam = lambda.value_or(1.0 / static_cast<double>(n));
  if (!(lam > 0.0) || !std::isfinite(lam)) {
    throw std::invalid_argument("generate_problem: lambda must be positive");
  }
  GaussianStream gauss(seed);
  ProblemData data;
  data.A.resize(p, n);
  for (Index i = 0; i < p; ++i) {
    const double scale = std::pow(static_cast<double>(i + 1), -delta);
    for (Index j = 0; j < n; ++j) data.A(i, j) = scale * gauss.next();
  }
  data.b.resize(p);
  for (Index i = 0; i < p; ++i) data.b[i] = gauss.next();
  data.lambda = lam;
  return data;
}

std::unique_ptr<L1LeastSquares> generate_problem(Index n, Index p, double delta,
                                                 std::uint64_t seed,
                                                 std::optional<double> lambda) {
  return make_problem(generate_problem_data(n, p, delta, seed, lambda));
}

double condition_number(const Matrix& A) {
  if (A.size() == 0) throw std::invalid_argument("condition_number: empty matrix");
  const Eigen::BDCSVD<Matrix> svd(A);
  const Vector& sv = svd.singularValues();
  const double smin = sv[sv.size() - 1];
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return sv[0] / smin;
}

const char* to_string(StepRuleKind kind) {
  switch (kind) {
    case StepRuleKind::kConstInvL: return "const_1_over_L";
    case StepRuleKind::kConstTwoInvL: return "const_2_over_L";
    case StepRuleKind::kBacktracking: return "backtracking";
    case StepRuleKind::kExactLineSearch: return "exact_line_search";
  }
  return "?";
}

StepRuleKind parse_step_rule(const std::string& text) {
  static const std::map<std::string, StepRuleKind> table = {
      {"const_1_over_L", StepRuleKind::kConstInvL},
      {"1/L", StepRuleKind::kConstInvL},
      {"const_2_over_L", StepRuleKind::kConstTwoInvL},
      {"2/L", StepRuleKind::kConstTwoInvL},
      {"backtracking", StepRuleKind::kBacktracking},
      {"bt", StepRuleKind::kBacktracking},
      {"exact_line_search", StepRuleKind::kExactLineSearch},
      {"exact", StepRuleKind::kExactLineSearch},
  };
  const auto it = table.find(text);
  if (it == table.end()) throw ConfigError("unknown step rule '" + text + "'");
  return it->second;
}

Method parse_method(const std::string& text) {
  std::string up = text;
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
  if (up == "EEG") return Method::kEeg;
  if (up == "FB") return Method::kForwardBackward;
  if (up == "FISTA") return Method::kFista;
  throw ConfigError("unknown method '" + text + "'");
}

void check_combination(Method method, StepRuleKind kind) {
  if (method == Method::kFista &&
      (kind == StepRuleKind::kConstTwoInvL || kind == StepRuleKind::kExactLineSearch)) {
    throw ConfigError(std::string("FISTA with ") + to_string(kind) +
                      " produces diverging sequences and is not supported");
  }
}

BacktrackResult backtracking_step(const CompositeProblem& problem, const Vector& base,
                                  const Vector& grad_point, const Vector& grad, double L_est,
                                  double growth) {
  if (!(L_est > 0.0) || !std::isfinite(L_est)) {
    throw std::invalid_argument("backtracking_step: L_est must be positive and finite");
  }
  if (!(growth > 1.0)) throw std::invalid_argument("backtracking_step: growth must exceed 1");
  const double f_v = problem.f.value(grad_point);
  // a few ulps of f(v), so that rounding alone never forces L_est up
  const double slack = 8.0 * std::numeric_limits<double>::epsilon() * std::abs(f_v);
  BacktrackResult result;
  for (;;) {
    ++result.trials;
    Vector x_next = problem.g.prox(base - grad / L_est, 1.0 / L_est);
    const Vector diff = x_next - grad_point;
    const double model = f_v + grad.dot(diff) + 0.5 * L_est * diff.squaredNorm();
    if (problem.f.value(x_next) <= model + slack) {
      result.alpha = 1.0 / L_est;
      result.L_est = L_est;
      result.x_next = std::move(x_next);
      return result;
    }
    L_est *= growth;
    if (!std::isfinite(L_est) || L_est > 1e300) {
      throw std::overflow_error("backtracking_step: L_est overflowed");
    }
  }
}

BacktrackResult backtracking_step(const CompositeProblem& problem, const Vector& x, double L_est,
                                  double growth) {
  const Vector grad = problem.f.gradient(x);
  return backtracking_step(problem, x, x, grad, L_est, growth);
}

namespace {

class ConstantController final : public StepController {
 public:
  ConstantController(double multiple, double L) : multiple_(multiple), L_(L) {}
  std::string label() const override {
    return multiple_ == 1.0 ? to_string(StepRuleKind::kConstInvL)
                            : to_string(StepRuleKind::kConstTwoInvL);
  }
  double scout_step(std::size_t) const override { return 1.0 / L_; }
  StepResult step(const StepRequest& req) override {
    StepResult st;
    st.alpha = multiple_ / L_;
    st.x_next = req.problem.g.prox(req.base - st.alpha * req.grad, st.alpha);
    return st;
  }

 private:
  double multiple_;
  double L_;
};

class BacktrackingController final : public StepController {
 public:
  BacktrackingController(double l_init, double growth, double L)
      : L_est_(l_init), growth_(growth), L_(L) {}
  std::string label() const override { return to_string(StepRuleKind::kBacktracking); }
  double scout_step(std::size_t) const override { return 1.0 / L_; }
  StepResult step(const StepRequest& req) override {
    BacktrackResult bt =
        backtracking_step(req.problem, req.base, req.grad_point, req.grad, L_est_, growth_);
    L_est_ = bt.L_est;
    StepResult st;
    st.alpha = bt.alpha;
    st.x_next = std::move(bt.x_next);
    return st;
  }

 private:
  double L_est_;
  double growth_;
  double L_;
};

class ExactController final : public StepController {
 public:
  explicit ExactController(const L1LeastSquares& problem) : problem_(problem) {}
  std::string label() const override { return to_string(StepRuleKind::kExactLineSearch); }
  double scout_step(std::size_t) const override { return 1.0 / problem_.lipschitz(); }
  StepResult step(const StepRequest& req) override {
    const double np = static_cast<double>(problem_.n()) * static_cast<double>(problem_.p());
    StepResult st;
    LineSearchResult ls = exact_line_search(problem_, req.base, req.grad);
    st.work = static_cast<double>(ls.stats.flops) / np;
    if (ls.alpha == 0.0 && &req.grad != &req.base_grad) {
      // grad f(y) gives no decrease from x; search along grad f(x) instead
      ls = exact_line_search(problem_, req.base, req.base_grad);
      st.work += static_cast<double>(ls.stats.flops) / np;
      st.used_base_gradient = true;
    }
    if (ls.alpha > 0.0) {
      st.alpha = ls.alpha;
      st.x_next = std::move(ls.p);
      return st;
    }
    // no decrease along the prox-gradient path: x is stationary up to rounding
    st.alpha = 1.0 / problem_.lipschitz();
    st.x_next = req.problem.g.prox(req.base - st.alpha * req.base_grad, st.alpha);
    st.used_base_gradient = true;
    return st;
  }

 private:
  const L1LeastSquares& problem_;
};

}  // namespace

std::unique_ptr<StepController> make_step_controller(Method method, const StepRule& rule,
                                                     const L1LeastSquares& problem) {
  check_combination(method, rule.kind);
  const double L = problem.lipschitz();
  switch (rule.kind) {
    case StepRuleKind::kConstInvL: return std::make_unique<ConstantController>(1.0, L);
    case StepRuleKind::kConstTwoInvL: return std::make_unique<ConstantController>(2.0, L);
    case StepRuleKind::kBacktracking:
      if (!(rule.l_init > 0.0)) throw ConfigError("backtracking L_init must be positive");
      if (!(rule.growth > 1.0)) throw ConfigError("backtracking growth must exceed 1");
      return std::make_unique<BacktrackingController>(rule.l_init, rule.growth, L);
    case StepRuleKind::kExactLineSearch: return std::make_unique<ExactController>(problem);
  }
  throw ConfigError("unknown step rule");
}

ReferenceSolution reference_solve(const L1LeastSquares& problem, double tolerance,
                                  std::size_t max_iters) {
  const CompositeProblem P = problem.composite();
  ExactController controller(problem);
  const double s = 1.0 / problem.lipschitz();

  ReferenceSolution ref;
  Vector x = Vector::Zero(problem.n());
  Vector grad_x = problem.gradient(x);
  double F_x = problem.objective(x);
  ref.x = x;
  ref.f_star = F_x;
  ref.residual = problem.lipschitz() * (x - prox_grad_map(problem, x, s)).norm();
  if (ref.residual <= tolerance) {
    ref.converged = true;
    return ref;
  }
  for (std::size_t k = 0; k < max_iters; ++k) {
    const Vector y = P.g.prox(x - s * grad_x, s);
    const Vector grad_y = problem.gradient(y);
    StepResult st = controller.step(StepRequest{P, k, x, y, grad_y, grad_x});
    Vector grad_next = problem.gradient(st.x_next);
    const double F_next = problem.objective(st.x_next);
    const double residual = subgrad_residual(x, st.x_next, st.alpha, grad_next,
                                             st.used_base_gradient ? grad_x : grad_y);
    x = std::move(st.x_next);
    grad_x = std::move(grad_next);
    F_x = F_next;
    ref.iterations = k + 1;
    if (F_x <= ref.f_star) {
      ref.f_star = F_x;
      ref.x = x;
      ref.residual = residual;
    }
    if (residual <= tolerance) {
      ref.converged = true;
      break;
    }
  }
  return ref;
}

std::vector<std::pair<Method, StepRuleKind>> plan_runs(const BenchConfig& config) {
  if (config.n <= 0 || config.p <= 0) throw ConfigError("n and p must be positive");
  if (config.deltas.empty()) throw ConfigError("no delta selected");
  for (double d : config.deltas) {
    if (!(d >= 0.0) || !std::isfinite(d)) throw ConfigError("delta must be nonnegative");
  }
  if (config.seeds.empty()) throw ConfigError("no seed selected");
  if (config.lambda && !(*config.lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (!(config.tolerance >= 0.0)) throw ConfigError("tolerance must be nonnegative");
  if (!(config.backtracking_l_init > 0.0)) throw ConfigError("backtracking L_init must be positive");
  if (!(config.backtracking_growth > 1.0)) throw ConfigError("backtracking growth must exceed 1");
  if (config.jobs == 0) throw ConfigError("jobs must be at least 1");

  std::vector<std::pair<Method, StepRuleKind>> plan;
  for (Method m : config.methods) {
    for (StepRuleKind r : config.rules) {
      try {
        check_combination(m, r);
      } catch (const ConfigError&) {
        continue;
      }
      if (std::find(plan.begin(), plan.end(), std::make_pair(m, r)) == plan.end()) {
        plan.emplace_back(m, r);
      }
    }
  }
  if (plan.empty()) {
    throw ConfigError("no supported (method, step rule) combination selected; FISTA does not "
                      "support const_2_over_L or exact_line_search");
  }
  return plan;
}

namespace {

struct Instance {
  double delta;
  std::uint64_t seed;
};

std::vector<BenchRun> run_instance(const BenchConfig& config, const Instance& inst,
                                   const std::vector<std::pair<Method, StepRuleKind>>& plan,
                                   std::string& log_text) {
  const auto problem = generate_problem(config.n, config.p, inst.delta, inst.seed, config.lambda);
  const double kappa = condition_number(problem->A());
  const ReferenceSolution ref =
      reference_solve(*problem, config.reference_tolerance, config.reference_max_iters);

  std::ostringstream log;
  log << "delta=" << inst.delta << " seed=" << inst.seed << " cond=" << kappa
      << " L=" << problem->lipschitz() << " F*=" << format_double(ref.f_star)
      << " (reference " << (ref.converged ? "converged" : "hit the iteration cap") << " after "
      << ref.iterations << " iterations)\n";

  std::vector<BenchRun> runs;
  const Vector x0 = Vector::Zero(problem->n());
  StopCriteria stop;
  stop.max_iters = config.max_iters;
  stop.tolerance = config.tolerance;
  for (const auto& [method, kind] : plan) {
    StepRule rule;
    rule.kind = kind;
    rule.l_init = config.backtracking_l_init;
    rule.growth = config.backtracking_growth;
    auto controller = make_step_controller(method, rule, *problem);
    BenchRun br;
    br.delta = inst.delta;
    br.seed = inst.seed;
    br.condition = kappa;
    br.record = run(method, problem->composite(), *controller, x0, stop);
    const RunRow& last = br.record.rows.back();
    log << "  " << to_string(method) << " " << to_string(kind) << ": "
        << to_string(br.record.status) << " k=" << last.k << " F=" << format_double(last.objective)
        << " time=" << last.time_s << "s\n";
    runs.push_back(std::move(br));
  }

  double f_star = ref.f_star;
  double lower = dual_lower_bound(*problem, ref.x);
  for (const BenchRun& br : runs) {
    for (const RunRow& row : br.record.rows) {
      if (std::isfinite(row.objective)) f_star = std::min(f_star, row.objective);
    }
    if (br.record.x_final.allFinite()) {
      lower = std::max(lower, dual_lower_bound(*problem, br.record.x_final));
    }
  }
  for (BenchRun& br : runs) {
    br.f_star = f_star;
    br.f_star_gap = f_star - lower;
    for (RunRow& row : br.record.rows) row.subopt = row.objective - f_star;
  }
  log << "  F* = " << format_double(f_star) << ", within " << format_double(f_star - lower)
      << " of the optimum (duality gap)\n";
  log_text = log.str();
  return runs;
}

std::string delta_tag(double delta) {
  std::string s = format_double(delta);
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

}  // namespace

BenchResult run_benchmark(const BenchConfig& config, std::ostream* log) {
  const auto plan = plan_runs(config);

  std::vector<Instance> instances;
  for (double d : config.deltas) {
    for (std::uint64_t seed : config.seeds) instances.push_back({d, seed});
  }

  std::vector<std::vector<BenchRun>> per_instance(instances.size());
  std::vector<std::string> logs(instances.size());
  if (config.jobs <= 1) {
    for (std::size_t i = 0; i < instances.size(); ++i) {
      per_instance[i] = run_instance(config, instances[i], plan, logs[i]);
      if (log) *log << logs[i] << std::flush;
    }
  } else {
    std::size_t next = 0;
    while (next < instances.size()) {
      const std::size_t end = std::min(instances.size(), next + config.jobs);
      std::vector<std::future<std::vector<BenchRun>>> futures;
      for (std::size_t i = next; i < end; ++i) {
        futures.push_back(std::async(std::launch::async, [&, i] {
          return run_instance(config, instances[i], plan, logs[i]);
        }));
      }
      for (std::size_t i = next; i < end; ++i) {
        per_instance[i] = futures[i - next].get();
        if (log) *log << logs[i] << std::flush;
      }
      next = end;
    }
  }

  BenchResult result;
  for (auto& runs : per_instance) {
    for (auto& r : runs) result.runs.push_back(std::move(r));
  }
  if (!config.write_files) return result;

  std::filesystem::create_directories(config.out_dir);
  const std::filesystem::path dir(config.out_dir);
  {
    const std::string path = (dir / "bench.csv").string();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    bool header = true;
    for (const BenchRun& br : result.runs) {
      CsvOptions opts;
      opts.header = header;
      opts.matvecs = true;
      opts.constants = {{"delta", format_double(br.delta)}, {"seed", std::to_string(br.seed)}};
      write_csv(out, br.record, opts);
      header = false;
    }
    if (!out) throw std::runtime_error("error writing " + path);
    result.files.push_back(path);
  }
  if (config.plot) {
    const std::uint64_t seed = config.seeds.front();
    for (double d : config.deltas) {
      std::vector<PlotSeries> series;
      for (const BenchRun& br : result.runs) {
        if (br.delta != d || br.seed != seed) continue;
        PlotSeries s;
        s.label = std::string(to_string(br.record.method)) + " " + br.record.step_rule;
        for (const RunRow& row : br.record.rows) {
          s.x.push_back(row.time_s);
          s.y.push_back(row.subopt);
        }
        series.push_back(std::move(s));
      }
      PlotOptions opts;
      opts.title = "delta = " + format_double(d) + ", n = " + std::to_string(config.n) +
                   ", p = " + std::to_string(config.p) + ", seed = " + std::to_string(seed);
      const std::string path = (dir / ("bench_delta_" + delta_tag(d) + ".svg")).string();
      write_svg(path, series, opts);
      result.files.push_back(path);
    }
  }
  return result;
}

}  // namespace eeg
