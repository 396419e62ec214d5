#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "eeg/core.hpp"
#include "eeg/problem_io.hpp"
#include "eeg/solvers.hpp"

namespace eeg {

/// Standard normal stream: std::mt19937_64 (whose output sequence the C++
/// standard fixes) feeding the Box-Muller transform. With
/// u1 = (w1 >> 11 + 1) 2^-53 and u2 = (w2 >> 11) 2^-53 from consecutive words,
/// it yields sqrt(-2 ln u1) cos(2 pi u2), then sqrt(-2 ln u1) sin(2 pi u2).
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}
  double next();

 private:
  std::mt19937_64 rng_;
  std::optional<double> spare_;
};

/// A = D X (p x n), D_ii = 1 / i^delta for i = 1..p; X then b are drawn from
/// one GaussianStream, X row by row. lambda defaults to 1/n.
ProblemData generate_problem_data(Index n, Index p, double delta, std::uint64_t seed,
                                  std::optional<double> lambda = std::nullopt);
std::unique_ptr<L1LeastSquares> generate_problem(Index n, Index p, double delta,
                                                 std::uint64_t seed,
                                                 std::optional<double> lambda = std::nullopt);

/// sigma_max / sigma_min over the min(p, n) singular values.
double condition_number(const Matrix& A);

enum class StepRuleKind { kConstInvL, kConstTwoInvL, kBacktracking, kExactLineSearch };

const char* to_string(StepRuleKind kind);
StepRuleKind parse_step_rule(const std::string& text);
Method parse_method(const std::string& text);

struct StepRule {
  StepRuleKind kind = StepRuleKind::kConstInvL;
  double l_init = 1.0;  // backtracking only
  double growth = 1.2;  // backtracking only, > 1
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// FISTA diverges with the 2/L and exact line-search rules; those pairs throw.
void check_combination(Method method, StepRuleKind kind);

struct BacktrackResult {
  double alpha = 0.0;
  double L_est = 0.0;
  Vector x_next;
  int trials = 0;
};

/// Raises L_est by `growth` until
///   f(x_next) <= f(v) + <grad f(v), x_next - v> + (L_est/2)|x_next - v|^2
/// with x_next = prox_{g/L_est}(base - grad f(v)/L_est). v = base gives the
/// usual rule.
BacktrackResult backtracking_step(const CompositeProblem& problem, const Vector& base,
                                  const Vector& grad_point, const Vector& grad, double L_est,
                                  double growth = 1.2);
BacktrackResult backtracking_step(const CompositeProblem& problem, const Vector& x, double L_est,
                                  double growth = 1.2);

/// Step controller for the benchmark rules. The extragradient scout step is
/// always s = 1/L; the rule picks alpha.
std::unique_ptr<StepController> make_step_controller(Method method, const StepRule& rule,
                                                     const L1LeastSquares& problem);

struct ReferenceSolution {
  Vector x;
  double f_star = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Extragradient + exact line search from the origin until the subgradient
/// residual is <= tolerance. Hitting the cap is reported (converged = false),
/// not thrown.
ReferenceSolution reference_solve(const L1LeastSquares& problem, double tolerance = 1e-12,
                                  std::size_t max_iters = 1000000);

struct BenchConfig {
  Index n = 600;
  Index p = 300;
  std::vector<double> deltas = {0.1, 0.3, 0.9};
  std::vector<std::uint64_t> seeds = {1};
  std::optional<double> lambda;  // 1/n when unset
  std::vector<Method> methods = {Method::kForwardBackward, Method::kFista, Method::kEeg};
  std::vector<StepRuleKind> rules = {StepRuleKind::kConstInvL, StepRuleKind::kConstTwoInvL,
                                     StepRuleKind::kBacktracking,
                                     StepRuleKind::kExactLineSearch};
  std::size_t max_iters = 50000;
  double tolerance = 1e-12;
  double backtracking_l_init = 1.0;
  double backtracking_growth = 1.2;
  std::size_t reference_max_iters = 1000000;
  double reference_tolerance = 1e-12;
  std::string out_dir = ".";
  bool write_files = true;
  bool plot = true;
  unsigned jobs = 1;
};

/// Validates sizes and parameters; returns the (method, rule) pairs to run,
/// leaving out the unsupported FISTA pairs. Throws ConfigError when nothing
/// runnable remains or a parameter is out of range.
std::vector<std::pair<Method, StepRuleKind>> plan_runs(const BenchConfig& config);

struct BenchRun {
  double delta = 0.0;
  std::uint64_t seed = 0;
  double f_star = 0.0;
  double f_star_gap = 0.0;  // f_star minus the best dual lower bound; bounds its error
  double condition = 0.0;
  RunRecord record;
};

struct BenchResult {
  std::vector<BenchRun> runs;
  std::vector<std::string> files;  // written outputs
};

/// Runs every planned pair on every (delta, seed) instance from the origin.
/// Writes bench.csv (run columns + matvecs,delta,seed) and, with plot
/// enabled, one suboptimality-vs-time SVG per delta.
BenchResult run_benchmark(const BenchConfig& config, std::ostream* log = nullptr);

}  // namespace eeg
