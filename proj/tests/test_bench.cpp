#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "eeg/bench.hpp"
#include "eeg/plot.hpp"
#include "test_util.hpp"

using namespace eeg;

namespace {

std::string temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("eeg_test_" + name);
  std::filesystem::remove_all(dir);
  return dir.string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// drops the time_s column (4th) of every line
std::string strip_time(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    std::size_t a = 0;
    for (int i = 0; i < 3; ++i) a = line.find(',', a) + 1;
    const std::size_t b = line.find(',', a);
    out += line.substr(0, a) + line.substr(b + 1) + '\n';
  }
  return out;
}

class NanOracle final : public SmoothOracle {
 public:
  Index dim() const override { return 1; }
  double value(const Vector&) const override { return std::nan(""); }
  Vector gradient(const Vector&) const override { return Vector::Zero(1); }
  double lipschitz() const override { return 1.0; }
};

}  // namespace

TEST(Gaussian, DocumentedAlgorithm) {
  // first draws for seed 1, from an independent mt19937_64 + Box-Muller script
  GaussianStream g(1);
  const double expected[] = {1.312851528985562, 1.5159465040060625, 1.2506039211781217,
                             0.1661713810523922};
  for (double e : expected) EXPECT_NEAR(g.next(), e, 1e-15 * std::abs(e));
}

TEST(Gaussian, Moments) {
  GaussianStream g(99);
  double sum = 0, sq = 0;
  const int N = 200000;
  for (int i = 0; i < N; ++i) {
    const double v = g.next();
    sum += v;
    sq += v * v;
  }
  EXPECT_NEAR(sum / N, 0.0, 0.01);
  EXPECT_NEAR(sq / N, 1.0, 0.01);
}

TEST(Generate, DeterministicAndScaled) {
  const ProblemData a = generate_problem_data(20, 10, 0.5, 7);
  const ProblemData b = generate_problem_data(20, 10, 0.5, 7);
  EXPECT_EQ(a.A, b.A);
  EXPECT_EQ(a.b, b.b);
  EXPECT_DOUBLE_EQ(a.lambda, 1.0 / 20.0);
  const ProblemData x = generate_problem_data(20, 10, 0.0, 7);
  EXPECT_EQ(x.b, a.b);
  for (Index i = 0; i < 10; ++i) {
    const double scale = std::pow(i + 1.0, -0.5);
    for (Index j = 0; j < 20; ++j) EXPECT_DOUBLE_EQ(a.A(i, j), scale * x.A(i, j));
  }
  EXPECT_NE(generate_problem_data(20, 10, 0.5, 8).A, a.A);
  EXPECT_DOUBLE_EQ(generate_problem_data(20, 10, 0.5, 7, 0.3).lambda, 0.3);
  EXPECT_THROW(generate_problem_data(0, 10, 0.5, 7), std::invalid_argument);
  EXPECT_THROW(generate_problem_data(5, 10, -0.5, 7), std::invalid_argument);
  EXPECT_THROW(generate_problem_data(5, 10, 0.5, 7, 0.0), std::invalid_argument);
}

TEST(Generate, ConditionNumberMatchesEigenOracle) {
  const ProblemData d = generate_problem_data(40, 20, 0.9, 3);
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(d.A * d.A.transpose());
  const auto ev = eig.eigenvalues();
  EXPECT_NEAR(condition_number(d.A) / std::sqrt(ev.maxCoeff() / ev.minCoeff()), 1.0, 1e-8);
}

TEST(Rules, ParsingAndCombinations) {
  EXPECT_EQ(parse_step_rule("exact"), StepRuleKind::kExactLineSearch);
  EXPECT_EQ(parse_step_rule("const_2_over_L"), StepRuleKind::kConstTwoInvL);
  EXPECT_THROW(parse_step_rule("huge"), ConfigError);
  EXPECT_EQ(parse_method("fista"), Method::kFista);
  EXPECT_THROW(parse_method("newton"), ConfigError);
  EXPECT_THROW(check_combination(Method::kFista, StepRuleKind::kConstTwoInvL), ConfigError);
  EXPECT_THROW(check_combination(Method::kFista, StepRuleKind::kExactLineSearch), ConfigError);
  EXPECT_NO_THROW(check_combination(Method::kFista, StepRuleKind::kBacktracking));
  EXPECT_NO_THROW(check_combination(Method::kEeg, StepRuleKind::kExactLineSearch));
}

TEST(Rules, Planning) {
  BenchConfig cfg;
  EXPECT_EQ(plan_runs(cfg).size(), 10u);
  cfg.methods = {Method::kFista};
  cfg.rules = {StepRuleKind::kConstTwoInvL, StepRuleKind::kExactLineSearch};
  EXPECT_THROW(plan_runs(cfg), ConfigError);
  cfg = BenchConfig{};
  cfg.backtracking_growth = 1.0;
  EXPECT_THROW(plan_runs(cfg), ConfigError);
  cfg = BenchConfig{};
  cfg.n = 0;
  EXPECT_THROW(plan_runs(cfg), ConfigError);
}

TEST(Backtracking, AcceptsWhenEstimateIsLargeEnough) {
  std::mt19937_64 rng(5);
  auto P = eeg::testing::random_lasso(rng, 8, 15, 0.3, 0.1);
  const Vector x = eeg::testing::random_vector(rng, 15);
  const BacktrackResult r = backtracking_step(P->composite(), x, P->lipschitz());
  EXPECT_EQ(r.trials, 1);
  EXPECT_DOUBLE_EQ(r.alpha, 1.0 / P->lipschitz());

  L1LeastSquares quad(Matrix::Ones(1, 1), Vector::Zero(1), 0.1);
  EXPECT_EQ(backtracking_step(quad.composite(), Vector::Constant(1, 2.0), 1.0).trials, 1);
}

TEST(Backtracking, EstimateStaysBelowGrowthTimesL) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    auto P = eeg::testing::random_lasso(rng, 10, 20, 0.5, 0.05);
    const Vector x = eeg::testing::random_vector(rng, 20);
    const BacktrackResult r = backtracking_step(P->composite(), x, 1.0);
    EXPECT_LE(r.L_est, 1.2 * P->lipschitz());
    EXPECT_DOUBLE_EQ(r.alpha, 1.0 / r.L_est);
  }
}

TEST(Backtracking, Errors) {
  L1LeastSquares quad(Matrix::Ones(1, 1), Vector::Zero(1), 0.1);
  EXPECT_THROW(backtracking_step(quad.composite(), Vector::Ones(1), 0.0), std::invalid_argument);
  EXPECT_THROW(backtracking_step(quad.composite(), Vector::Ones(1), 1.0, 1.0),
               std::invalid_argument);
  NanOracle f;
  L1Norm g(0.1);
  EXPECT_THROW(backtracking_step(CompositeProblem{f, g}, Vector::Ones(1), 1.0), std::overflow_error);
}

TEST(Controllers, ScoutStepAndRejection) {
  auto P = generate_problem(20, 10, 0.3, 1);
  for (StepRuleKind k : {StepRuleKind::kConstInvL, StepRuleKind::kConstTwoInvL,
                         StepRuleKind::kBacktracking, StepRuleKind::kExactLineSearch}) {
    auto c = make_step_controller(Method::kEeg, StepRule{k}, *P);
    EXPECT_DOUBLE_EQ(c->scout_step(0), 1.0 / P->lipschitz());
    EXPECT_EQ(c->label(), to_string(k));
  }
  EXPECT_THROW(make_step_controller(Method::kFista, StepRule{StepRuleKind::kExactLineSearch}, *P),
               ConfigError);
}

TEST(Controllers, ExactRuleNeverIncreasesObjective) {
  auto P = generate_problem(60, 30, 0.9, 2);
  for (Method m : {Method::kEeg, Method::kForwardBackward}) {
    auto c = make_step_controller(m, StepRule{StepRuleKind::kExactLineSearch}, *P);
    const RunRecord r = run(m, P->composite(), *c, Vector::Zero(60), StopCriteria{300, 0.0});
    for (std::size_t k = 1; k < r.rows.size(); ++k) {
      EXPECT_LE(r.rows[k].objective, r.rows[k - 1].objective * (1.0 + 1e-15));
      EXPECT_GT(r.rows[k].alpha, 0.0);
    }
  }
}

TEST(Reference, SmallInstances) {
  L1LeastSquares one(Matrix::Ones(1, 1), Vector::Ones(1), 0.1);
  const ReferenceSolution r = reference_solve(one);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.f_star, 0.095, 1e-14);
  EXPECT_NEAR(r.x[0], 0.9, 1e-12);

  std::mt19937_64 rng(2);
  L1LeastSquares zero_b(eeg::testing::random_matrix(rng, 5, 8), Vector::Zero(5), 0.1);
  const ReferenceSolution z = reference_solve(zero_b);
  EXPECT_TRUE(z.converged);
  EXPECT_EQ(z.f_star, 0.0);
  EXPECT_EQ(z.x, Vector::Zero(8));

  auto P = generate_problem(30, 15, 0.3, 4);
  const ReferenceSolution capped = reference_solve(*P, 0.0, 3);
  EXPECT_FALSE(capped.converged);
  EXPECT_EQ(capped.iterations, 3u);
}

TEST(Benchmark, SmallRunWritesConsistentOutputs) {
  BenchConfig cfg;
  cfg.n = 30;
  cfg.p = 15;
  cfg.deltas = {0.1, 0.9};
  cfg.seeds = {1, 2};
  cfg.max_iters = 300;
  cfg.reference_max_iters = 20000;
  cfg.out_dir = temp_dir("bench_a");
  const BenchResult res = run_benchmark(cfg);
  EXPECT_EQ(res.runs.size(), 2u * 2u * 10u);
  ASSERT_EQ(res.files.size(), 3u);
  for (const BenchRun& br : res.runs) {
    EXPECT_GT(br.condition, 1.0);
    for (const RunRow& row : br.record.rows) {
      EXPECT_GE(row.subopt, -1e-12);
      EXPECT_GE(row.objective, br.f_star);
    }
  }
  const std::string csv = read_file(res.files[0]);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "algo,step_rule,k,time_s,objective,subopt,s_k,alpha_k,descent_margin,coupling_slack,"
            "residual,b_k,matvecs,delta,seed");
  EXPECT_NE(read_file(res.files[1]).find("<svg"), std::string::npos);

  cfg.out_dir = temp_dir("bench_b");
  cfg.jobs = 3;
  const BenchResult again = run_benchmark(cfg);
  EXPECT_EQ(strip_time(read_file(again.files[0])), strip_time(csv));
}

TEST(Benchmark, ForwardBackwardWellConditionedIsMonotone) {
  auto P = generate_problem(600, 300, 0.1, 1);
  auto c = make_step_controller(Method::kForwardBackward, StepRule{StepRuleKind::kConstInvL}, *P);
  const RunRecord r =
      run(Method::kForwardBackward, P->composite(), *c, Vector::Zero(600), StopCriteria{5000, 1e-8});
  for (std::size_t k = 1; k < r.rows.size(); ++k) {
    EXPECT_LE(r.rows[k].objective, r.rows[k - 1].objective + 1e-12);
  }
  EXPECT_LT(r.rows.back().residual, 1e-4 * r.rows.front().residual);
}

TEST(Benchmark, ExactLineSearchOverheadPerIteration) {
  auto P = generate_problem(600, 300, 0.3, 1);
  const Vector x0 = Vector::Zero(600);
  auto per_iter = [&](StepRuleKind kind) {
    double best = INFINITY;
    for (int rep = 0; rep < 3; ++rep) {
      auto c = make_step_controller(Method::kEeg, StepRule{kind}, *P);
      const RunRecord r = run(Method::kEeg, P->composite(), *c, x0, StopCriteria{150, 0.0});
      best = std::min(best, r.rows.back().time_s / static_cast<double>(r.rows.size() - 1));
    }
    return best;
  };
  const double exact = per_iter(StepRuleKind::kExactLineSearch);
  const double fixed = per_iter(StepRuleKind::kConstInvL);
  EXPECT_LE(exact, 4.0 * fixed) << "exact " << exact << " s/iter, constant " << fixed;
}

TEST(Plot, SvgSkipsNonFinitePoints) {
  PlotSeries s{"a<b", {0.0, 1.0, 2.0}, {1.0, std::nan(""), 1e-3}};
  const std::string svg = render_svg({s}, PlotOptions{});
  EXPECT_NE(svg.find("a&lt;b"), std::string::npos);
  EXPECT_EQ(svg.find("nan"), std::string::npos);
}
