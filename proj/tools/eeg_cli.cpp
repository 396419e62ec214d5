#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eeg/bench.hpp"
#include "eeg/klbound.hpp"
#include "eeg/linesearch.hpp"
#include "eeg/problem_io.hpp"
#include "eeg/schedule.hpp"
#include "eeg/solvers.hpp"

namespace {

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const std::string& item : items) {
    std::size_t start = 0;
    while (start <= item.size()) {
      const std::size_t comma = item.find(',', start);
      const std::size_t end = comma == std::string::npos ? item.size() : comma;
      if (end > start) out.push_back(item.substr(start, end - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  return out;
}

eeg::Regime parse_regime(const std::string& text) {
  if (text == "C1") return eeg::Regime::kC1;
  if (text == "C2") return eeg::Regime::kC2;
  if (text == "C3") return eeg::Regime::kC3;
  throw eeg::ConfigError("unknown regime '" + text + "' (expected C1, C2 or C3)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extragradient proximal-gradient methods for l1-regularized least squares"};
  app.require_subcommand(1);

  // bench
  auto* bench = app.add_subcommand("bench", "Run the synthetic LASSO benchmark");
  eeg::BenchConfig cfg;
  std::optional<double> lambda;
  std::vector<std::string> methods = {"FB", "FISTA", "EEG"};
  std::vector<std::string> rules = {"const_1_over_L", "const_2_over_L", "backtracking",
                                    "exact_line_search"};
  bool plot = true;
  bool quiet = false;
  bench->add_option("--n", cfg.n, "number of unknowns")->capture_default_str();
  bench->add_option("--p", cfg.p, "number of measurements")->capture_default_str();
  bench->add_option("--delta", cfg.deltas, "conditioning exponents")->delimiter(',');
  bench->add_option("--seed", cfg.seeds, "generator seeds")->delimiter(',');
  bench->add_option("--lambda", lambda, "regularization weight (default 1/n)");
  bench->add_option("--methods", methods, "FB, FISTA, EEG")->delimiter(',');
  bench->add_option("--rules", rules,
                    "const_1_over_L, const_2_over_L, backtracking, exact_line_search")
      ->delimiter(',');
  bench->add_option("--max-iters", cfg.max_iters)->capture_default_str();
  bench->add_option("--tol", cfg.tolerance, "subgradient residual tolerance")
      ->capture_default_str();
  bench->add_option("--ref-max-iters", cfg.reference_max_iters)->capture_default_str();
  bench->add_option("--ref-tol", cfg.reference_tolerance)->capture_default_str();
  bench->add_option("--bt-init", cfg.backtracking_l_init)->capture_default_str();
  bench->add_option("--bt-growth", cfg.backtracking_growth)->capture_default_str();
  bench->add_option("--out-dir", cfg.out_dir)->capture_default_str();
  bench->add_flag("--plot,!--no-plot", plot, "write one SVG per delta");
  bench->add_option("--jobs", cfg.jobs, "instances run in parallel")->capture_default_str();
  bench->add_flag("--quiet", quiet);

  // solve
  auto* solve = app.add_subcommand("solve", "Run one method on a problem file, CSV to stdout");
  std::string problem_path;
  std::string method_name = "EEG";
  std::string rule_name;
  std::string regime_name = "C1";
  std::size_t solve_iters = 1000;
  double solve_tol = 1e-10;
  std::optional<double> solve_s;
  std::optional<double> solve_alpha;
  std::optional<double> f_star;
  solve->add_option("problem", problem_path, "problem file")->required();
  solve->add_option("--method", method_name)->capture_default_str();
  solve->add_option("--rule", rule_name, "benchmark step rule instead of a regime schedule");
  solve->add_option("--regime", regime_name, "C1, C2 or C3 default schedule")
      ->capture_default_str();
  solve->add_option("--s", solve_s, "constant scout step (overrides the regime default)");
  solve->add_option("--alpha", solve_alpha, "constant step (overrides the regime default)");
  solve->add_option("--max-iters", solve_iters)->capture_default_str();
  solve->add_option("--tol", solve_tol)->capture_default_str();
  solve->add_option("--f-star", f_star, "optimal value for the subopt column");

  // generate
  auto* gen = app.add_subcommand("generate", "Write a synthetic problem file");
  eeg::Index gen_n = 600, gen_p = 300;
  double gen_delta = 0.1;
  std::uint64_t gen_seed = 1;
  std::optional<double> gen_lambda;
  std::string gen_out;
  gen->add_option("--n", gen_n)->capture_default_str();
  gen->add_option("--p", gen_p)->capture_default_str();
  gen->add_option("--delta", gen_delta)->capture_default_str();
  gen->add_option("--seed", gen_seed)->capture_default_str();
  gen->add_option("--lambda", gen_lambda);
  gen->add_option("-o,--out", gen_out, "output file")->required();

  // klbound
  auto* kl = app.add_subcommand("klbound", "Small-prox bound table, CSV to stdout");
  double kl_theta = 0.5, kl_c = 1.0, kl_r0 = 1.0, kl_L = 1.0;
  std::size_t kl_k = 100;
  std::optional<double> kl_s, kl_alpha;
  kl->add_option("--theta", kl_theta)->capture_default_str();
  kl->add_option("--c", kl_c)->capture_default_str();
  kl->add_option("--r0", kl_r0, "initial objective gap F(x0) - F*")->capture_default_str();
  kl->add_option("--L", kl_L, "Lipschitz constant of grad f")->capture_default_str();
  kl->add_option("--s", kl_s, "scout step (default: C3 default schedule)");
  kl->add_option("--alpha", kl_alpha, "step (default: C3 default schedule)");
  kl->add_option("--k-max", kl_k)->capture_default_str();

  // segments
  auto* seg = app.add_subcommand("segments", "Dump the exact line-search segments at a point");
  std::string seg_problem;
  std::string seg_point;
  seg->add_option("problem", seg_problem, "problem file")->required();
  seg->add_option("--x", seg_point, "file with the point (whitespace separated), default 0");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bench) {
      cfg.lambda = lambda;
      cfg.plot = plot;
      cfg.methods.clear();
      for (const auto& m : split_list(methods)) cfg.methods.push_back(eeg::parse_method(m));
      cfg.rules.clear();
      for (const auto& r : split_list(rules)) cfg.rules.push_back(eeg::parse_step_rule(r));
      const auto result = eeg::run_benchmark(cfg, quiet ? nullptr : &std::cerr);
      for (const auto& f : result.files) std::cerr << "wrote " << f << '\n';
    } else if (*solve) {
      const auto problem = eeg::make_problem(eeg::read_problem_file(problem_path));
      const eeg::Method method = eeg::parse_method(method_name);
      const eeg::Vector x0 = eeg::Vector::Zero(problem->n());
      eeg::StopCriteria stop{solve_iters, solve_tol};
      eeg::RunOptions opts;
      opts.f_star = f_star;
      eeg::RunRecord record;
      if (!rule_name.empty()) {
        eeg::StepRule rule;
        rule.kind = eeg::parse_step_rule(rule_name);
        auto controller = eeg::make_step_controller(method, rule, *problem);
        record = eeg::run(method, problem->composite(), *controller, x0, stop, opts);
      } else {
        const double L = problem->lipschitz();
        const eeg::Regime regime = parse_regime(regime_name);
        eeg::StepSchedule schedule = regime == eeg::Regime::kC1   ? eeg::default_c1_schedule(L)
                                     : regime == eeg::Regime::kC2 ? eeg::default_c2_schedule(L)
                                                                  : eeg::default_c3_schedule(L);
        if (solve_s || solve_alpha) {
          schedule = eeg::StepSchedule::constant(regime, solve_s.value_or(schedule.s_at(0)),
                                                 solve_alpha.value_or(schedule.alpha_at(0)));
        }
        record = eeg::run(method, problem->composite(), schedule, x0, stop, opts);
      }
      eeg::write_csv(std::cout, record);
      if (record.status == eeg::RunStatus::kError) {
        std::cerr << "error: " << record.message << '\n';
        return 1;
      }
    } else if (*gen) {
      const eeg::ProblemData data =
          eeg::generate_problem_data(gen_n, gen_p, gen_delta, gen_seed, gen_lambda);
      const std::filesystem::path parent = std::filesystem::path(gen_out).parent_path();
      if (!parent.empty()) std::filesystem::create_directories(parent);
      eeg::write_problem_file(gen_out, data.A, data.b, data.lambda);
    } else if (*kl) {
      eeg::StepSchedule schedule = eeg::default_c3_schedule(kl_L);
      if (kl_s || kl_alpha) {
        schedule = eeg::StepSchedule::constant(eeg::Regime::kC3, kl_s.value_or(schedule.s_at(0)),
                                               kl_alpha.value_or(schedule.alpha_at(0)));
      }
      const eeg::BoundConstants cb = eeg::constants(schedule, kl_L);
      const eeg::KLParams params = eeg::KLParams::power(kl_theta, kl_c, kl_r0);
      const double z = eeg::zeta(params.ell, cb.C, cb.B);
      const auto betas = eeg::beta_sequence(params, z, kl_k);
      eeg::write_bound_csv(std::cout, eeg::bounds(params, cb.C, cb.B, z, betas));
    } else if (*seg) {
      const auto problem = eeg::make_problem(eeg::read_problem_file(seg_problem));
      eeg::Vector x = eeg::Vector::Zero(problem->n());
      if (!seg_point.empty()) {
        std::ifstream in(seg_point);
        if (!in) throw std::runtime_error("cannot open " + seg_point);
        for (eeg::Index i = 0; i < x.size(); ++i) {
          if (!(in >> x[i])) throw eeg::ParseError("point file has too few entries");
        }
      }
      eeg::write_segments_csv(std::cout, eeg::sweep(*problem, x));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
