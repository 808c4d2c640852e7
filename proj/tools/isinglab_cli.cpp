// Command-line front end: analytic constants, instance generation, the exact
// oracle, Glauber sampling, annealing estimates, the hypothesis test, the
// planted-vs-null experiment harness, and plot-data emission.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "isinglab/analytic.hpp"
#include "isinglab/annealing.hpp"
#include "isinglab/glauber.hpp"
#include "isinglab/instances.hpp"
#include "isinglab/io.hpp"
#include "isinglab/ising_exact.hpp"
#include "isinglab/reduction.hpp"

namespace {

using nlohmann::json;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
  } else {
    std::ofstream f(out_path);
    if (!f) throw std::runtime_error("cannot open output file: " + out_path);
    f << text;
    if (!text.empty() && text.back() != '\n') f << "\n";
  }
}

void emit_json(const json& j, const std::string& out_path) {
  emit(j.dump(2), out_path);
}

json schedule_to_json(const isinglab::Schedule& s) {
  return json{{"etas", s.etas},
              {"samples_per_step", s.samples_per_step},
              {"sweeps_between_samples", s.sweeps_between_samples},
              {"burn_in_sweeps", s.burn_in_sweeps}};
}

isinglab::Approximator parse_approximator(const std::string& s) {
  if (s == "exact-oracle" || s == "exact") return isinglab::Approximator::exact_oracle;
  if (s == "annealing" || s == "anneal") return isinglab::Approximator::annealing;
  throw std::invalid_argument("unknown approximator: " + s);
}

struct CommonOpts {
  std::string in_path;
  std::string out_path;
  std::string format = "json";
  std::uint64_t seed = 0;
};

int run_analytic(double eta, double beta, double gamma, const CommonOpts& c) {
  const isinglab::ModelParams params{eta, beta, gamma};
  const isinglab::AnalyticReport r = isinglab::constants(params);
  json j;
  j["inputs"] = {{"eta", eta}, {"beta", beta}, {"gamma", gamma}};
  j["epsilon"] = r.epsilon;
  j["epsilon_vacuous"] = r.epsilon_vacuous;
  j["c_p"] = r.c_p;
  j["c_p_corrected"] = r.c_p_corrected;
  j["c_q"] = r.c_q;
  j["delta"] = r.delta;
  j["threshold"] = r.threshold;
  j["x_star"] = r.x_star;
  j["sup_f"] = r.sup_f;
  emit_json(j, c.out_path);
  if (r.epsilon_vacuous)
    std::cerr << "warning: epsilon >= 1, the planted lower bound is vacuous\n";
  return 0;
}

int run_gen_instance(int n, double beta, double gamma, const std::string& arm,
                     const CommonOpts& c) {
  isinglab::SpikedInstance inst =
      (arm == "planted") ? isinglab::sample_planted(n, beta, gamma, c.seed)
                         : isinglab::sample_null(n, gamma, c.seed);
  json j = isinglab::instance_to_json(inst);
  j["inputs"] = {{"n", n},
                 {"beta", arm == "planted" ? beta : 0.0},
                 {"gamma", gamma},
                 {"arm", arm},
                 {"seed", c.seed}};
  emit_json(j, c.out_path);
  return 0;
}

int run_exact(const CommonOpts& c) {
  const auto J = isinglab::CouplingMatrix::from_matrix(
      isinglab::read_matrix_file(c.in_path));
  const isinglab::ExactSummary s = isinglab::exact_summary(J);
  json j;
  j["inputs"] = {{"in", c.in_path}, {"n", s.n}};
  j["n"] = s.n;
  j["log_Z"] = s.log_Z;
  j["log_Zhat"] = s.log_Zhat;
  j["pressure"] = s.pressure;
  emit_json(j, c.out_path);
  return 0;
}

int run_glauber(long sweeps, const std::string& report, long samples,
                const std::string& mixing_method, const CommonOpts& c) {
  const auto J = isinglab::CouplingMatrix::from_matrix(
      isinglab::read_matrix_file(c.in_path));
  json j;
  j["inputs"] = {{"in", c.in_path},       {"sweeps", sweeps},
                 {"seed", c.seed},        {"report", report},
                 {"samples", samples},    {"mixing_method", mixing_method}};
  if (report == "sample") {
    const Eigen::VectorXd x = isinglab::sample(J, sweeps, c.seed);
    std::vector<int> spins(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) spins[i] = int(x(i));
    j["sample"] = spins;
  } else {
    isinglab::MixingReport r =
        (mixing_method == "exact-kernel")
            ? isinglab::mixing_report_exact_kernel(J, sweeps)
            : isinglab::mixing_report_empirical(J, samples, c.seed);
    j["n"] = r.n;
    j["eta_width"] = r.eta_width;
    j["sweeps"] = r.sweeps;
    j["tv_estimate"] = r.tv_estimate;
    j["method"] = r.method;
  }
  emit_json(j, c.out_path);
  return 0;
}

int run_anneal(double target_error, const CommonOpts& c) {
  const auto J = isinglab::CouplingMatrix::from_matrix(
      isinglab::read_matrix_file(c.in_path));
  const isinglab::Schedule sched = isinglab::default_schedule(J, target_error);
  const isinglab::FreeEnergyEstimate est =
      isinglab::estimate_log_Zhat(J, sched, c.seed);
  json j;
  j["inputs"] = {{"in", c.in_path},
                 {"target_error", target_error},
                 {"seed", c.seed}};
  j["log_Zhat"] = est.log_Zhat;
  j["log_Z"] = est.log_Zhat + double(J.n()) * std::numbers::ln2;
  j["per_step_log_ratios"] = est.per_step_log_ratios;
  j["per_step_stderr"] = est.per_step_stderr;
  j["flagged_steps"] = est.flagged_steps;
  j["stderr"] = est.stderr_est;
  j["schedule"] = schedule_to_json(est.schedule);
  emit_json(j, c.out_path);
  return 0;
}

int run_hypothesis_test(double eta, std::optional<double> beta,
                        std::optional<double> gamma,
                        const std::string& approximator, double target_error,
                        const CommonOpts& c) {
  const isinglab::SpikedInstance inst = isinglab::read_instance_file(c.in_path);
  const double b = beta.value_or(inst.beta);
  const double g = gamma.value_or(inst.gamma);
  const isinglab::ModelParams params{eta, b, g};
  const isinglab::AnalyticReport report = isinglab::constants(params);
  const isinglab::Approximator approx = parse_approximator(approximator);
  const isinglab::TestOutcome t = isinglab::run_test(
      inst.ys, eta, report, approx, c.seed, target_error);
  json j;
  j["inputs"] = {{"in", c.in_path},   {"eta", eta},
                 {"beta", b},         {"gamma", g},
                 {"approximator", isinglab::to_string(approx)},
                 {"seed", c.seed},    {"target_error", target_error}};
  j["statistic"] = t.statistic;
  j["verdict"] = std::string(1, t.verdict);
  j["threshold_used"] = t.threshold_used;
  j["approximator"] = isinglab::to_string(t.approximator);
  emit_json(j, c.out_path);
  return 0;
}

int run_experiment_cmd(int n, int trials, double eta, double beta, double gamma,
                       const std::string& approximator, const CommonOpts& c) {
  const isinglab::ModelParams params{eta, beta, gamma};
  const isinglab::Approximator approx = parse_approximator(approximator);
  const isinglab::ExperimentSummary s =
      isinglab::run_experiment(n, trials, params, approx, c.seed);
  if (c.format == "csv") {
    std::ostringstream csv;
    csv << "trial,arm,statistic,verdict,cov_lambda_min\n";
    csv << std::setprecision(17);
    for (const auto& r : s.records)
      csv << r.trial << "," << r.arm << "," << r.statistic << "," << r.verdict
          << "," << r.cov_lambda_min << "\n";
    emit(csv.str(), c.out_path);
    return 0;
  }
  json j;
  j["inputs"] = {{"n", n},         {"trials", trials},
                 {"eta", eta},     {"beta", beta},
                 {"gamma", gamma}, {"approximator", isinglab::to_string(approx)},
                 {"seed", c.seed}};
  j["mean_p_planted"] = s.mean_p_planted;
  j["mean_p_null"] = s.mean_p_null;
  j["std_planted"] = s.std_planted;
  j["std_null"] = s.std_null;
  j["separation_z"] = s.separation_z;
  j["auc"] = s.auc;
  j["threshold"] = s.threshold;
  emit_json(j, c.out_path);
  return 0;
}

int run_figure1(const std::vector<double>& etas, int grid_points,
                const CommonOpts& c) {
  if (grid_points < 100)
    throw std::invalid_argument("figure1: grid-points must be >= 100");
  std::ostringstream csv;
  csv << "x";
  for (double eta : etas) csv << ",f_eta=" << eta;
  csv << "\n";
  csv << std::setprecision(17);
  for (int i = 0; i <= grid_points; ++i) {
    const double x = double(i) / double(grid_points);
    csv << x;
    for (double eta : etas) csv << "," << isinglab::f_eta(eta, x);
    csv << "\n";
  }
  emit(csv.str(), c.out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"isinglab: Ising free-energy laboratory"};
  app.require_subcommand(1);

  CommonOpts c;
  double eta = 1.0, beta = 0.0, gamma = 2.0, target_error = 0.05;
  int n = 10, trials = 50, grid_points = 1000;
  long sweeps = 100, samples = 100000;
  std::string arm = "planted", report = "sample", approximator = "exact-oracle";
  std::string mixing_method = "empirical";
  std::vector<double> etas = {0.5, 0.8, 1.0, 1.2, 1.5};
  std::optional<double> beta_opt, gamma_opt;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", c.seed, "base RNG seed");
    sub->add_option("--in", c.in_path, "input file path");
    sub->add_option("--out", c.out_path, "output file path (default stdout)");
    sub->add_option("--format", c.format, "output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
  };

  auto* sub_analytic = app.add_subcommand("analytic", "analytic constants report");
  sub_analytic->add_option("--eta", eta)->required();
  sub_analytic->add_option("--beta", beta)->required();
  sub_analytic->add_option("--gamma", gamma)->required();
  add_common(sub_analytic);

  auto* sub_gen = app.add_subcommand("gen-instance", "sample a Wishart instance");
  sub_gen->add_option("--n", n)->required();
  sub_gen->add_option("--beta", beta);
  sub_gen->add_option("--gamma", gamma)->required();
  sub_gen->add_option("--arm", arm)->check(CLI::IsMember({"planted", "null"}));
  add_common(sub_gen);

  auto* sub_exact = app.add_subcommand("exact", "exact partition summary");
  add_common(sub_exact);

  auto* sub_glauber = app.add_subcommand("glauber", "Glauber sampling / mixing");
  sub_glauber->add_option("--sweeps", sweeps);
  sub_glauber->add_option("--report", report)
      ->check(CLI::IsMember({"sample", "mixing"}));
  sub_glauber->add_option("--samples", samples);
  sub_glauber->add_option("--mixing-method", mixing_method)
      ->check(CLI::IsMember({"exact-kernel", "empirical"}));
  add_common(sub_glauber);

  auto* sub_anneal = app.add_subcommand("anneal", "annealed free-energy estimate");
  sub_anneal->add_option("--target-error", target_error);
  add_common(sub_anneal);

  auto* sub_test = app.add_subcommand("test", "hypothesis test on an instance");
  sub_test->add_option("--eta", eta)->required();
  sub_test->add_option("--beta", beta_opt);
  sub_test->add_option("--gamma", gamma_opt);
  sub_test->add_option("--approximator", approximator)
      ->check(CLI::IsMember({"exact-oracle", "exact", "annealing", "anneal"}));
  sub_test->add_option("--target-error", target_error);
  add_common(sub_test);

  auto* sub_exp = app.add_subcommand("experiment", "planted-vs-null experiment");
  sub_exp->add_option("--n", n)->required();
  sub_exp->add_option("--trials", trials)->required();
  sub_exp->add_option("--eta", eta)->required();
  sub_exp->add_option("--beta", beta)->required();
  sub_exp->add_option("--gamma", gamma)->required();
  sub_exp->add_option("--approximator", approximator)
      ->check(CLI::IsMember({"exact-oracle", "exact", "annealing", "anneal"}));
  add_common(sub_exp);

  auto* sub_fig = app.add_subcommand("figure1", "f_eta curves as CSV");
  sub_fig->add_option("--etas", etas, "eta values for the curves");
  sub_fig->add_option("--grid-points", grid_points);
  add_common(sub_fig);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help() << "\n";
    return 2;
  }

  try {
    if (sub_analytic->parsed()) return run_analytic(eta, beta, gamma, c);
    if (sub_gen->parsed()) return run_gen_instance(n, beta, gamma, arm, c);
    if (sub_exact->parsed()) return run_exact(c);
    if (sub_glauber->parsed())
      return run_glauber(sweeps, report, samples, mixing_method, c);
    if (sub_anneal->parsed()) return run_anneal(target_error, c);
    if (sub_test->parsed())
      return run_hypothesis_test(eta, beta_opt, gamma_opt, approximator,
                                 target_error, c);
    if (sub_exp->parsed())
      return run_experiment_cmd(n, trials, eta, beta, gamma, approximator, c);
    if (sub_fig->parsed()) return run_figure1(etas, grid_points, c);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
