#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "irf/harness.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string preset;
  std::string network_file;
  std::string out_dir;
  std::uint64_t seed = 0;
  int reps = 0;
  int horizon = 0;
  double alpha = 0.0;
  double rho = 0.0;
  int max_lambda = -1;
  int threads = -1;
  double kappa_bar = -1.0;
  double epsilon = -1.0;
};

void add_common(CLI::App* cmd, CommonFlags* flags) {
  cmd->add_option("--config", flags->config_path, "experiment config file");
  cmd->add_option("--preset", flags->preset, "built-in network preset");
  cmd->add_option("--network", flags->network_file, "network description file");
  cmd->add_option("--seed", flags->seed, "base seed; replication r uses seed + r");
  cmd->add_option("--reps", flags->reps, "number of replications");
  cmd->add_option("--horizon", flags->horizon, "steps per replication");
  cmd->add_option("--alpha", flags->alpha, "false-alarm budget");
  cmd->add_option("--rho", flags->rho, "classic prior parameter");
  cmd->add_option("--max-lambda", flags->max_lambda,
                  "condition on all change points <= this (rejection sampling)");
  cmd->add_option("--threads", flags->threads, "worker threads (0 = hardware)");
  cmd->add_option("--kappa-bar", flags->kappa_bar, "envelope constant");
  cmd->add_option("--epsilon", flags->epsilon, "envelope slack");
  cmd->add_option("--out", flags->out_dir, "output directory");
}

irf::ExperimentConfig resolve(const CommonFlags& flags,
                              const std::string& default_preset) {
  irf::ExperimentConfig config;
  if (!flags.config_path.empty()) {
    config = irf::load_config_file(flags.config_path);
  } else {
    config.preset = default_preset;
  }
  if (!flags.preset.empty()) config.preset = flags.preset;
  if (!flags.network_file.empty()) config.network_file = flags.network_file;
  if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
  if (flags.seed != 0) config.base_seed = flags.seed;
  if (flags.reps != 0) config.replications = flags.reps;
  if (flags.horizon != 0) config.horizon = flags.horizon;
  if (flags.alpha != 0.0) config.alpha = flags.alpha;
  if (flags.rho != 0.0) config.rho = flags.rho;
  if (flags.max_lambda >= 0) config.max_lambda = flags.max_lambda;
  if (flags.threads >= 0) config.threads = flags.threads;
  if (flags.kappa_bar >= 0.0) config.kappa_bar = flags.kappa_bar;
  if (flags.epsilon >= 0.0) config.epsilon = flags.epsilon;
  if (config.preset.empty() && config.network_file.empty()) {
    config.preset = default_preset;
  }
  return config;
}

std::vector<double> parse_rhos(const std::string& csv) {
  std::vector<double> rhos;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) rhos.push_back(std::stod(item));
  return rhos;
}

int cmd_simulate_classic(const CommonFlags& flags) {
  irf::ExperimentConfig config = resolve(flags, "classic");
  const irf::ClassicResult result = irf::run_classic(config);
  const irf::ClassicSummary& s = result.summary;
  std::printf("classic: %d replications, alpha=%g, KL=%g%s\n", s.replications,
              s.alpha, s.kl, s.detectable ? "" : " (undetectable: f == g)");
  std::printf(
      "  false alarm rate %.5f (wilson [%.5f, %.5f]), mean delay %.3f, "
      "detected %d, censored %d\n",
      s.detection.false_alarm_rate, s.detection.wilson.low,
      s.detection.wilson.high, s.detection.mean_delay, s.detection.detected,
      s.detection.censored);
  std::printf("  corollary slope: %d/%d within reference %.5f (mean %.5f)\n",
              s.corollary.satisfied, s.corollary.replications,
              s.corollary.reference, s.corollary.mean_slope);
  if (!config.out_dir.empty()) {
    irf::emit_classic(result, config, config.out_dir);
    std::printf("  wrote %d traces + summary.json to %s\n", s.replications,
                config.out_dir.c_str());
  }
  return 0;
}

int cmd_simulate_multi(const CommonFlags& flags) {
  irf::ExperimentConfig config = resolve(flags, "star4");
  const irf::MultiResult result = irf::run_multi(config);
  const irf::MultiSummary& s = result.summary;
  std::printf("multi: d=%d, %d replications, alpha=%g\n", s.d, s.replications,
              s.alpha);
  std::printf(
      "  L_rho=%g, K_rho=%g%s, I_min=%g, sigma_max=%g, I*=%g%s, M=%d\n",
      s.l_rho, s.k_rho, s.hyp_krho_le_one ? "" : " (>1: hypothesis unmet)",
      s.info.i_min, s.info.sigma_max, s.info.i_star,
      s.hyp_istar_positive ? "" : " (<=0: hypothesis unmet)", s.info.m_count);
  for (int j = 0; j < s.d; ++j) {
    std::printf(
        "  node %d: exact FA %.5f (wilson [%.5f, %.5f]) delay %.3f | approx "
        "FA %.5f delay %.3f\n",
        j + 1, s.exact_nodes[j].false_alarm_rate, s.exact_nodes[j].wilson.low,
        s.exact_nodes[j].wilson.high, s.exact_nodes[j].mean_delay,
        s.approx_nodes[j].false_alarm_rate, s.approx_nodes[j].mean_delay);
  }
  std::printf(
      "  post-change slopes: exact mean %.4f (%.0f%% negative), approx mean "
      "%.4f (%.0f%% negative), gap settled %.0f%% of %d rated\n",
      s.mean_slope_exact, 100.0 * s.frac_negative_slope_exact,
      s.mean_slope_approx, 100.0 * s.frac_negative_slope_approx,
      100.0 * s.frac_gap_settled, s.rated_replications);
  if (!config.out_dir.empty()) {
    irf::emit_multi(result, config, config.out_dir);
    std::printf("  wrote %d traces + summary.json to %s\n", s.replications,
                config.out_dir.c_str());
  }
  return 0;
}

int cmd_lipschitz(const std::string& rhos_csv, const std::string& preset,
                  int pairs, std::uint64_t seed) {
  std::vector<double> rhos;
  if (!rhos_csv.empty()) {
    rhos = parse_rhos(rhos_csv);
  } else {
    rhos = (preset == "classic" ? std::vector<double>{0.1}
                                : irf::star4_preset().rhos());
  }
  const irf::LipschitzReport report = irf::lipschitz_check(rhos, pairs, seed);
  std::fputs(irf::format_report(report).c_str(), stdout);
  return report.passed ? 0 : 1;
}

int cmd_rate_fit(const std::string& csv_path, const std::string& column,
                 int burn_in) {
  std::ifstream in(csv_path);
  if (!in) {
    std::fprintf(stderr, "cannot open %s\n", csv_path.c_str());
    return 1;
  }
  std::string line;
  if (!std::getline(in, line)) {
    std::fprintf(stderr, "empty csv\n");
    return 1;
  }
  int col = -1, idx = 0;
  std::stringstream header(line);
  std::string name;
  while (std::getline(header, name, ',')) {
    if (name == column) col = idx;
    ++idx;
  }
  if (col < 0) {
    std::fprintf(stderr, "no column named %s\n", column.c_str());
    return 1;
  }
  std::vector<double> values;
  while (std::getline(in, line)) {
    std::stringstream row(line);
    std::string cell;
    for (int c = 0; std::getline(row, cell, ','); ++c) {
      if (c == col) values.push_back(std::stod(cell));
    }
  }
  const irf::RateFit fit =
      irf::rate_fit(std::span<const double>(values), burn_in);
  if (fit.exact_convergence_step) {
    std::printf("%s: exact convergence at step %d\n", column.c_str(),
                *fit.exact_convergence_step);
  } else {
    std::printf("%s: slope %.8f per step (intercept %.8f, %zu rows, burn-in %d)\n",
                column.c_str(), fit.slope, fit.intercept, values.size(), burn_in);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential Bayesian change point detection: exact and "
               "approximate message-passing recursions with convergence "
               "diagnostics"};
  app.require_subcommand(1);

  CommonFlags classic_flags, multi_flags;
  CLI::App* classic =
      app.add_subcommand("simulate-classic", "single-stream detector runs");
  add_common(classic, &classic_flags);
  CLI::App* multi = app.add_subcommand(
      "simulate-multi", "network runs: exact vs approximate side by side");
  add_common(multi, &multi_flags);

  std::string rhos_csv, lip_preset = "star4";
  int lip_pairs = 10000;
  std::uint64_t lip_seed = 1;
  CLI::App* lipschitz = app.add_subcommand(
      "lipschitz-check", "closed-form vs sampled operator contraction bounds");
  lipschitz->add_option("--rhos", rhos_csv, "comma-separated prior parameters");
  lipschitz->add_option("--preset", lip_preset, "network preset for the rhos");
  lipschitz->add_option("--pairs", lip_pairs, "sampled pairs");
  lipschitz->add_option("--seed", lip_seed, "sampler seed");

  std::string fit_csv, fit_column = "dist_exact";
  int fit_burn_in = 5;
  CLI::App* fit = app.add_subcommand("rate-fit",
                                     "slope of log(column) from an emitted CSV");
  fit->add_option("--csv", fit_csv, "trace csv path")->required();
  fit->add_option("--column", fit_column, "column to fit");
  fit->add_option("--burn-in", fit_burn_in, "rows to skip");

  CLI11_PARSE(app, argc, argv);

  try {
    if (classic->parsed()) return cmd_simulate_classic(classic_flags);
    if (multi->parsed()) return cmd_simulate_multi(multi_flags);
    if (lipschitz->parsed()) {
      return cmd_lipschitz(rhos_csv, lip_preset, lip_pairs, lip_seed);
    }
    if (fit->parsed()) return cmd_rate_fit(fit_csv, fit_column, fit_burn_in);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
