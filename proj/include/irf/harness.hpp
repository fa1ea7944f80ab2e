#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "irf/approx.hpp"
#include "irf/classic.hpp"
#include "irf/engine.hpp"
#include "irf/exact.hpp"
#include "irf/network.hpp"

namespace irf {

struct ExperimentConfig {
  std::string preset = "star4";    // "classic" or "star4"; ignored when
  std::string network_file;        // a network file is given
  int horizon = 80;
  double alpha = 0.01;
  int replications = 100;
  std::uint64_t base_seed = 1;
  double kappa_bar = 1.0;          // scale of the sqrt(log M) slack term
  double epsilon = 0.1;            // envelope slack
  int max_lambda = 0;              // > 0: rejection-sample until max <= this
  int threads = 0;                 // 0: hardware concurrency
  std::string out_dir;
  double rho = 0.1;                // classic preset prior parameter
};

void validate(const ExperimentConfig& config);

// Key-value text file, same names as the CLI flags; '#' comments.
ExperimentConfig load_config_file(const std::string& path);

ClassicModel classic_preset(double rho = 0.1);
Network star4_preset();
Network network_for(const ExperimentConfig& config);

// Line-based network description: see README for the schema.
Network load_network_file(const std::string& path);

// 95% Wilson score interval helpers for a binomial proportion.
struct WilsonInterval {
  double low = 0.0, high = 0.0;
};
WilsonInterval wilson_interval(int successes, int trials, double z);
double wilson_halfwidth(int successes, int trials, double z);

// One replication of the side-by-side run. Index n ranges over 0..horizon;
// row 0 is the initial state.
struct PosteriorTrace {
  std::vector<int> lambdas;
  std::vector<std::vector<double>> gamma_exact;   // [n][node]
  std::vector<std::vector<double>> gamma_approx;  // [n][node], marginal MP
  std::vector<double> dist_exact;                 // ||y_n - anchor||_1
  std::vector<double> dist_approx;                // ||y~_n - anchor||_1
  std::vector<double> dist_gap;                   // ||y_n - y~_n||_1
  std::vector<std::optional<int>> tau_exact;      // per node
  std::vector<std::optional<int>> tau_approx;
};

struct NodeDetectionStats {
  int false_alarms = 0;
  double false_alarm_rate = 0.0;
  WilsonInterval wilson;
  double mean_delay = 0.0;  // over detected, non-false-alarm replications
  int detected = 0;
  int censored = 0;  // never crossed the threshold within the horizon
};

struct MultiSummary {
  int replications = 0;
  int d = 0;
  double alpha = 0.0;
  double l_rho = 0.0;  // exact predict Lipschitz bound
  double k_rho = 0.0;  // mean-field predict Lipschitz bound
  InfoStats info;
  bool hyp_istar_positive = false;
  bool hyp_krho_le_one = false;
  std::vector<NodeDetectionStats> exact_nodes;
  std::vector<NodeDetectionStats> approx_nodes;
  // Convergence behavior past the last change point.
  int rated_replications = 0;
  double frac_negative_slope_exact = 0.0;
  double frac_negative_slope_approx = 0.0;
  double mean_slope_exact = 0.0;
  double mean_slope_approx = 0.0;
  // "The two algorithms approach one another": final gap below 10% of the
  // running maximum gap.
  double frac_gap_settled = 0.0;
};

struct MultiResult {
  std::vector<PosteriorTrace> traces;
  MultiSummary summary;
};

// Replicated side-by-side run of the exact kernel recursion and the
// marginal message-passing recursion on identical observation streams.
MultiResult run_multi(const ExperimentConfig& config);

struct ClassicReplication {
  ClassicRun run;
};

struct CorollarySlopeCheck {
  int replications = 0;
  int satisfied = 0;          // slope <= log((1-rho) e^{-I}) + 3 stderr
  double reference = 0.0;     // log((1-rho) e^{-I})
  double mean_slope = 0.0;
};

struct ClassicSummary {
  int replications = 0;
  double alpha = 0.0;
  double kl = 0.0;
  NodeDetectionStats detection;
  bool detectable = true;  // kl > 0
  CorollarySlopeCheck corollary;
};

struct ClassicResult {
  std::vector<ClassicRun> runs;
  ClassicSummary summary;
};

ClassicResult run_classic(const ExperimentConfig& config);

// Slope of log(1 - gamma) over post_steps observations after a forced
// change at time k + 1, against log((1-rho) e^{-I}) plus three empirical
// standard errors of the log likelihood ratio.
CorollarySlopeCheck corollary_rate_check(const ClassicModel& model, int k,
                                         int post_steps, int replications,
                                         std::uint64_t seed);

struct LipschitzReport {
  std::vector<double> rhos;
  double exact_bound = 0.0;
  double exact_empirical = 0.0;
  double mean_field_bound = 0.0;
  double mean_field_empirical = 0.0;
  JacobianCheck jacobian;
  bool hyp_krho_le_one = false;
  bool passed = false;
};

LipschitzReport lipschitz_check(std::span<const double> rhos, int pairs,
                                std::uint64_t seed);
std::string format_report(const LipschitzReport& report);

// CSV body for one replication; header plus horizon + 1 data rows, all
// values at 17 significant digits. Byte-stable for fixed inputs.
std::string trace_csv(const PosteriorTrace& trace);
std::string classic_csv(const ClassicRun& run);

// Writes per-replication CSVs and a JSON summary into dir.
void emit_multi(const MultiResult& result, const ExperimentConfig& config,
                const std::filesystem::path& dir);
void emit_classic(const ClassicResult& result, const ExperimentConfig& config,
                  const std::filesystem::path& dir);

}  // namespace irf
