#include "irf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "irf/errors.hpp"

namespace irf {

namespace {

// Runs body(i) for i in [0, count) on a small worker pool. Results must be
// written to preallocated slots so the outcome is schedule-independent.
void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  int workers = threads > 0 ? threads
                            : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

NodeDetectionStats detection_stats(std::span<const std::optional<int>> taus,
                                   std::span<const int> lambdas) {
  NodeDetectionStats stats;
  double delay_sum = 0.0;
  for (std::size_t r = 0; r < taus.size(); ++r) {
    if (!taus[r]) {
      ++stats.censored;
      continue;
    }
    if (*taus[r] < lambdas[r]) {
      ++stats.false_alarms;
    } else {
      ++stats.detected;
      delay_sum += static_cast<double>(*taus[r] - lambdas[r]);
    }
  }
  const int n = static_cast<int>(taus.size());
  stats.false_alarm_rate = static_cast<double>(stats.false_alarms) / n;
  stats.wilson = wilson_interval(stats.false_alarms, n, 1.96);
  stats.mean_delay = stats.detected > 0 ? delay_sum / stats.detected : 0.0;
  return stats;
}

}  // namespace

MultiResult run_multi(const ExperimentConfig& config) {
  validate(config);
  const Network net = network_for(config);
  if (!net.is_tree()) {
    throw UnsupportedTopologyError("run_multi requires an acyclic network");
  }
  const int d = net.node_count();
  const std::vector<double> rhos = net.rhos();
  const ExactPredictKernel kernel = ExactPredictKernel::build(rhos);
  const double threshold = 1.0 - config.alpha;
  const int horizon = config.horizon;

  MultiResult result;
  result.traces.assign(config.replications, PosteriorTrace{});

  parallel_for(config.replications, config.threads, [&](int r) {
    Rng rng(config.base_seed + static_cast<std::uint64_t>(r));
    ChangeTimes changes = sample_changes(net, rng);
    if (config.max_lambda > 0) {
      while (changes.max_lambda() > config.max_lambda) {
        changes = sample_changes(net, rng);
      }
    }

    PosteriorTrace trace;
    trace.lambdas = changes.lambdas;
    trace.tau_exact.assign(d, std::nullopt);
    trace.tau_approx.assign(d, std::nullopt);

    ProbVec exact = ProbVec::point_mass(d, 0);
    ProbVec approx = ProbVec::point_mass(d, 0);
    MarginalState state = MarginalState::initial(d);

    trace.gamma_exact.push_back(std::vector<double>(d, 0.0));
    trace.gamma_approx.push_back(std::vector<double>(d, 0.0));
    trace.dist_exact.push_back(dist_to_anchor(exact));
    trace.dist_approx.push_back(dist_to_anchor(approx));
    trace.dist_gap.push_back(l1_distance(exact, approx));

    for (int n = 1; n <= horizon; ++n) {
      const ObservationFrame frame = sample_frame(net, changes, n, rng);
      const WeightVec theta = likelihood_weights(net, frame);
      exact = exact_step(exact, theta, kernel);
      approx = mean_field_step(approx, theta, rhos);
      MarginalStepResult step = marginal_mp_step(state, frame, net);
      state = std::move(step.state);

      std::vector<double> ge(d), ga(d);
      for (int j = 1; j <= d; ++j) {
        ge[j - 1] = marginal(exact, j).p1;
        ga[j - 1] = state.gammas[j - 1];
        if (!trace.tau_exact[j - 1] && ge[j - 1] >= threshold) {
          trace.tau_exact[j - 1] = n;
        }
        if (!trace.tau_approx[j - 1] && ga[j - 1] >= threshold) {
          trace.tau_approx[j - 1] = n;
        }
      }
      trace.gamma_exact.push_back(std::move(ge));
      trace.gamma_approx.push_back(std::move(ga));
      trace.dist_exact.push_back(dist_to_anchor(exact));
      trace.dist_approx.push_back(dist_to_anchor(approx));
      trace.dist_gap.push_back(l1_distance(exact, approx));
    }
    result.traces[r] = std::move(trace);
  });

  MultiSummary& summary = result.summary;
  summary.replications = config.replications;
  summary.d = d;
  summary.alpha = config.alpha;
  summary.l_rho = exact_predict_lipschitz_bound(rhos);
  summary.k_rho = mean_field_lipschitz_bound(rhos);
  summary.info = info_stats(net, config.kappa_bar);
  summary.hyp_istar_positive = summary.info.i_star > 0.0;
  summary.hyp_krho_le_one = summary.k_rho <= 1.0;

  for (int j = 0; j < d; ++j) {
    std::vector<std::optional<int>> te, ta;
    std::vector<int> lams;
    for (const PosteriorTrace& trace : result.traces) {
      te.push_back(trace.tau_exact[j]);
      ta.push_back(trace.tau_approx[j]);
      lams.push_back(trace.lambdas[j]);
    }
    summary.exact_nodes.push_back(detection_stats(te, lams));
    summary.approx_nodes.push_back(detection_stats(ta, lams));
  }

  int rated = 0, neg_exact = 0, neg_approx = 0, settled = 0;
  double slope_exact_sum = 0.0, slope_approx_sum = 0.0;
  for (const PosteriorTrace& trace : result.traces) {
    const int burn =
        *std::max_element(trace.lambdas.begin(), trace.lambdas.end());
    if (static_cast<int>(trace.dist_exact.size()) <= burn + 3) continue;
    ++rated;
    const RateFit fe = rate_fit(std::span<const double>(trace.dist_exact), burn);
    const RateFit fa = rate_fit(std::span<const double>(trace.dist_approx), burn);
    const double se = fe.exact_convergence_step ? -1.0 : fe.slope;
    const double sa = fa.exact_convergence_step ? -1.0 : fa.slope;
    slope_exact_sum += se;
    slope_approx_sum += sa;
    if (se < 0.0) ++neg_exact;
    if (sa < 0.0) ++neg_approx;
    double max_gap = 0.0;
    for (double g : trace.dist_gap) max_gap = std::max(max_gap, g);
    if (max_gap == 0.0 || trace.dist_gap.back() < 0.1 * max_gap) ++settled;
  }
  summary.rated_replications = rated;
  if (rated > 0) {
    summary.frac_negative_slope_exact = static_cast<double>(neg_exact) / rated;
    summary.frac_negative_slope_approx = static_cast<double>(neg_approx) / rated;
    summary.mean_slope_exact = slope_exact_sum / rated;
    summary.mean_slope_approx = slope_approx_sum / rated;
    summary.frac_gap_settled = static_cast<double>(settled) / rated;
  }
  return result;
}

ClassicResult run_classic(const ExperimentConfig& config) {
  validate(config);
  const ClassicModel model = classic_preset(config.rho);
  ClassicResult result;
  result.runs.assign(config.replications, ClassicRun{});

  parallel_for(config.replications, config.threads, [&](int r) {
    Rng rng(config.base_seed + static_cast<std::uint64_t>(r));
    const int lambda = sample_changepoint(model, rng);
    result.runs[r] =
        shiryayev_run(model, config.alpha, lambda, config.horizon, rng);
  });

  ClassicSummary& summary = result.summary;
  summary.replications = config.replications;
  summary.alpha = config.alpha;
  summary.kl = kl_gaussian(model.post_change, model.pre_change);
  summary.detectable = summary.kl > 0.0;

  std::vector<std::optional<int>> taus;
  std::vector<int> lams;
  for (const ClassicRun& run : result.runs) {
    taus.push_back(run.stop_time);
    lams.push_back(run.lambda_true);
  }
  summary.detection = detection_stats(taus, lams);
  summary.corollary = corollary_rate_check(
      model, 10, 200, std::min(config.replications, 200),
      config.base_seed ^ 0x5eedULL);
  return result;
}

CorollarySlopeCheck corollary_rate_check(const ClassicModel& model, int k,
                                         int post_steps, int replications,
                                         std::uint64_t seed) {
  validate(model);
  if (k < 0 || post_steps < 10 || replications < 1) {
    throw std::invalid_argument("corollary_rate_check: bad arguments");
  }
  CorollarySlopeCheck check;
  check.replications = replications;
  const double kl = kl_gaussian(model.post_change, model.pre_change);
  check.reference = std::log1p(-model.rho) - kl;

  const int lambda = k + 1;  // forced change time; stats condition on it
  const int horizon = k + post_steps;
  double slope_sum = 0.0;
  for (int r = 0; r < replications; ++r) {
    Rng rng(seed + static_cast<std::uint64_t>(r));
    double gamma = 0.0, beta = 1.0;
    std::vector<double> path;
    std::vector<double> llrs;
    path.reserve(horizon + 1);
    path.push_back(1.0);
    for (int n = 1; n <= horizon; ++n) {
      gamma = prior_predict(std::min(gamma, 1.0), model.rho);
      beta *= 1.0 - model.rho;
      const GaussianSpec& law =
          n >= lambda ? model.post_change : model.pre_change;
      const double x = law.sample(rng);
      const double llr =
          model.pre_change.log_density(x) - model.post_change.log_density(x);
      if (n >= lambda) llrs.push_back(llr);
      posterior_pair_update(gamma, beta, llr);
      path.push_back(beta);
    }

    double mean = 0.0;
    for (double v : llrs) mean += v;
    mean /= static_cast<double>(llrs.size());
    double var = 0.0;
    for (double v : llrs) var += (v - mean) * (v - mean);
    var /= static_cast<double>(llrs.size() - 1);
    const double stderr_llr = std::sqrt(var / static_cast<double>(llrs.size()));

    const RateFit fit = rate_fit(std::span<const double>(path), k);
    const double slope = fit.exact_convergence_step
                             ? -std::numeric_limits<double>::infinity()
                             : fit.slope;
    slope_sum += fit.exact_convergence_step ? check.reference : slope;
    if (slope <= check.reference + 3.0 * stderr_llr) ++check.satisfied;
  }
  check.mean_slope = slope_sum / replications;
  return check;
}

LipschitzReport lipschitz_check(std::span<const double> rhos, int pairs,
                                std::uint64_t seed) {
  LipschitzReport report;
  report.rhos.assign(rhos.begin(), rhos.end());
  report.exact_bound = exact_predict_lipschitz_bound(rhos);
  report.mean_field_bound = mean_field_lipschitz_bound(rhos);
  const ExactPredictKernel kernel = ExactPredictKernel::build(rhos);
  report.exact_empirical =
      empirical_lipschitz(exact_predict_operator(kernel), pairs, seed);
  report.mean_field_empirical = empirical_lipschitz(
      mean_field_predict_operator(report.rhos), pairs, seed ^ 0xabcdULL);
  report.jacobian = mean_field_jacobian_check(rhos, 32, seed ^ 0x7777ULL);
  report.hyp_krho_le_one = report.mean_field_bound <= 1.0;
  report.passed = report.exact_empirical <= report.exact_bound + 1e-9 &&
                  report.mean_field_empirical <= report.mean_field_bound + 1e-9 &&
                  report.jacobian.passed;
  return report;
}

std::string format_report(const LipschitzReport& report) {
  std::ostringstream out;
  out << "rhos:";
  for (double r : report.rhos) out << ' ' << r;
  out << "\nexact predict:      bound " << report.exact_bound << ", empirical "
      << report.exact_empirical
      << (report.exact_empirical <= report.exact_bound + 1e-9 ? "  [ok]"
                                                              : "  [VIOLATED]")
      << "\nmean-field predict: bound " << report.mean_field_bound
      << ", empirical " << report.mean_field_empirical
      << (report.mean_field_empirical <= report.mean_field_bound + 1e-9
              ? "  [ok]"
              : "  [VIOLATED]")
      << "\njacobian column sums: embed dev " << report.jacobian.max_embed_colsum_dev
      << ", predict dev " << report.jacobian.max_predict_colsum_dev
      << ", composed norm " << report.jacobian.max_product_norm << " <= "
      << report.jacobian.bound << (report.jacobian.passed ? "  [ok]" : "  [VIOLATED]")
      << "\n";
  if (!report.hyp_krho_le_one) {
    out << "warning: K_rho = " << report.mean_field_bound
        << " > 1; the contraction hypothesis for the approximate algorithm "
           "does not hold for these priors\n";
  }
  out << (report.passed ? "PASS" : "FAIL") << "\n";
  return out.str();
}

}  // namespace irf
