#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "irf/harness.hpp"

namespace irf {

namespace {

[[noreturn]] void fail(const std::string& path, int line, const std::string& what) {
  throw std::invalid_argument(path + ":" + std::to_string(line) + ": " + what);
}

std::string strip_comment(const std::string& line) {
  const auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace

void validate(const ExperimentConfig& config) {
  if (config.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (config.replications < 1) {
    throw std::invalid_argument("replications must be >= 1");
  }
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    throw std::invalid_argument("alpha must be in (0, 1)");
  }
  if (config.max_lambda < 0) {
    throw std::invalid_argument("max_lambda must be nonnegative");
  }
  if (config.preset.empty() && config.network_file.empty()) {
    throw std::invalid_argument("either a preset or a network file is required");
  }
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  ExperimentConfig config;
  config.preset.clear();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream tokens(strip_comment(line));
    std::string key;
    if (!(tokens >> key)) continue;
    auto want = [&](auto& slot) {
      if (!(tokens >> slot)) fail(path, lineno, "missing value for " + key);
    };
    if (key == "preset") {
      want(config.preset);
    } else if (key == "network") {
      want(config.network_file);
    } else if (key == "horizon") {
      want(config.horizon);
    } else if (key == "alpha") {
      want(config.alpha);
    } else if (key == "reps") {
      want(config.replications);
    } else if (key == "seed") {
      want(config.base_seed);
    } else if (key == "kappa_bar") {
      want(config.kappa_bar);
    } else if (key == "epsilon") {
      want(config.epsilon);
    } else if (key == "max_lambda") {
      want(config.max_lambda);
    } else if (key == "threads") {
      want(config.threads);
    } else if (key == "out") {
      want(config.out_dir);
    } else if (key == "rho") {
      want(config.rho);
    } else {
      fail(path, lineno, "unknown key: " + key);
    }
  }
  return config;
}

ClassicModel classic_preset(double rho) {
  return ClassicModel{GaussianSpec{0.0, 1.0}, GaussianSpec{1.0, 1.0}, rho};
}

Network star4_preset() {
  const GaussianSpec post{0.0, 1.0};
  const GaussianSpec pre{1.0, 1.0};
  std::vector<NodeParams> nodes(4, NodeParams{0.1, post, pre});
  std::vector<EdgeParams> edges{
      {1, 2, post, pre}, {2, 3, post, pre}, {2, 4, post, pre}};
  return Network::make(std::move(nodes), std::move(edges));
}

Network network_for(const ExperimentConfig& config) {
  if (!config.network_file.empty()) return load_network_file(config.network_file);
  if (config.preset == "star4") return star4_preset();
  throw std::invalid_argument("unknown network preset: " + config.preset);
}

Network load_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open network file: " + path);

  int d = 0;
  std::vector<NodeParams> nodes;
  std::vector<bool> node_seen;
  std::vector<EdgeParams> edges;
  EdgeSwitchConvention convention = EdgeSwitchConvention::kAfterLambda;

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream tokens(strip_comment(line));
    std::string key;
    if (!(tokens >> key)) continue;
    if (key == "nodes") {
      if (d != 0) fail(path, lineno, "duplicate nodes line");
      if (!(tokens >> d) || d < 1) fail(path, lineno, "bad node count");
      nodes.assign(d, NodeParams{});
      node_seen.assign(d, false);
    } else if (key == "node") {
      if (d == 0) fail(path, lineno, "nodes line must come first");
      int j = 0;
      std::string rho_kw, post_kw, pre_kw;
      NodeParams params;
      if (!(tokens >> j >> rho_kw >> params.rho >> post_kw >>
            params.post_change.mean >> params.post_change.variance >> pre_kw >>
            params.pre_change.mean >> params.pre_change.variance) ||
          rho_kw != "rho" || post_kw != "post" || pre_kw != "pre") {
        fail(path, lineno,
             "expected: node <j> rho <r> post <mean> <var> pre <mean> <var>");
      }
      if (j < 1 || j > d) fail(path, lineno, "node id out of range");
      if (node_seen[j - 1]) fail(path, lineno, "duplicate node " + std::to_string(j));
      node_seen[j - 1] = true;
      nodes[j - 1] = params;
    } else if (key == "edge") {
      if (d == 0) fail(path, lineno, "nodes line must come first");
      EdgeParams e;
      std::string post_kw, pre_kw;
      if (!(tokens >> e.i >> e.j >> post_kw >> e.post_change.mean >>
            e.post_change.variance >> pre_kw >> e.pre_change.mean >>
            e.pre_change.variance) ||
          post_kw != "post" || pre_kw != "pre") {
        fail(path, lineno,
             "expected: edge <i> <j> post <mean> <var> pre <mean> <var>");
      }
      edges.push_back(e);
    } else if (key == "convention") {
      std::string value;
      if (!(tokens >> value)) fail(path, lineno, "missing convention value");
      if (value == "literal") {
        convention = EdgeSwitchConvention::kAfterLambda;
      } else if (value == "nodelike") {
        convention = EdgeSwitchConvention::kAtLambda;
      } else {
        fail(path, lineno, "convention must be 'literal' or 'nodelike'");
      }
    } else {
      fail(path, lineno, "unknown key: " + key);
    }
  }
  if (d == 0) throw std::invalid_argument(path + ": missing nodes line");
  for (int j = 0; j < d; ++j) {
    if (!node_seen[j]) {
      throw std::invalid_argument(path + ": node " + std::to_string(j + 1) +
                                  " not described");
    }
  }
  return Network::make(std::move(nodes), std::move(edges), convention);
}

WilsonInterval wilson_interval(int successes, int trials, double z) {
  if (trials < 1) throw std::invalid_argument("wilson_interval: trials must be >= 1");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return WilsonInterval{center - half, center + half};
}

double wilson_halfwidth(int successes, int trials, double z) {
  const WilsonInterval w = wilson_interval(successes, trials, z);
  return 0.5 * (w.high - w.low);
}

}  // namespace irf
