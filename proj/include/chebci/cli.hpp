#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chebci/chains.hpp"
#include "chebci/core.hpp"
#include "chebci/coverage.hpp"
#include "chebci/errors.hpp"
#include "chebci/trace_io.hpp"
#include "chebci/variance.hpp"

namespace chebci::cli {

enum ExitCode : int {
  ok = 0,
  failure = 1,
  usage_error = 2,
  file_missing = 3,
  parse_failure = 4,
  too_few_samples = 5,
  bad_parameter = 6,
  write_failure = 7,
};

using ordered_json = nlohmann::ordered_json;

namespace detail {

struct ChainOptions {
  std::string kind = "iid";
  double mu = 0.0;
  double sigma = 1.0;
  double rho = 0.0;
  double s = 1.0;
  double proposal_sd = 2.4;
  std::optional<double> x0;

  void attach(CLI::App& app) {
    app.add_option("--chain", kind, "Chain type")
        ->check(CLI::IsMember({"iid", "ar1", "rwm"}))
        ->capture_default_str();
    app.add_option("--mu", mu, "iid mean")->capture_default_str();
    app.add_option("--sigma", sigma, "iid standard deviation")->capture_default_str();
    app.add_option("--rho", rho, "AR(1) coefficient")->capture_default_str();
    app.add_option("--s", s, "AR(1) innovation standard deviation")->capture_default_str();
    app.add_option("--proposal-sd", proposal_sd, "RWM proposal standard deviation")
        ->capture_default_str();
    app.add_option("--x0", x0, "Starting value (default: stationary draw)");
  }

  ChainSpec spec() const {
    ChainSpec c;
    if (kind == "iid")
      c = ChainSpec::iid_normal(mu, sigma);
    else if (kind == "ar1")
      c = ChainSpec::ar1(rho, s, x0);
    else
      c = ChainSpec::rwm_normal(proposal_sd, x0);
    c.validate();
    return c;
  }
};

struct ConfigOptions {
  double alpha = 0.05;
  double epsilon = 0.001;
  std::string method = "batch_means";
  std::size_t burn_in = 0;
  std::optional<std::size_t> batch_size;

  void attach(CLI::App& app) {
    app.add_option("--alpha", alpha, "Significance level")->capture_default_str();
    app.add_option("--epsilon", epsilon, "Chebyshev slack")->capture_default_str();
    app.add_option("--method", method, "Variance estimator")
        ->check(CLI::IsMember({"batch_means", "initial_sequence"}))
        ->capture_default_str();
    app.add_option("--burn-in", burn_in, "Samples discarded from the start")->capture_default_str();
    app.add_option("--batch-size", batch_size, "Batch size for batch means (default floor(sqrt(n)))");
  }

  CiConfig config() const {
    CiConfig c;
    c.alpha = alpha;
    c.epsilon = epsilon;
    c.variance_method = *parse_variance_method(method);
    c.burn_in = burn_in;
    if (c.variance_method == VarianceMethod::batch_means) c.tuning = batch_size;
    c.validate();
    return c;
  }
};

inline ordered_json interval_json(const IntervalReport& r) {
  return {{"multiplier", r.multiplier},
          {"lower", r.lower},
          {"upper", r.upper},
          {"half_width", r.half_width}};
}

inline ordered_json chain_json(const ChainSpec& c) {
  ordered_json j;
  j["kind"] = to_string(c.kind);
  switch (c.kind) {
  case ChainKind::iid_normal:
    j["mu"] = c.mu;
    j["sigma"] = c.sigma;
    break;
  case ChainKind::ar1:
    j["rho"] = c.rho;
    j["s"] = c.s;
    break;
  case ChainKind::rwm_normal:
    j["proposal_sd"] = c.proposal_sd;
    break;
  }
  if (c.kind != ChainKind::iid_normal) {
    if (c.x0)
      j["x0"] = *c.x0;
    else
      j["x0"] = "stationary";
  }
  j["true_mean"] = c.true_mean();
  if (auto v = c.true_v())
    j["true_v"] = *v;
  else
    j["true_v"] = nullptr;
  return j;
}

inline ordered_json method_coverage_json(const MethodCoverage& m) {
  return {{"coverage", m.coverage},
          {"covered", m.covered},
          {"std_error", m.std_error},
          {"mean_half_width", m.mean_half_width}};
}

inline void warn_limit_case(double epsilon, std::ostream& err) {
  if (epsilon == 0.0)
    err << "warning: epsilon = 0 is a limit case; the coverage guarantee requires epsilon > 0\n";
}

} // namespace detail

inline void print_multiplier_table(double alpha, double epsilon, std::ostream& out) {
  const double cheby = chebyshev_multiplier(alpha, epsilon);
  const double z = clt_multiplier(alpha);
  std::ostringstream os;
  os << std::left << std::setw(12) << "alpha" << alpha << '\n'
     << std::setw(12) << "epsilon" << epsilon << '\n'
     << std::fixed << std::setprecision(4)
     << std::setw(12) << "chebyshev" << cheby << '\n'
     << std::setw(12) << "clt" << z << '\n'
     << std::setw(12) << "ratio" << cheby / z << '\n';
  out << os.str();
}

inline ordered_json estimate_json(const AnalysisReport& a) {
  ordered_json j;
  j["n"] = a.chebyshev.n;
  j["burn_in"] = a.config.burn_in;
  j["estimate"] = a.chebyshev.estimate;
  j["variance_method"] = to_string(a.variance.method);
  j["v_hat"] = a.variance.v_hat;
  j["alpha"] = a.config.alpha;
  j["epsilon"] = a.config.epsilon;
  j["chebyshev"] = detail::interval_json(a.chebyshev);
  j["clt"] = detail::interval_json(a.clt);
  j["degenerate"] = a.chebyshev.degenerate;
  return j;
}

inline ordered_json coverage_json(const CoverageResult& r) {
  ordered_json j;
  j["chain"] = detail::chain_json(r.chain);
  j["n"] = r.n;
  j["replications"] = r.replications;
  j["seed"] = r.seed;
  ordered_json config;
  config["alpha"] = r.config.alpha;
  config["epsilon"] = r.config.epsilon;
  config["variance_method"] = to_string(r.config.variance_method);
  config["burn_in"] = r.config.burn_in;
  if (r.config.tuning)
    config["batch_size"] = *r.config.tuning;
  else
    config["batch_size"] = nullptr;
  j["config"] = config;
  j["chebyshev"] = detail::method_coverage_json(r.chebyshev);
  j["clt"] = detail::method_coverage_json(r.clt);
  j["multiplier_ratio"] = r.multiplier_ratio;
  j["low_replication"] = r.low_replication;
  return j;
}

inline void write_coverage_csv(std::ostream& out, const CoverageResult& r) {
  out << "replication,estimate,v_hat,cheby_lower,cheby_upper,cheby_covered,clt_lower,clt_upper,clt_covered\n";
  out << std::setprecision(17);
  for (const auto& row : r.rows) {
    out << row.replication << ',' << row.estimate << ',' << row.v_hat << ',' << row.cheby_lower
        << ',' << row.cheby_upper << ',' << int{row.cheby_covered} << ',' << row.clt_lower << ','
        << row.clt_upper << ',' << int{row.clt_covered} << '\n';
  }
}

// Entry point shared by the chebci executable and the tests. Data goes to
// `out`, diagnostics to `err`; the return value is the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chebyshev confidence intervals for MCMC estimates", "chebci"};
  app.require_subcommand(1);

  auto* multiplier = app.add_subcommand("multiplier", "Print the Chebyshev and CLT multipliers");
  double m_alpha = 0.05;
  double m_epsilon = 0.001;
  multiplier->add_option("--alpha", m_alpha, "Significance level")->capture_default_str();
  multiplier->add_option("--epsilon", m_epsilon, "Chebyshev slack")->capture_default_str();

  auto* estimate = app.add_subcommand("estimate", "Interval report for a trace file (JSON)");
  std::string trace_path;
  estimate->add_option("trace", trace_path, "Trace file, one value per line")->required();
  detail::ConfigOptions est_config;
  est_config.attach(*estimate);

  auto* simulate_cmd = app.add_subcommand("simulate", "Write a simulated chain trace");
  detail::ChainOptions sim_chain;
  sim_chain.attach(*simulate_cmd);
  std::size_t sim_n = 10000;
  std::uint64_t sim_seed = 1;
  std::string sim_out;
  simulate_cmd->add_option("--n", sim_n, "Trace length")->capture_default_str();
  simulate_cmd->add_option("--seed", sim_seed, "Master seed")->capture_default_str();
  simulate_cmd->add_option("--out", sim_out, "Output trace file")->required();

  auto* coverage = app.add_subcommand("coverage", "Empirical interval coverage experiment (JSON)");
  detail::ChainOptions cov_chain;
  cov_chain.attach(*coverage);
  detail::ConfigOptions cov_config;
  cov_config.attach(*coverage);
  std::size_t cov_n = 10000;
  std::size_t cov_reps = 1000;
  std::uint64_t cov_seed = 1;
  std::size_t cov_threads = 0;
  std::string cov_csv;
  coverage->add_option("--n", cov_n, "Trace length per replication")->capture_default_str();
  coverage->add_option("--reps", cov_reps, "Replications")->capture_default_str();
  coverage->add_option("--seed", cov_seed, "Master seed")->capture_default_str();
  coverage->add_option("--threads", cov_threads, "Worker threads (0 = all cores)")
      ->capture_default_str();
  coverage->add_option("--csv", cov_csv, "Write per-replication rows to this CSV file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage_error;
  }

  try {
    if (multiplier->parsed()) {
      print_multiplier_table(m_alpha, m_epsilon, out);
      detail::warn_limit_case(m_epsilon, err);
    } else if (estimate->parsed()) {
      const CiConfig config = est_config.config();
      const Trace trace = read_trace(trace_path);
      if (config.burn_in >= trace.size() || trace.size() - config.burn_in < 4)
        throw insufficient_samples("insufficient samples: need >= 4 values after burn-in, have " +
                                   std::to_string(trace.size() > config.burn_in
                                                      ? trace.size() - config.burn_in
                                                      : 0));
      out << estimate_json(analyze(trace, config)).dump(2) << '\n';
      detail::warn_limit_case(config.epsilon, err);
    } else if (simulate_cmd->parsed()) {
      const ChainSpec chain = sim_chain.spec();
      if (sim_n == 0) throw std::invalid_argument("--n must be positive");
      write_trace(sim_out, simulate(chain, sim_n, sim_seed));
    } else if (coverage->parsed()) {
      const ChainSpec chain = cov_chain.spec();
      const CiConfig config = cov_config.config();
      const CoverageResult result =
          run_coverage(chain, cov_n, cov_reps, config, cov_seed, cov_threads);
      if (!cov_csv.empty()) {
        std::ofstream csv(cov_csv);
        if (!csv) throw io_error("cannot open '" + cov_csv + "' for writing");
        write_coverage_csv(csv, result);
        if (!csv) throw io_error("failed writing '" + cov_csv + "'");
      }
      out << coverage_json(result).dump(2) << '\n';
      if (result.low_replication)
        err << "warning: " << result.replications
            << " replication(s); coverage standard errors are not reliable below 100\n";
      detail::warn_limit_case(config.epsilon, err);
    }
  } catch (const file_not_found& e) {
    err << "error: " << e.what() << '\n';
    return file_missing;
  } catch (const parse_error& e) {
    err << "error: parse error at " << e.what() << '\n';
    return parse_failure;
  } catch (const insufficient_samples& e) {
    err << "error: " << e.what() << '\n';
    return too_few_samples;
  } catch (const io_error& e) {
    err << "error: " << e.what() << '\n';
    return write_failure;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return bad_parameter;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return bad_parameter;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return failure;
  }
  return ok;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("chebci");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace chebci::cli
