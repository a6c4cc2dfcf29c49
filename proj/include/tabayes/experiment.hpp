#ifndef TABAYES_EXPERIMENT_HPP
#define TABAYES_EXPERIMENT_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tabayes/config.hpp"
#include "tabayes/discrete_measure.hpp"
#include "tabayes/distributions.hpp"
#include "tabayes/metrics.hpp"
#include "tabayes/posterior_samples.hpp"
#include "tabayes/random_measure.hpp"
#include "tabayes/rng.hpp"
#include "tabayes/ta_engine.hpp"

namespace tabayes {

/// One simulation study cell: a data-generating mechanism, a sample size and
/// a set of methods, repeated over independent datasets.
///
/// Config file keys (all optional): experiment, methods, n, replicates,
/// chain_length, burn_in, seed, dp_concentration, dp_truncation, bin_width,
/// base_mean, base_variance, prior_alpha, prior_beta, prior_mu0, prior_kappa,
/// prior_mean, prior_variance, prior_draws, q_table_points, hpd_level,
/// hpd_grid, threads, write_raw, write_datasets, out.
struct ExperimentConfig {
  /// meanvar, mar-1, mar-2, mar-3 or mar-4.
  std::string experiment = "meanvar";
  std::vector<std::string> methods{"tab", "bb", "bel", "gb"};
  std::size_t n = 20;
  std::size_t replicates = 100;
  ChainSettings chain{};
  DpSpec dp{};
  /// Subjective prior on (mu, sigma2) for meanvar.
  NigParams nig{6.623, 60.442, 3.5, 1.0};
  /// Normal subjective prior on the AIPW mean for mar-*.
  double prior_mean = 6.0;
  double prior_variance = 50.0;
  std::size_t prior_draws_for_q = 50000;
  std::size_t q_table_points = 256;
  double hpd_level = 0.95;
  std::size_t hpd_grid = 200;
  std::uint64_t seed = 1;
  std::string out_dir;
  bool write_raw = false;
  bool write_datasets = false;
  /// 0 uses the hardware concurrency.
  std::size_t threads = 0;

  /// Defaults for the named experiment, including its DP proposal.
  static ExperimentConfig defaults(const std::string& experiment);
  /// Defaults for kv["experiment"] (meanvar if absent) overridden by kv.
  static ExperimentConfig from_key_values(const KeyValues& kv);
  void apply(const KeyValues& kv);
  void validate() const;

  bool is_mar() const { return experiment != "meanvar"; }
  int mar_model() const;
  /// True parameter: (3.5, 10.75) for meanvar, 6 for mar-*.
  std::vector<double> theta0() const;
};

/// Target of a metrics row: the joint parameter or one coordinate.
struct MetricTarget {
  std::string label;
  std::vector<std::size_t> coords;
};

std::vector<MetricTarget> metric_targets(const ExperimentConfig& config);

TaModelSpec make_ta_spec(const ExperimentConfig& config);
Dataset generate_dataset(const ExperimentConfig& config, RngHandle& rng);

/// Runs one method on one dataset. q_prior is required for tab.
PosteriorSamples run_method(const ExperimentConfig& config, const std::string& method, const Dataset& data,
                            const DensityModel* q_prior, RngHandle& rng);

struct ReplicateDiagnostics {
  std::size_t replicate = 0;
  std::string method;
  double acceptance_rate = 0.0;
  std::size_t functional_failures = 0;
  std::size_t restarts = 0;
  bool excluded = false;
  std::string reason;
};

struct ExperimentResult {
  std::vector<MetricsRow> rows;
  std::vector<ReplicateDiagnostics> diagnostics;
  /// Per method, per target, per kept replicate.
  std::vector<std::vector<std::vector<ReplicateOutcome>>> outcomes;
  std::size_t prior_q_discarded = 0;
};

/// Replicate r uses RngHandle(seed).child(r + 1); its dataset draws from
/// child(0) of that and method k of {tab, bb, bel, gb} from child(k + 1).
/// Replicates run in parallel; results are assembled in replicate order.
/// With out_dir set, writes metrics.csv and diagnostics.csv there, plus
/// data/ and raw/ files when requested.
ExperimentResult run_experiment(const ExperimentConfig& config);

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> read_metrics_csv(std::istream& in);
std::string render_markdown(const std::vector<MetricsRow>& rows);

void write_dataset_csv(std::ostream& out, const Dataset& data);
Dataset read_dataset_csv(std::istream& in);

}  // namespace tabayes

#endif  // TABAYES_EXPERIMENT_HPP
