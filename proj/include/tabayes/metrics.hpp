#ifndef TABAYES_METRICS_HPP
#define TABAYES_METRICS_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tabayes {

/// Per-replicate summary of one posterior for one target (joint or a margin).
struct ReplicateOutcome {
  bool covered = false;
  double size = 0.0;
  /// Posterior mean, one entry per target coordinate.
  std::vector<double> posterior_mean;
  /// Within-chain mean of ||theta - theta0||^2.
  double risk = 0.0;
};

struct MetricsRow {
  std::string method;
  std::string model;
  std::size_t n = 0;
  std::size_t replicates = 0;
  std::size_t excluded = 0;
  double cp = 0.0;
  double cp_se = 0.0;
  double size = 0.0;
  double size_se = 0.0;
  /// Norm of the mean over replicates of (posterior mean - theta0).
  double abs_bias = 0.0;
  double bias_se = 0.0;
  double risk = 0.0;
  double risk_se = 0.0;
};

/// Summarizes one posterior's draws (row-major, theta0.size() per draw).
ReplicateOutcome summarize_replicate(std::span<const double> draws, std::span<const double> theta0, bool covered,
                                     double size);

/// Aggregates replicate outcomes. Coverage SE is binomial; the others are
/// sample standard deviations over replicates divided by sqrt(R).
MetricsRow compute_metrics(const std::vector<ReplicateOutcome>& outcomes, std::span<const double> theta0);

/// Metrics CSV header line (no newline).
std::string metrics_csv_header();
std::string to_csv_line(const MetricsRow& row);
MetricsRow parse_metrics_csv_line(const std::string& line);

}  // namespace tabayes

#endif  // TABAYES_METRICS_HPP
