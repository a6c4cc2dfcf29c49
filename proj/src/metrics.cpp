#include "tabayes/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace tabayes {

namespace {

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

ReplicateOutcome summarize_replicate(std::span<const double> draws, std::span<const double> theta0, bool covered,
                                     double size) {
  const std::size_t d = theta0.size();
  if (d == 0 || draws.size() % d != 0 || draws.empty())
    throw std::invalid_argument("summarize_replicate: draws do not match theta0");
  const std::size_t m = draws.size() / d;
  ReplicateOutcome out;
  out.covered = covered;
  out.size = size;
  out.posterior_mean.assign(d, 0.0);
  double risk = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double v = draws[i * d + j];
      out.posterior_mean[j] += v;
      risk += (v - theta0[j]) * (v - theta0[j]);
    }
  for (auto& v : out.posterior_mean) v /= static_cast<double>(m);
  out.risk = risk / static_cast<double>(m);
  return out;
}

MetricsRow compute_metrics(const std::vector<ReplicateOutcome>& outcomes, std::span<const double> theta0) {
  if (outcomes.empty()) throw std::invalid_argument("compute_metrics: no replicates");
  const std::size_t d = theta0.size();
  const double r = static_cast<double>(outcomes.size());
  MetricsRow row;
  row.replicates = outcomes.size();

  std::vector<double> sizes, risks;
  std::vector<std::vector<double>> errors(d);
  std::size_t hits = 0;
  for (const auto& o : outcomes) {
    if (o.posterior_mean.size() != d) throw std::invalid_argument("compute_metrics: dimension mismatch");
    hits += o.covered ? 1 : 0;
    sizes.push_back(o.size);
    risks.push_back(o.risk);
    for (std::size_t j = 0; j < d; ++j) errors[j].push_back(o.posterior_mean[j] - theta0[j]);
  }
  row.cp = static_cast<double>(hits) / r;
  row.cp_se = std::sqrt(row.cp * (1.0 - row.cp) / r);
  row.size = mean_of(sizes);
  row.size_se = sample_sd(sizes) / std::sqrt(r);
  row.risk = mean_of(risks);
  row.risk_se = sample_sd(risks) / std::sqrt(r);

  // For one coordinate this is |mean error| with SE sd/sqrt(R); for two the
  // norm of the mean error vector with the delta-method SE.
  double norm2 = 0.0;
  std::vector<double> bias(d);
  for (std::size_t j = 0; j < d; ++j) {
    bias[j] = mean_of(errors[j]);
    norm2 += bias[j] * bias[j];
  }
  row.abs_bias = std::sqrt(norm2);
  if (d == 1) {
    row.bias_se = sample_sd(errors[0]) / std::sqrt(r);
  } else if (row.abs_bias > 0.0) {
    std::vector<double> projected(outcomes.size(), 0.0);
    for (std::size_t i = 0; i < outcomes.size(); ++i)
      for (std::size_t j = 0; j < d; ++j) projected[i] += errors[j][i] * bias[j] / row.abs_bias;
    row.bias_se = sample_sd(projected) / std::sqrt(r);
  }
  return row;
}

std::string metrics_csv_header() {
  return "method,model,n,replicates,excluded,cp,cp_se,size,size_se,abs_bias,bias_se,risk,risk_se";
}

std::string to_csv_line(const MetricsRow& row) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s,%s,%zu,%zu,%zu,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g", row.method.c_str(),
                row.model.c_str(), row.n, row.replicates, row.excluded, row.cp, row.cp_se, row.size, row.size_se,
                row.abs_bias, row.bias_se, row.risk, row.risk_se);
  return buf;
}

MetricsRow parse_metrics_csv_line(const std::string& line) {
  std::stringstream ss(line);
  std::string field;
  std::vector<std::string> f;
  while (std::getline(ss, field, ',')) f.push_back(field);
  if (f.size() != 13) throw std::runtime_error("metrics csv: expected 13 fields");
  MetricsRow row;
  row.method = f[0];
  row.model = f[1];
  row.n = std::stoul(f[2]);
  row.replicates = std::stoul(f[3]);
  row.excluded = std::stoul(f[4]);
  row.cp = std::stod(f[5]);
  row.cp_se = std::stod(f[6]);
  row.size = std::stod(f[7]);
  row.size_se = std::stod(f[8]);
  row.abs_bias = std::stod(f[9]);
  row.bias_se = std::stod(f[10]);
  row.risk = std::stod(f[11]);
  row.risk_se = std::stod(f[12]);
  return row;
}

}  // namespace tabayes
