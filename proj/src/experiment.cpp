#include "tabayes/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "tabayes/competitors.hpp"
#include "tabayes/data_gen.hpp"
#include "tabayes/hpd.hpp"

namespace tabayes {

namespace {

const std::vector<std::string> kMethods{"tab", "bb", "bel", "gb"};

std::size_t method_index(const std::string& m) {
  const auto it = std::find(kMethods.begin(), kMethods.end(), m);
  if (it == kMethods.end()) throw std::invalid_argument("unknown method '" + m + "'");
  return static_cast<std::size_t>(it - kMethods.begin());
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::size_t to_size(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  const unsigned long long x = std::stoull(v, &pos);
  if (pos != v.size() || v.find('-') != std::string::npos)
    throw std::invalid_argument("config: " + key + " must be a non-negative integer");
  return static_cast<std::size_t>(x);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  const double x = std::stod(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("config: " + key + " must be a number");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw std::invalid_argument("config: " + key + " must be true or false");
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  if (experiment == "meanvar") {
    c.dp.base = DiscretizedBase{0.0, 100.0, 1e-5};
  } else {
    c.mar_model();
    c.methods = {"tab"};
    c.n = 50;
    c.dp.base = MarProductBase{};
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_key_values(const KeyValues& kv) {
  const auto it = kv.find("experiment");
  ExperimentConfig c = defaults(it == kv.end() ? "meanvar" : it->second);
  c.apply(kv);
  return c;
}

void ExperimentConfig::apply(const KeyValues& kv) {
  for (const auto& [key, v] : kv) {
    if (key == "experiment") {
      if (v != experiment) throw std::invalid_argument("config: experiment cannot change after defaults are chosen");
    } else if (key == "methods") {
      methods = split_list(v);
    } else if (key == "n") {
      n = to_size(key, v);
    } else if (key == "replicates") {
      replicates = to_size(key, v);
    } else if (key == "chain_length") {
      chain.length = to_size(key, v);
    } else if (key == "burn_in") {
      chain.burn_in = to_size(key, v);
    } else if (key == "seed") {
      seed = to_size(key, v);
    } else if (key == "dp_concentration") {
      dp.concentration = to_double(key, v);
    } else if (key == "dp_truncation") {
      dp.truncation = to_double(key, v);
    } else if (key == "bin_width" || key == "base_mean" || key == "base_variance") {
      const double x = to_double(key, v);
      DiscretizedBase* b = std::holds_alternative<DiscretizedBase>(dp.base) ? &std::get<DiscretizedBase>(dp.base)
                                                                            : &std::get<MarProductBase>(dp.base).x;
      if (key == "bin_width") {
        b->bin_width = x;
        if (auto* m = std::get_if<MarProductBase>(&dp.base)) m->cy.bin_width = x;
      } else if (key == "base_mean") {
        b->mu = x;
      } else {
        b->sigma2 = x;
      }
    } else if (key == "prior_alpha") {
      nig.alpha = to_double(key, v);
    } else if (key == "prior_beta") {
      nig.beta = to_double(key, v);
    } else if (key == "prior_mu0") {
      nig.mu0 = to_double(key, v);
    } else if (key == "prior_kappa") {
      nig.kappa = to_double(key, v);
    } else if (key == "prior_mean") {
      prior_mean = to_double(key, v);
    } else if (key == "prior_variance") {
      prior_variance = to_double(key, v);
    } else if (key == "prior_draws") {
      prior_draws_for_q = to_size(key, v);
    } else if (key == "q_table_points") {
      q_table_points = to_size(key, v);
    } else if (key == "hpd_level") {
      hpd_level = to_double(key, v);
    } else if (key == "hpd_grid") {
      hpd_grid = to_size(key, v);
    } else if (key == "threads") {
      threads = to_size(key, v);
    } else if (key == "write_raw") {
      write_raw = to_bool(key, v);
    } else if (key == "write_datasets") {
      write_datasets = to_bool(key, v);
    } else if (key == "out") {
      out_dir = v;
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
}

int ExperimentConfig::mar_model() const {
  if (experiment.size() == 5 && experiment.rfind("mar-", 0) == 0 && experiment[4] >= '1' && experiment[4] <= '4')
    return experiment[4] - '0';
  throw std::invalid_argument("unknown experiment '" + experiment + "'");
}

void ExperimentConfig::validate() const {
  if (is_mar()) mar_model();
  if (replicates < 1) throw std::invalid_argument("config: replicates must be >= 1");
  if (n < 1) throw std::invalid_argument("config: n must be >= 1");
  if (!(hpd_level > 0.0 && hpd_level < 1.0)) throw std::invalid_argument("config: hpd_level must be in (0, 1)");
  if (methods.empty()) throw std::invalid_argument("config: no methods");
  for (const auto& m : methods) {
    method_index(m);
    if (is_mar() && m != "tab" && m != "bb")
      throw std::invalid_argument("config: method '" + m + "' applies to meanvar only");
  }
  if (!is_mar() && n < 3) throw std::invalid_argument("config: meanvar needs n >= 3");
  chain.validate();
  dp.validate();
  nig.validate();
  if (!(prior_variance > 0.0)) throw std::invalid_argument("config: prior_variance must be positive");
  if ((dp.dim() == 3) != is_mar()) throw std::invalid_argument("config: DP base does not match the experiment");
}

std::vector<double> ExperimentConfig::theta0() const {
  if (is_mar()) return {kMarTrueMean};
  return {kMeanvarTrueMean, kMeanvarTrueVariance};
}

std::vector<MetricTarget> metric_targets(const ExperimentConfig& config) {
  if (config.is_mar()) return {{config.experiment, {0}}};
  return {{"meanvar:joint", {0, 1}}, {"meanvar:mu", {0}}, {"meanvar:sigma2", {1}}};
}

TaModelSpec make_ta_spec(const ExperimentConfig& config) {
  TaModelSpec spec;
  spec.proposal = config.dp;
  spec.prior_draws_for_q = config.prior_draws_for_q;
  spec.q_options.table_points = config.q_table_points;
  if (config.is_mar()) {
    spec.functional = FunctionalKind::aipw_mean();
    spec.prior = SubjectivePrior::normal(config.prior_mean, config.prior_variance);
  } else {
    spec.functional = FunctionalKind::mean_var();
    spec.prior = SubjectivePrior::nig(config.nig);
  }
  spec.validate();
  return spec;
}

Dataset generate_dataset(const ExperimentConfig& config, RngHandle& rng) {
  return config.is_mar() ? gen_mar(config.mar_model(), config.n, rng) : gen_meanvar(config.n, rng);
}

PosteriorSamples run_method(const ExperimentConfig& config, const std::string& method, const Dataset& data,
                            const DensityModel* q_prior, RngHandle& rng) {
  PosteriorSamples out;
  switch (method_index(method)) {
    case 0: {
      if (q_prior == nullptr) throw std::invalid_argument("run_method: tab needs the prior density estimate");
      out = ta_posterior_mh(make_ta_spec(config), data, *q_prior, config.chain, rng);
      break;
    }
    case 1: {
      const FunctionalKind kind = config.is_mar() ? FunctionalKind::aipw_mean() : FunctionalKind::mean_var();
      out = bb_posterior(data, kind, config.chain.kept(), rng);
      out.chain = config.chain;
      break;
    }
    case 2: out = bel_posterior(data, config.nig, config.chain, rng); break;
    default: out = gb_posterior(data, config.nig, config.chain, rng); break;
  }
  return out;
}

namespace {

struct MethodOutcome {
  bool excluded = false;
  std::string reason;
  std::vector<ReplicateOutcome> per_target;
  ReplicateDiagnostics diag;
};

MethodOutcome evaluate_method(const ExperimentConfig& config, const std::vector<MetricTarget>& targets,
                              const std::string& method, const Dataset& data, const DensityModel* q_prior,
                              RngHandle rng, std::size_t replicate, std::ostream* raw) {
  MethodOutcome mo;
  mo.diag.replicate = replicate;
  mo.diag.method = method;
  const std::vector<double> theta0 = config.theta0();
  try {
    const PosteriorSamples ps = run_method(config, method, data, q_prior, rng);
    const auto& d = ps.diagnostics();
    mo.diag.acceptance_rate = d.acceptance_rate();
    mo.diag.functional_failures = d.functional_failures;
    mo.diag.restarts = d.restarts;
    if (raw != nullptr) ps.write_csv(*raw);
    if (d.failed || ps.size() == 0) throw std::runtime_error("sampler failed");
    for (const auto& t : targets) {
      std::vector<double> draws;
      draws.reserve(ps.size() * t.coords.size());
      for (std::size_t i = 0; i < ps.size(); ++i)
        for (std::size_t c : t.coords) draws.push_back(ps.draw(i)[c]);
      std::vector<double> t0;
      for (std::size_t c : t.coords) t0.push_back(theta0[c]);
      const HpdRegion region = t.coords.size() == 1 ? hpd_1d(draws, config.hpd_level)
                                                    : hpd_2d(draws, config.hpd_level, config.hpd_grid);
      mo.per_target.push_back(summarize_replicate(draws, t0, region.contains(t0), region.size()));
    }
  } catch (const std::exception& e) {
    mo.excluded = true;
    mo.reason = e.what();
    mo.per_target.clear();
  }
  mo.diag.excluded = mo.excluded;
  mo.diag.reason = mo.reason;
  return mo;
}

std::string csv_safe(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::vector<MetricTarget> targets = metric_targets(config);
  const RngHandle master(config.seed);

  ExperimentResult result;
  std::optional<PriorQ> q;
  if (std::find(config.methods.begin(), config.methods.end(), "tab") != config.methods.end()) {
    RngHandle qrng = master.child(0);
    q = estimate_prior_q(make_ta_spec(config), qrng);
    result.prior_q_discarded = q->discarded;
  }
  const DensityModel* q_prior = q ? &q->density : nullptr;

  namespace fs = std::filesystem;
  const bool to_disk = !config.out_dir.empty();
  if (to_disk) {
    fs::create_directories(config.out_dir);
    if (config.write_raw) fs::create_directories(fs::path(config.out_dir) / "raw");
    if (config.write_datasets) fs::create_directories(fs::path(config.out_dir) / "data");
  }

  const std::size_t nm = config.methods.size();
  std::vector<std::vector<MethodOutcome>> all(config.replicates, std::vector<MethodOutcome>(nm));
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;

  auto worker = [&]() {
    for (std::size_t r = next++; r < config.replicates; r = next++) {
      try {
        const RngHandle rep = master.child(r + 1);
        RngHandle data_rng = rep.child(0);
        const Dataset data = generate_dataset(config, data_rng);
        if (to_disk && config.write_datasets) {
          std::ofstream f(fs::path(config.out_dir) / "data" / ("rep" + std::to_string(r) + ".csv"));
          write_dataset_csv(f, data);
        }
        for (std::size_t k = 0; k < nm; ++k) {
          const std::string& m = config.methods[k];
          std::ofstream raw;
          if (to_disk && config.write_raw)
            raw.open(fs::path(config.out_dir) / "raw" / (m + "_rep" + std::to_string(r) + ".csv"));
          all[r][k] = evaluate_method(config, targets, m, data, q_prior, rep.child(method_index(m) + 1), r,
                                      raw.is_open() ? &raw : nullptr);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
      }
    }
  };

  std::size_t threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
  threads = std::min(threads, config.replicates);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (fatal) std::rethrow_exception(fatal);

  const std::vector<double> theta0 = config.theta0();
  result.outcomes.assign(nm, std::vector<std::vector<ReplicateOutcome>>(targets.size()));
  for (std::size_t k = 0; k < nm; ++k) {
    std::size_t excluded = 0;
    for (std::size_t r = 0; r < config.replicates; ++r) {
      const auto& mo = all[r][k];
      result.diagnostics.push_back(mo.diag);
      if (mo.excluded) {
        ++excluded;
        continue;
      }
      for (std::size_t t = 0; t < targets.size(); ++t) result.outcomes[k][t].push_back(mo.per_target[t]);
    }
    for (std::size_t t = 0; t < targets.size(); ++t) {
      MetricsRow row;
      std::vector<double> t0;
      for (std::size_t c : targets[t].coords) t0.push_back(theta0[c]);
      if (!result.outcomes[k][t].empty()) row = compute_metrics(result.outcomes[k][t], t0);
      row.method = config.methods[k];
      row.model = targets[t].label;
      row.n = config.n;
      row.excluded = excluded;
      if (result.outcomes[k][t].empty()) {
        row.cp = row.cp_se = row.size = row.size_se = row.abs_bias = row.bias_se = row.risk = row.risk_se = NAN;
      }
      result.rows.push_back(row);
    }
  }

  if (to_disk) {
    std::ofstream m(fs::path(config.out_dir) / "metrics.csv");
    write_metrics_csv(m, result.rows);
    std::ofstream d(fs::path(config.out_dir) / "diagnostics.csv");
    d << "replicate,method,acceptance_rate,functional_failures,restarts,excluded,reason\n";
    char buf[128];
    for (const auto& rd : result.diagnostics) {
      std::snprintf(buf, sizeof buf, "%.6f", rd.acceptance_rate);
      d << rd.replicate << ',' << rd.method << ',' << buf << ',' << rd.functional_failures << ',' << rd.restarts
        << ',' << (rd.excluded ? 1 : 0) << ',' << csv_safe(rd.reason) << '\n';
    }
  }
  return result;
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << metrics_csv_header() << '\n';
  for (const auto& r : rows) out << to_csv_line(r) << '\n';
}

std::vector<MetricsRow> read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != metrics_csv_header()) throw std::runtime_error("metrics csv: bad header");
  std::vector<MetricsRow> rows;
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(parse_metrics_csv_line(line));
  return rows;
}

std::string render_markdown(const std::vector<MetricsRow>& rows) {
  std::ostringstream out;
  out << "| method | model | n | replicates | excluded | CP | size | abs bias | risk |\n";
  out << "|---|---|---|---|---|---|---|---|---|\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf,
                  "| %s | %s | %zu | %zu | %zu | %.2f (%.2f) | %.3g (%.2g) | %.3g (%.2g) | %.3g (%.2g) |\n",
                  r.method.c_str(), r.model.c_str(), r.n, r.replicates, r.excluded, r.cp, r.cp_se, r.size, r.size_se,
                  r.abs_bias, r.bias_se, r.risk, r.risk_se);
    out << buf;
  }
  return out.str();
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  if (data.dim() == 1) out << "x\n";
  else if (data.dim() == 3) out << "x,c,cy\n";
  else throw std::invalid_argument("write_dataset_csv: unsupported dimension");
  char buf[64];
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto row = data.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", row[j]);
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("dataset csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::size_t dim = 0;
  if (line == "x") dim = 1;
  else if (line == "x,c,cy") dim = 3;
  else throw std::runtime_error("dataset csv: header must be 'x' or 'x,c,cy'");
  std::vector<double> values;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::size_t count = 0;
    double row[3] = {0, 0, 0};
    while (std::getline(ss, field, ',')) {
      if (count >= dim) throw std::runtime_error("dataset csv line " + std::to_string(lineno) + ": too many fields");
      row[count++] = std::stod(field);
    }
    if (count != dim) throw std::runtime_error("dataset csv line " + std::to_string(lineno) + ": too few fields");
    if (dim == 3) {
      if (row[1] != 0.0 && row[1] != 1.0)
        throw std::runtime_error("dataset csv line " + std::to_string(lineno) + ": c must be 0 or 1");
      if (row[1] == 0.0 && row[2] != 0.0)
        throw std::runtime_error("dataset csv line " + std::to_string(lineno) + ": cy must be 0 when c = 0");
    }
    values.insert(values.end(), row, row + dim);
  }
  return Dataset(dim, std::move(values));
}

}  // namespace tabayes
