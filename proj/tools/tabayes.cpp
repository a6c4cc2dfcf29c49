// Command-line driver: simulation sweeps, single-dataset posteriors, reports.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "tabayes/config.hpp"
#include "tabayes/experiment.hpp"

namespace fs = std::filesystem;
using namespace tabayes;

namespace {

int simulate(const KeyValues& file_kv, KeyValues cli_kv) {
  KeyValues kv = file_kv;
  for (auto& [k, v] : cli_kv) kv[k] = v;
  const ExperimentConfig config = ExperimentConfig::from_key_values(kv);
  if (config.out_dir.empty()) throw std::invalid_argument("simulate: --out is required");
  const ExperimentResult result = run_experiment(config);
  std::cout << render_markdown(result.rows);
  return 0;
}

int posterior(const std::string& method, const std::string& data_path, const std::string& config_path,
              const std::string& out_path, std::uint64_t seed) {
  std::ifstream din(data_path);
  if (!din) throw std::runtime_error("cannot open data file " + data_path);
  const Dataset data = read_dataset_csv(din);

  KeyValues kv;
  if (!config_path.empty()) kv = read_key_values(config_path);
  if (!kv.count("experiment")) kv["experiment"] = data.dim() == 3 ? "mar-1" : "meanvar";
  ExperimentConfig config = ExperimentConfig::from_key_values(kv);
  config.n = data.size();
  config.methods = {method};
  config.validate();
  if (config.is_mar() != (data.dim() == 3)) throw std::invalid_argument("posterior: data do not match the experiment");

  const RngHandle master(seed);
  std::optional<PriorQ> q;
  if (method == "tab") {
    RngHandle qrng = master.child(0);
    q = estimate_prior_q(make_ta_spec(config), qrng);
  }
  RngHandle rng = master.child(1);
  const PosteriorSamples ps = run_method(config, method, data, q ? &q->density : nullptr, rng);

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open output file " + out_path);
  ps.write_csv(out);
  std::cerr << "method=" << method << " draws=" << ps.size() << " acceptance_rate=" << ps.diagnostics().acceptance_rate()
            << (ps.diagnostics().failed ? " FAILED" : "") << '\n';
  return ps.diagnostics().failed ? 2 : 0;
}

int report(const std::string& in, const std::string& format) {
  fs::path p(in);
  if (fs::is_directory(p)) p /= "metrics.csv";
  std::ifstream f(p);
  if (!f) throw std::runtime_error("cannot open " + p.string());
  const auto rows = read_metrics_csv(f);
  if (format == "markdown") std::cout << render_markdown(rows);
  else write_metrics_csv(std::cout, rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"theta-augmented Bayesian inference and competing posteriors"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "run a replicated simulation study");
  std::string experiment, methods, out_dir, config_path;
  std::size_t n = 0, replicates = 0, chain_length = 0, burn_in = 0, threads = 0, prior_draws = 0;
  std::uint64_t seed = 1;
  bool write_raw = false, write_datasets = false;
  sim->add_option("--experiment", experiment, "meanvar, mar-1, mar-2, mar-3 or mar-4");
  sim->add_option("--n", n, "sample size");
  sim->add_option("--replicates", replicates, "number of datasets");
  sim->add_option("--methods", methods, "comma-separated subset of tab,bb,bel,gb");
  sim->add_option("--chain-length", chain_length, "Markov chain length (bb: draws = length - burn-in)");
  sim->add_option("--burn-in", burn_in, "discarded initial steps");
  sim->add_option("--prior-draws", prior_draws, "proposal prior draws for the q estimate");
  sim->add_option("--threads", threads, "worker threads (0: all cores)");
  sim->add_option("--seed", seed, "master seed");
  sim->add_option("--out", out_dir, "output directory");
  sim->add_option("--config", config_path, "key = value config file; flags override it");
  sim->add_flag("--write-raw", write_raw, "write every posterior sample file");
  sim->add_flag("--write-datasets", write_datasets, "write every generated dataset");

  auto* post = app.add_subcommand("posterior", "posterior draws for one dataset");
  std::string method, data_path, post_config, post_out;
  std::uint64_t post_seed = 1;
  post->add_option("--method", method, "tab, bb, bel or gb")->required();
  post->add_option("--data", data_path, "dataset csv (header x or x,c,cy)")->required()->check(CLI::ExistingFile);
  post->add_option("--config", post_config, "key = value config file")->check(CLI::ExistingFile);
  post->add_option("--out", post_out, "output csv")->required();
  post->add_option("--seed", post_seed, "seed");

  auto* rep = app.add_subcommand("report", "print a metrics table");
  std::string report_in, format = "markdown";
  rep->add_option("--in", report_in, "output directory or metrics.csv")->required();
  rep->add_option("--format", format, "csv or markdown")->check(CLI::IsMember({"csv", "markdown"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      KeyValues file_kv;
      if (!config_path.empty()) file_kv = read_key_values(config_path);
      KeyValues cli;
      if (!experiment.empty()) cli["experiment"] = experiment;
      if (!methods.empty()) cli["methods"] = methods;
      if (sim->count("--n")) cli["n"] = std::to_string(n);
      if (sim->count("--replicates")) cli["replicates"] = std::to_string(replicates);
      if (sim->count("--chain-length")) cli["chain_length"] = std::to_string(chain_length);
      if (sim->count("--burn-in")) cli["burn_in"] = std::to_string(burn_in);
      if (sim->count("--prior-draws")) cli["prior_draws"] = std::to_string(prior_draws);
      if (sim->count("--threads")) cli["threads"] = std::to_string(threads);
      if (sim->count("--seed")) cli["seed"] = std::to_string(seed);
      if (!out_dir.empty()) cli["out"] = out_dir;
      if (write_raw) cli["write_raw"] = "true";
      if (write_datasets) cli["write_datasets"] = "true";
      return simulate(file_kv, cli);
    }
    if (post->parsed()) return posterior(method, data_path, post_config, post_out, post_seed);
    return report(report_in, format);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
