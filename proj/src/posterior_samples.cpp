#include "tabayes/posterior_samples.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace tabayes {

void ChainSettings::validate() const {
  if (length <= burn_in) throw std::invalid_argument("ChainSettings: length must exceed burn-in");
}

PosteriorSamples::PosteriorSamples(std::string method, std::size_t dim, std::uint64_t seed)
    : method_(std::move(method)), dim_(dim), seed_(seed) {
  if (dim_ != 1 && dim_ != 2) throw std::invalid_argument("PosteriorSamples: dimension must be 1 or 2");
}

void PosteriorSamples::reserve(std::size_t n) {
  draws_.reserve(n * dim_);
  accepted_.reserve(n);
}

void PosteriorSamples::push(std::span<const double> theta, bool accepted) {
  if (theta.size() != dim_) throw std::invalid_argument("PosteriorSamples: draw dimension mismatch");
  draws_.insert(draws_.end(), theta.begin(), theta.end());
  accepted_.push_back(accepted ? 1 : 0);
}

std::vector<double> PosteriorSamples::column(std::size_t j) const {
  if (j >= dim_) throw std::out_of_range("PosteriorSamples::column");
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = draws_[i * dim_ + j];
  return out;
}

double PosteriorSamples::mean(std::size_t j) const {
  if (j >= dim_) throw std::out_of_range("PosteriorSamples::mean");
  if (size() == 0) throw std::logic_error("PosteriorSamples::mean: no draws");
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) s += draws_[i * dim_ + j];
  return s / static_cast<double>(size());
}

void PosteriorSamples::write_csv(std::ostream& out) const {
  out << "# method=" << method_ << " seed=" << seed_ << " length=" << chain.length << " burn_in=" << chain.burn_in
      << " acceptance_rate=" << std::setprecision(6) << diagnostics_.acceptance_rate()
      << " functional_failures=" << diagnostics_.functional_failures << " restarts=" << diagnostics_.restarts
      << " failed=" << (diagnostics_.failed ? 1 : 0) << '\n';
  out << "draw_index";
  for (std::size_t j = 0; j < dim_; ++j) out << ",theta_" << (j + 1);
  out << ",accepted\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < size(); ++i) {
    out << i;
    for (std::size_t j = 0; j < dim_; ++j) out << ',' << draws_[i * dim_ + j];
    out << ',' << static_cast<int>(accepted_[i]) << '\n';
  }
}

PosteriorSamples PosteriorSamples::read_csv(std::istream& in) {
  std::string line;
  std::string method = "unknown";
  std::uint64_t seed = 0;
  ChainSettings chain{};
  bool failed = false;
  while (std::getline(in, line) && !line.empty() && line[0] == '#') {
    std::istringstream meta(line.substr(1));
    std::string token;
    while (meta >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = token.substr(0, eq);
      const std::string value = token.substr(eq + 1);
      if (key == "method") method = value;
      else if (key == "seed") seed = std::stoull(value);
      else if (key == "length") chain.length = std::stoull(value);
      else if (key == "burn_in") chain.burn_in = std::stoull(value);
      else if (key == "failed") failed = value == "1";
    }
  }
  if (line.rfind("draw_index", 0) != 0) throw std::runtime_error("PosteriorSamples::read_csv: missing header");
  std::size_t dim = 0;
  for (char c : line)
    if (c == ',') ++dim;
  dim -= 1;

  PosteriorSamples s(method, dim, seed);
  s.chain = chain;
  std::vector<double> theta(dim);
  std::size_t accepted = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    for (std::size_t j = 0; j < dim; ++j) {
      if (!std::getline(row, cell, ',')) throw std::runtime_error("PosteriorSamples::read_csv: short row");
      theta[j] = std::stod(cell);
    }
    if (!std::getline(row, cell, ',')) throw std::runtime_error("PosteriorSamples::read_csv: short row");
    const bool acc = cell == "1";
    accepted += acc ? 1 : 0;
    s.push(theta, acc);
  }
  s.diagnostics_.proposals = s.size();
  s.diagnostics_.accepted = accepted;
  s.diagnostics_.failed = failed;
  return s;
}

}  // namespace tabayes
