#include "aeig/estimation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aeig {

NigState nig_init(std::size_t n) {
  if (n == 0) throw std::invalid_argument("nig_init: region count must be at least 1");
  return NigState{std::vector<double>(n, 1.0), std::vector<double>(n, 0.0),
                  std::vector<double>(n, 1.0)};
}

void nig_update(NigState& state, NodeIndex region, double z) {
  if (region >= state.size()) {
    throw std::out_of_range("nig_update: region " + std::to_string(region) + " out of range");
  }
  if (!std::isfinite(z)) throw std::invalid_argument("nig_update: observation is not finite");
  const double nu = state.nu[region];
  const double mu = state.mu[region];
  const double residual = z - mu;
  state.b[region] += 0.5 * (nu / (nu + 1.0)) * residual * residual;
  state.mu[region] = (nu * mu + z) / (nu + 1.0);
  state.nu[region] = nu + 1.0;
}

std::vector<double> recover_variance(const NigState& state) {
  std::vector<double> out(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    const double nu = state.nu[i];
    out[i] = 2.0 * state.b[i] * (nu + 1.0) / (nu * nu);
  }
  return out;
}

BatchEstimates batch_estimates(std::span<const std::vector<double>> samples) {
  if (samples.empty()) throw std::invalid_argument("batch_estimates: no regions given");
  BatchEstimates out;
  out.mean.resize(samples.size(), 0.0);
  out.variance.resize(samples.size(), kPriorVariance);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& zs = samples[i];
    if (zs.empty()) continue;
    double sum = 0.0;
    for (double z : zs) sum += z;
    const double mean = sum / static_cast<double>(zs.size());
    out.mean[i] = mean;
    if (zs.size() < 2) continue;
    double ss = 0.0;
    for (double z : zs) ss += (z - mean) * (z - mean);
    out.variance[i] = ss / static_cast<double>(zs.size() - 1);
  }
  return out;
}

double observe(const GroundTruth& truth, NodeIndex region, Rng& rng) {
  if (region >= truth.size()) {
    throw std::out_of_range("observe: region " + std::to_string(region) + " out of range");
  }
  const double variance = truth.variance[region];
  if (variance <= 0.0) return truth.mean[region];
  std::normal_distribution<double> noise(0.0, std::sqrt(variance));
  return truth.mean[region] + noise(rng);
}

}  // namespace aeig
