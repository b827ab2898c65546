#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aeig/graph.hpp"
#include "aeig/rng.hpp"

namespace aeig {

/// Per-region normal-inverse-gamma parameters (nu, mu, b).
///
/// nu starts at 1 and counts observations plus the one prior pseudo-sample,
/// mu is the running posterior mean, and b is the auxiliary scale used to
/// recover the noise variance.
struct NigState {
  std::vector<double> nu;
  std::vector<double> mu;
  std::vector<double> b;

  std::size_t size() const { return nu.size(); }
};

/// Oracle view of the field: true mean and true noise variance per region.
struct GroundTruth {
  std::vector<double> mean;
  std::vector<double> variance;

  std::size_t size() const { return mean.size(); }
};

// Variance recovered from the untouched prior: 2 * 1 * (1 + 1) / 1^2.
inline constexpr double kPriorVariance = 4.0;

NigState nig_init(std::size_t n);

// Conjugate update of one region with observation z. Applies, in order:
//   b  += 0.5 * nu / (nu + 1) * (z - mu)^2
//   mu  = (nu * mu + z) / (nu + 1)
//   nu += 1
void nig_update(NigState& state, NodeIndex region, double z);

// sigma2[i] = 2 b[i] (nu[i] + 1) / nu[i]^2
std::vector<double> recover_variance(const NigState& state);

struct BatchEstimates {
  std::vector<double> mean;
  std::vector<double> variance;
};

// Sample mean and Bessel-corrected sample variance per region. Regions with
// fewer than two samples report kPriorVariance; empty regions report mean 0.
BatchEstimates batch_estimates(std::span<const std::vector<double>> samples);

// z = x[region] + N(0, variance[region]).
double observe(const GroundTruth& truth, NodeIndex region, Rng& rng);

}  // namespace aeig
