#include "aeig/target.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace aeig {

TargetDistribution::TargetDistribution(std::vector<double> rho) : rho_(std::move(rho)) {
  if (rho_.empty()) throw std::invalid_argument("target distribution is empty");
  double total = 0.0;
  for (double r : rho_) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
      throw std::invalid_argument("target distribution has a negative or non-finite entry");
    }
    total += r;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("target distribution sums to " + std::to_string(total));
  }
}

bool TargetDistribution::strictly_positive() const {
  return std::all_of(rho_.begin(), rho_.end(), [](double r) { return r > 0.0; });
}

std::string_view to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::first_order: return "first_order";
    case ScheduleKind::tanh: return "tanh";
  }
  return "first_order";
}

ScheduleKind parse_schedule_kind(std::string_view text) {
  if (text == "first_order") return ScheduleKind::first_order;
  if (text == "tanh") return ScheduleKind::tanh;
  throw std::invalid_argument("unknown schedule kind '" + std::string(text) +
                              "' (expected first_order or tanh)");
}

double AnnealingSchedule::beta_at(std::size_t k) const {
  const double x = alpha * static_cast<double>(k);
  switch (kind) {
    case ScheduleKind::first_order: return -std::expm1(-x);
    case ScheduleKind::tanh: return std::tanh(x);
  }
  return 0.0;
}

namespace {

void check_variances(std::span<const double> variance) {
  if (variance.empty()) throw std::invalid_argument("variance vector is empty");
  for (double v : variance) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("variance estimates must be positive and finite");
    }
  }
}

// Normalized exp(logits) via log-sum-exp; exact renormalization keeps the
// mass within the 1e-12 budget.
TargetDistribution softmax(std::vector<double> logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& l : logits) {
    l = std::exp(l - top);
    total += l;
  }
  for (double& l : logits) l /= total;
  return TargetDistribution(std::move(logits));
}

}  // namespace

TargetDistribution gibbs_target(std::span<const double> variance, double beta) {
  check_variances(variance);
  if (!(beta >= 0.0)) throw std::invalid_argument("coldness must be nonnegative");
  if (beta == 0.0) return uniform_target(variance.size());
  std::vector<double> logits(variance.size());
  for (std::size_t i = 0; i < variance.size(); ++i) logits[i] = beta * std::log(variance[i]);
  return softmax(std::move(logits));
}

TargetDistribution gibbs_target_from_energy(std::span<const double> variance, double beta) {
  check_variances(variance);
  std::vector<double> logits(variance.size());
  for (std::size_t i = 0; i < variance.size(); ++i) {
    const double energy = -std::log(2.0 * std::numbers::pi * std::numbers::e * variance[i]);
    logits[i] = -beta * energy;
  }
  return softmax(std::move(logits));
}

TargetDistribution uniform_target(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_target: region count must be at least 1");
  return TargetDistribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

TargetDistribution direct_target(std::span<const double> variance) {
  return gibbs_target(variance, 1.0);
}

TargetDistribution optimal_target(std::span<const double> true_variance) {
  check_variances(true_variance);
  double total = 0.0;
  for (double v : true_variance) total += v;
  std::vector<double> rho(true_variance.begin(), true_variance.end());
  for (double& r : rho) r /= total;
  return TargetDistribution(std::move(rho));
}

double shannon_entropy(std::span<const double> p) {
  double h = 0.0;
  for (double x : p) {
    if (x > 0.0) h -= x * std::log(x);
  }
  return h;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("total_variation: size mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) d += std::abs(p[i] - q[i]);
  return 0.5 * d;
}

}  // namespace aeig
