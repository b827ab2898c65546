#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace aeig {

/// Probability vector over regions (the space average the swarm is steered to).
/// Construction checks nonnegativity and unit mass within 1e-12.
class TargetDistribution {
 public:
  TargetDistribution() = default;
  explicit TargetDistribution(std::vector<double> rho);

  std::size_t size() const { return rho_.size(); }
  double operator[](std::size_t i) const { return rho_[i]; }
  std::span<const double> values() const { return rho_; }
  const std::vector<double>& vector() const { return rho_; }

  bool strictly_positive() const;

  friend bool operator==(const TargetDistribution&, const TargetDistribution&) = default;

 private:
  std::vector<double> rho_;
};

enum class ScheduleKind { first_order, tanh };

std::string_view to_string(ScheduleKind kind);
ScheduleKind parse_schedule_kind(std::string_view text);

/// Coldness schedule. first_order: beta(k) = 1 - exp(-alpha k);
/// tanh: beta(k) = tanh(alpha k). Both start at 0 and approach 1.
struct AnnealingSchedule {
  double alpha = 0.025;
  ScheduleKind kind = ScheduleKind::first_order;

  double beta_at(std::size_t k) const;
};

// rho_i proportional to variance_i^beta, evaluated in log space.
TargetDistribution gibbs_target(std::span<const double> variance, double beta);

// Same measure written as exp(-beta E_i) with E_i = -ln(2 pi e variance_i).
// Kept as a second route for cross-checking gibbs_target.
TargetDistribution gibbs_target_from_energy(std::span<const double> variance, double beta);

TargetDistribution uniform_target(std::size_t n);
TargetDistribution direct_target(std::span<const double> variance);
TargetDistribution optimal_target(std::span<const double> true_variance);

double shannon_entropy(std::span<const double> p);
double total_variation(std::span<const double> p, std::span<const double> q);

}  // namespace aeig
