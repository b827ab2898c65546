#include "aeig/chains.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <ostream>
#include <string>

namespace aeig {

TransitionMatrix::TransitionMatrix(Eigen::MatrixXd p) : p_(std::move(p)) {
  if (p_.rows() != p_.cols()) throw std::invalid_argument("transition matrix must be square");
  p_ = p_.unaryExpr([](double v) { return (v < 0.0 && v >= -1e-10) ? 0.0 : v; });
}

std::string_view to_string(PlannerKind kind) {
  switch (kind) {
    case PlannerKind::remc: return "remc";
    case PlannerKind::fmmc: return "fmmc";
    case PlannerKind::metropolis_hastings: return "metropolis_hastings";
  }
  return "remc";
}

PlannerKind parse_planner_kind(std::string_view text) {
  if (text == "remc") return PlannerKind::remc;
  if (text == "fmmc") return PlannerKind::fmmc;
  if (text == "metropolis_hastings" || text == "mh") return PlannerKind::metropolis_hastings;
  throw std::invalid_argument("unknown planner '" + std::string(text) +
                              "' (expected remc, fmmc or metropolis_hastings)");
}

TargetDistribution floor_target(const TargetDistribution& target) {
  if (std::all_of(target.values().begin(), target.values().end(),
                  [](double r) { return r >= kTargetFloor; })) {
    return target;
  }
  std::vector<double> rho(target.values().begin(), target.values().end());
  double total = 0.0;
  for (double& r : rho) {
    r = std::max(r, kTargetFloor);
    total += r;
  }
  for (double& r : rho) r /= total;
  return TargetDistribution(std::move(rho));
}

TransitionMatrix metropolis_hastings(const RegionGraph& graph, const TargetDistribution& target) {
  const std::size_t n = graph.size();
  if (target.size() != n) throw std::invalid_argument("metropolis_hastings: size mismatch");
  const TargetDistribution rho = floor_target(target);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n));
  if (n == 1) {
    p(0, 0) = 1.0;
    return TransitionMatrix(std::move(p));
  }
  for (NodeIndex j = 0; j < n; ++j) {
    const std::size_t dj = graph.degree_without_self(j);
    if (dj == 0) {
      throw ChainError("metropolis_hastings: region " + std::to_string(j) +
                       " has no neighbors other than itself");
    }
    double moved = 0.0;
    for (NodeIndex i : graph.neighbors(j)) {
      if (i == j || !graph.has_edge(i, j)) continue;
      const auto di = static_cast<double>(graph.degree_without_self(i));
      const double accept = std::min(1.0, (rho[i] * static_cast<double>(dj)) / (rho[j] * di));
      const double pij = accept / static_cast<double>(dj);
      p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = pij;
      moved += pij;
    }
    p(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = std::max(0.0, 1.0 - moved);
  }
  return TransitionMatrix(std::move(p));
}

namespace {

Eigen::VectorXd sqrt_target(const TargetDistribution& target) {
  Eigen::VectorXd q(static_cast<Eigen::Index>(target.size()));
  for (std::size_t i = 0; i < target.size(); ++i) q(static_cast<Eigen::Index>(i)) = std::sqrt(target[i]);
  return q;
}

Eigen::MatrixXd similarity_transform(const Eigen::MatrixXd& p, const Eigen::VectorXd& q) {
  // diag(q)^-1 P diag(q)
  return q.cwiseInverse().asDiagonal() * p * q.asDiagonal();
}

}  // namespace

double remc_objective(const TransitionMatrix& p, const TargetDistribution& target) {
  const Eigen::VectorXd q = sqrt_target(floor_target(target));
  const Eigen::MatrixXd pt = similarity_transform(p.matrix(), q);
  const Eigen::MatrixXd s = 0.5 * (pt + pt.transpose()) - 2.0 * q * q.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

double slem(const TransitionMatrix& p, const TargetDistribution& target, bool* from_symmetrized) {
  const Eigen::VectorXd q = sqrt_target(floor_target(target));
  const Eigen::MatrixXd pt = similarity_transform(p.matrix(), q);
  const bool symmetric = (pt - pt.transpose()).cwiseAbs().maxCoeff() <= 1e-8;
  if (from_symmetrized) *from_symmetrized = !symmetric;
  const Eigen::MatrixXd m = 0.5 * (pt + pt.transpose()) - q * q.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

std::size_t chain_period(const TransitionMatrix& p, double tol) {
  const std::size_t n = p.size();
  if (n == 0) return 0;
  auto edge = [&](std::size_t from, std::size_t to) { return p(to, from) > tol; };

  // Forward and backward reachability from node 0.
  for (int direction = 0; direction < 2; ++direction) {
    std::vector<bool> seen(n, false);
    std::deque<std::size_t> queue{0};
    seen[0] = true;
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t v = 0; v < n; ++v) {
        const bool linked = direction == 0 ? edge(u, v) : edge(v, u);
        if (linked && !seen[v]) {
          seen[v] = true;
          queue.push_back(v);
        }
      }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) return 0;
  }

  // gcd of level differences along every edge of the BFS layering.
  std::vector<long> level(n, -1);
  std::deque<std::size_t> queue{0};
  level[0] = 0;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v = 0; v < n; ++v) {
      if (edge(u, v) && level[v] < 0) {
        level[v] = level[u] + 1;
        queue.push_back(v);
      }
    }
  }
  long g = 0;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      if (edge(u, v)) g = std::gcd(g, std::labs(level[u] + 1 - level[v]));
    }
  }
  return static_cast<std::size_t>(g);
}

ChainDiagnostics validate_chain(const TransitionMatrix& p, const RegionGraph& graph,
                                const TargetDistribution& target) {
  const std::size_t n = p.size();
  if (graph.size() != n || target.size() != n) {
    throw std::invalid_argument("validate_chain: dimension mismatch");
  }
  ChainDiagnostics d;
  const Eigen::MatrixXd& m = p.matrix();
  d.column_sum_residual = (m.colwise().sum().array() - 1.0).abs().maxCoeff();
  d.min_entry = m.minCoeff();
  for (NodeIndex i = 0; i < n; ++i) {
    for (NodeIndex j = 0; j < n; ++j) {
      if (!graph.has_edge(j, i)) d.support_violation = std::max(d.support_violation, std::abs(p(i, j)));
    }
  }
  Eigen::Map<const Eigen::VectorXd> rho(target.values().data(), static_cast<Eigen::Index>(n));
  d.stationarity_residual = (m * rho - rho).cwiseAbs().maxCoeff();
  d.remc_objective = remc_objective(p, target);
  d.slem = slem(p, target, &d.slem_from_symmetrized);
  d.period = chain_period(p);
  d.irreducible = d.period != 0;
  d.aperiodic = d.period == 1;
  return d;
}

TargetDistribution stationary_distribution(const TransitionMatrix& p) {
  const std::size_t n = p.size();
  if (n == 0) throw ChainError("stationary_distribution: empty matrix");
  const std::size_t period = chain_period(p);
  if (period == 0) throw ChainError("stationary_distribution: chain is reducible");
  if (period > 1) {
    throw ChainError("stationary_distribution: chain is periodic with period " +
                     std::to_string(period));
  }
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::VectorXd rho = Eigen::VectorXd::Constant(ni, 1.0 / static_cast<double>(n));
  constexpr long kMaxIterations = 1'000'000;
  for (long it = 0; it < kMaxIterations; ++it) {
    Eigen::VectorXd next = p.matrix() * rho;
    next /= next.sum();
    const double change = (next - rho).cwiseAbs().maxCoeff();
    rho = std::move(next);
    if (change < 1e-12) {
      std::vector<double> out(rho.data(), rho.data() + n);
      for (double& r : out) r = std::max(r, 0.0);
      const double total = std::accumulate(out.begin(), out.end(), 0.0);
      for (double& r : out) r /= total;
      return TargetDistribution(std::move(out));
    }
  }
  throw ChainError("stationary_distribution: power iteration did not converge");
}

NodeIndex sample_next(const TransitionMatrix& p, NodeIndex current, Rng& rng) {
  const std::size_t n = p.size();
  if (current >= n) throw std::out_of_range("sample_next: region index out of range");
  const auto column = p.matrix().col(static_cast<Eigen::Index>(current));
  if (std::abs(column.sum() - 1.0) > 1e-8) {
    throw ChainError("sample_next: column " + std::to_string(current) + " is not normalized");
  }
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double cumulative = 0.0;
  NodeIndex last_positive = current;
  for (NodeIndex i = 0; i < n; ++i) {
    const double w = column(static_cast<Eigen::Index>(i));
    if (w <= 0.0) continue;
    last_positive = i;
    cumulative += w;
    if (u < cumulative) return i;
  }
  return last_positive;
}

void write_matrix(std::ostream& os, const TransitionMatrix& p) {
  const auto old_precision = os.precision(17);
  os << "# transition matrix, column-stochastic: entry (i, j) = P(next = i | current = j), n = "
     << p.size() << '\n';
  for (NodeIndex i = 0; i < p.size(); ++i) {
    for (NodeIndex j = 0; j < p.size(); ++j) {
      if (j) os << ' ';
      os << p(i, j);
    }
    os << '\n';
  }
  os.precision(old_precision);
}

void write_diagnostics(std::ostream& os, const ChainDiagnostics& d) {
  const auto old_precision = os.precision(12);
  os << "column_sum_residual " << d.column_sum_residual << '\n'
     << "min_entry " << d.min_entry << '\n'
     << "support_violation " << d.support_violation << '\n'
     << "stationarity_residual " << d.stationarity_residual << '\n'
     << "remc_objective " << d.remc_objective << '\n'
     << "slem " << d.slem << (d.slem_from_symmetrized ? " (symmetrized)" : "") << '\n'
     << "period " << d.period << '\n'
     << "ergodic " << (d.ergodic() ? "true" : "false") << '\n';
  os.precision(old_precision);
}

}  // namespace aeig
