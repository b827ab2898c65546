#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "aeig/chains.hpp"

namespace aeig {
namespace {

enum class Objective { remc, slem };

constexpr int kMaxRestarts = 3;
constexpr double kRestartShrink = 0.2;
constexpr int kFaceInterval = 5;

/// Chains supported on E, written as a vector x over the support entries.
/// Holds the Euclidean projector onto the affine constraints
///   column sums = 1, P rho = rho, [reversible] rho_j P_ij = rho_i P_ji
/// and restores P >= 0 with Dykstra's alternating projection.
class FeasibleSet {
 public:
  FeasibleSet(const RegionGraph& graph, const TargetDistribution& rho, bool reversible)
      : n_(graph.size()) {
    index_.assign(n_ * n_, -1);
    for (const Edge& e : graph.edges()) {
      index_[e.to * n_ + e.from] = static_cast<int>(entries_.size());
      entries_.push_back(e);
    }
    const auto m = static_cast<Eigen::Index>(entries_.size());
    std::vector<Eigen::RowVectorXd> rows;
    std::vector<double> rhs;
    for (NodeIndex j = 0; j < n_; ++j) {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(m);
      for (Eigen::Index e = 0; e < m; ++e) {
        if (entries_[static_cast<std::size_t>(e)].from == j) row(e) = 1.0;
      }
      rows.push_back(row);
      rhs.push_back(1.0);
    }
    for (NodeIndex i = 0; i < n_; ++i) {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(m);
      for (Eigen::Index e = 0; e < m; ++e) {
        const Edge& ed = entries_[static_cast<std::size_t>(e)];
        if (ed.to == i) row(e) = rho[ed.from];
      }
      rows.push_back(row / rho[i]);
      rhs.push_back(1.0);
    }
    if (reversible) {
      for (Eigen::Index e = 0; e < m; ++e) {
        const Edge& ed = entries_[static_cast<std::size_t>(e)];
        if (ed.from == ed.to) continue;
        const int back = index_[ed.from * n_ + ed.to];
        if (back >= 0 && ed.from > ed.to) continue;  // pair handled once
        Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(m);
        // rho_j P_ij - rho_i P_ji = 0, scaled to unit weight on the larger mass
        const double scale = std::max(rho[ed.from], rho[ed.to]);
        row(e) = rho[ed.from] / scale;
        if (back >= 0) row(back) = -rho[ed.to] / scale;
        rows.push_back(row);
        rhs.push_back(0.0);
      }
    }
    a_.resize(static_cast<Eigen::Index>(rows.size()), m);
    c_.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      a_.row(static_cast<Eigen::Index>(r)) = rows[r];
      c_(static_cast<Eigen::Index>(r)) = rhs[r];
    }
    const Eigen::MatrixXd pinv = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(a_).pseudoInverse();
    tangent_ = Eigen::MatrixXd::Identity(m, m) - pinv * a_;
    offset_ = pinv * c_;
  }

  Eigen::Index dim() const { return static_cast<Eigen::Index>(entries_.size()); }
  const std::vector<Edge>& entries() const { return entries_; }

  double residual(const Eigen::VectorXd& x) const { return (a_ * x - c_).cwiseAbs().maxCoeff(); }

  Eigen::VectorXd tangent(const Eigen::VectorXd& g) const { return tangent_ * g; }

  bool contains(const Eigen::VectorXd& x, double tol) const {
    return x.minCoeff() >= 0.0 && residual(x) < tol;
  }

  // Euclidean projection of z onto {A x = c} ∩ {x >= 0}.
  std::optional<Eigen::VectorXd> project(const Eigen::VectorXd& z, double tol,
                                         int max_iterations) const {
    Eigen::VectorXd x = z;
    Eigen::VectorXd w(z.size());
    Eigen::VectorXd correction = Eigen::VectorXd::Zero(z.size());
    for (int it = 0; it < max_iterations; ++it) {
      w.noalias() = tangent_ * x;
      w += offset_ + correction;
      x = w.cwiseMax(0.0);
      correction = w - x;
      if (residual(x) < tol) return x;
      // Dykstra is slow once entries sit at zero; try the exact projection
      // onto the face those zeros define.
      if (it % kFaceInterval == kFaceInterval - 1) {
        if (auto face = project_onto_face(z, x, tol)) return face;
      }
    }
    return std::nullopt;
  }

  // argmin |y - z| subject to A y = c and y_e = 0 wherever x_e = 0.
  // Returns y only if it is nonnegative and feasible.
  std::optional<Eigen::VectorXd> project_onto_face(const Eigen::VectorXd& z,
                                                   const Eigen::VectorXd& x, double tol) const {
    std::vector<Eigen::Index> free;
    for (Eigen::Index e = 0; e < x.size(); ++e) {
      if (x(e) > 0.0) free.push_back(e);
    }
    if (free.empty()) return std::nullopt;
    const auto k = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd a(a_.rows(), k);
    Eigen::VectorXd zf(k);
    for (Eigen::Index f = 0; f < k; ++f) {
      a.col(f) = a_.col(free[static_cast<std::size_t>(f)]);
      zf(f) = z(free[static_cast<std::size_t>(f)]);
    }
    // Minimum-norm correction: y_F = z_F - pinv(A_F) (A_F z_F - c).
    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
    const Eigen::VectorXd yf = zf - cod.solve(a * zf - c_);
    if (yf.minCoeff() < 0.0) return std::nullopt;
    Eigen::VectorXd y = Eigen::VectorXd::Zero(x.size());
    for (Eigen::Index f = 0; f < k; ++f) y(free[static_cast<std::size_t>(f)]) = yf(f);
    if (residual(y) < tol) return y;
    return std::nullopt;
  }

  Eigen::VectorXd pack(const TransitionMatrix& p) const {
    Eigen::VectorXd x(dim());
    for (Eigen::Index e = 0; e < dim(); ++e) {
      const Edge& ed = entries_[static_cast<std::size_t>(e)];
      x(e) = p(ed.to, ed.from);
    }
    return x;
  }

  Eigen::MatrixXd unpack(const Eigen::VectorXd& x) const {
    const auto n = static_cast<Eigen::Index>(n_);
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index e = 0; e < dim(); ++e) {
      const Edge& ed = entries_[static_cast<std::size_t>(e)];
      p(static_cast<Eigen::Index>(ed.to), static_cast<Eigen::Index>(ed.from)) = x(e);
    }
    return p;
  }

 private:
  std::size_t n_;
  std::vector<Edge> entries_;
  std::vector<int> index_;
  Eigen::MatrixXd a_;
  Eigen::VectorXd c_;
  Eigen::MatrixXd tangent_;
  Eigen::VectorXd offset_;
};

struct Evaluation {
  double value = 0.0;
  Eigen::VectorXd subgradient;
};

/// Value and subgradient (in support coordinates) of the spectral objective.
class SpectralObjective {
 public:
  SpectralObjective(Objective kind, const TargetDistribution& rho, const FeasibleSet& set)
      : kind_(kind), set_(set) {
    const auto n = static_cast<Eigen::Index>(rho.size());
    q_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) q_(i) = std::sqrt(rho[static_cast<std::size_t>(i)]);
    const double weight = kind == Objective::remc ? 2.0 : 1.0;
    rank_one_ = weight * q_ * q_.transpose();
  }

  Evaluation operator()(const Eigen::VectorXd& x) const {
    const Eigen::MatrixXd p = set_.unpack(x);
    const Eigen::MatrixXd pt = q_.cwiseInverse().asDiagonal() * p * q_.asDiagonal();
    const Eigen::MatrixXd s = 0.5 * (pt + pt.transpose()) - rank_one_;
    eig_.compute(s);
    const Eigen::Index n = s.rows();
    Eigen::VectorXd v = eig_.eigenvectors().col(n - 1);
    double value = eig_.eigenvalues()(n - 1);
    double sign = 1.0;
    if (kind_ == Objective::slem && -eig_.eigenvalues()(0) > value) {
      value = -eig_.eigenvalues()(0);
      v = eig_.eigenvectors().col(0);
      sign = -1.0;
    }
    // d/dP_ij of v^T P~ v is v_i v_j q_j / q_i.
    Evaluation out{value, Eigen::VectorXd(set_.dim())};
    for (Eigen::Index e = 0; e < set_.dim(); ++e) {
      const Edge& ed = set_.entries()[static_cast<std::size_t>(e)];
      const auto i = static_cast<Eigen::Index>(ed.to);
      const auto j = static_cast<Eigen::Index>(ed.from);
      out.subgradient(e) = sign * v(i) * v(j) * q_(j) / q_(i);
    }
    return out;
  }

 private:
  Objective kind_;
  const FeasibleSet& set_;
  Eigen::VectorXd q_;
  Eigen::MatrixXd rank_one_;
  mutable Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_;
};

ChainResult solve(Objective kind, const RegionGraph& graph, const TargetDistribution& target,
                  const SolverOptions& options, const TransitionMatrix* warm_start) {
  const std::size_t n = graph.size();
  if (target.size() != n) throw std::invalid_argument("chain synthesis: size mismatch");
  const GraphReport report = validate(graph);
  if (!report.valid()) {
    throw ChainError("chain synthesis is infeasible: " +
                     (report.problems.empty() ? std::string("invalid graph") : report.problems.front()));
  }
  const TargetDistribution rho = floor_target(target);
  const TransitionMatrix mh = metropolis_hastings(graph, rho);
  if (n == 1) return ChainResult{mh, validate_chain(mh, graph, rho), 0};

  const FeasibleSet set(graph, rho, kind == Objective::slem);
  const SpectralObjective objective(kind, rho, set);
  const double tol = options.projection_tolerance;

  Eigen::VectorXd best = set.pack(mh);
  double best_value = objective(best).value;

  if (warm_start && warm_start->size() == n) {
    Eigen::VectorXd w = set.pack(*warm_start);
    std::optional<Eigen::VectorXd> start;
    if (set.contains(w, tol)) {
      start = std::move(w);
    } else {
      start = set.project(w, tol, options.max_projection_iterations);
    }
    if (start) {
      const double value = objective(*start).value;
      if (value <= best_value) {
        best = *start;
        best_value = value;
      }
    }
  }

  Eigen::VectorXd x = best;
  Evaluation eval = objective(x);
  double step_scale = options.initial_step;
  int since_improvement = 0;
  int restarts = 0;
  bool improved = false;
  int schedule = 0;  // iterations since the last restart; drives the step length
  int iteration = 0;
  for (; iteration < options.max_iterations; ++iteration, ++schedule) {
    if (since_improvement >= options.patience) {
      // Stalled. Restart from the best point with a shorter step, unless the
      // starting point was never improved on.
      if (!improved || restarts++ >= kMaxRestarts) break;
      x = best;
      eval = objective(x);
      step_scale *= kRestartShrink;
      schedule = 0;
      since_improvement = 0;
    }
    const Eigen::VectorXd direction = set.tangent(eval.subgradient);
    const double norm = direction.norm();
    if (norm < 1e-14) break;
    const double step = step_scale / std::sqrt(static_cast<double>(schedule + 1));
    auto next = set.project(x - (step / norm) * direction, tol, options.max_projection_iterations);
    if (!next) {
      step_scale *= 0.5;
      ++since_improvement;
      continue;
    }
    x = std::move(*next);
    eval = objective(x);
    const double value = eval.value;
    if (value < best_value - options.improvement_tolerance) {
      best = x;
      best_value = value;
      since_improvement = 0;
      improved = true;
    } else {
      ++since_improvement;
    }
  }

  TransitionMatrix out(set.unpack(best));
  ChainDiagnostics diagnostics = validate_chain(out, graph, rho);
  if (!diagnostics.feasible(1e-8)) {
    throw ChainError("chain synthesis: feasibility projection did not converge (stationarity residual " +
                     std::to_string(diagnostics.stationarity_residual) + ", column residual " +
                     std::to_string(diagnostics.column_sum_residual) + ")");
  }
  return ChainResult{std::move(out), diagnostics, iteration};
}

}  // namespace

ChainResult remc_solve(const RegionGraph& graph, const TargetDistribution& target,
                       const SolverOptions& options, const TransitionMatrix* warm_start) {
  return solve(Objective::remc, graph, target, options, warm_start);
}

ChainResult fmmc_solve(const RegionGraph& graph, const TargetDistribution& target,
                       const SolverOptions& options, const TransitionMatrix* warm_start) {
  return solve(Objective::slem, graph, target, options, warm_start);
}

ChainPlanner::ChainPlanner(RegionGraph graph, PlannerKind kind, SolverOptions options)
    : graph_(std::move(graph)), kind_(kind), options_(options) {}

const TransitionMatrix& ChainPlanner::plan(const TargetDistribution& target) {
  if (previous_ && previous_target_ && *previous_target_ == target) return *previous_;
  const TransitionMatrix* warm = (options_.warm_start && previous_) ? &*previous_ : nullptr;
  ChainResult result;
  switch (kind_) {
    case PlannerKind::remc: result = remc_solve(graph_, target, options_, warm); break;
    case PlannerKind::fmmc: result = fmmc_solve(graph_, target, options_, warm); break;
    case PlannerKind::metropolis_hastings: {
      TransitionMatrix p = metropolis_hastings(graph_, target);
      result = ChainResult{p, validate_chain(p, graph_, floor_target(target)), 0};
      break;
    }
  }
  if (!result.diagnostics.ergodic()) {
    ++fallbacks_;
    TransitionMatrix mh = metropolis_hastings(graph_, target);
    ChainDiagnostics d = validate_chain(mh, graph_, floor_target(target));
    if (!d.ergodic() && graph_.self_loops_allowed()) {
      // Lazy chain (I + P) / 2 keeps stationarity and support, and is aperiodic.
      const auto n = static_cast<Eigen::Index>(graph_.size());
      mh = TransitionMatrix(0.5 * (Eigen::MatrixXd::Identity(n, n) + result.matrix.matrix()));
      d = validate_chain(mh, graph_, floor_target(target));
    }
    if (!d.ergodic()) throw ChainError("no ergodic chain available for the requested target");
    result = ChainResult{std::move(mh), d, result.iterations};
  }
  previous_ = std::move(result.matrix);
  previous_target_ = target;
  last_diagnostics_ = result.diagnostics;
  return *previous_;
}

}  // namespace aeig
