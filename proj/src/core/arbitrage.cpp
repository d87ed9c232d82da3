#include "core/arbitrage.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "core/errors.hpp"
#include "core/numerics.hpp"

namespace berknash {

namespace {

void check_qcqp(const QcqpData& q) {
  const auto n = q.b.size();
  if (q.Q.rows() != n || q.Q.cols() != n || q.c.size() != n ||
      q.a_weights.size() != n || q.M.rows() != n || q.M.cols() != n) {
    fail(ErrorKind::InvalidParams, "inconsistent problem dimensions");
  }
  if ((q.a_weights.array() <= 0.0).any() || !q.a_weights.allFinite()) {
    fail(ErrorKind::InvalidParams, "distortion-cost weights must be positive");
  }
}

double budget_used(const QcqpData& q, const Vector& delta) {
  return delta.dot(q.a_weights.cwiseProduct(delta));
}

// R + Gtilde as the designer sees it: every agent averages the interaction
// weights over its attended set. An agent attending to nobody perceives no
// interactions at all, so its row is zero rather than an error; this is the
// well-defined limit of the subset average and keeps fully decoupled games
// (G = 0, where only empty attended sets are valid) solvable.
Matrix perceived_system(const NetworkGame& game, const AttentionStructure& att) {
  check_attention(game, att);
  const int n = game.n();
  Matrix system = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const auto& subset = att.subsets[static_cast<std::size_t>(i)];
    if (subset.empty()) continue;
    const double scale = 1.0 / static_cast<double>(subset.size());
    for (int j : subset) system(i, j) = scale * game.G(i, j);
  }
  system.diagonal() += game.r;
  return system;
}

bool any_empty_subset(const AttentionStructure& att) {
  for (const auto& subset : att.subsets) {
    if (subset.empty()) return true;
  }
  return false;
}

}  // namespace

QcqpData assemble_qcqp(const NetworkGame& game, const AttentionStructure& att,
                       const Vector& a_weights, double gamma_budget) {
  const int n = game.n();
  if (a_weights.size() != n) {
    fail(ErrorKind::InvalidParams, "distortion-cost weights have wrong length");
  }
  if ((a_weights.array() <= 0.0).any() || !a_weights.allFinite()) {
    fail(ErrorKind::InvalidParams, "distortion-cost weights must be positive");
  }
  if (!std::isfinite(gamma_budget)) {
    fail(ErrorKind::InvalidParams, "distortion budget must be finite");
  }

  QcqpData q;
  q.M = invert(perceived_system(game, att));

  Matrix s = game.G + game.G.transpose();
  s.diagonal() += game.r;
  const Matrix half = 0.5 * q.M.transpose() * s * q.M;
  q.Q = 0.5 * (half + half.transpose());  // exact symmetry despite roundoff

  Eigen::SelfAdjointEigenSolver<Matrix> es(q.Q);
  if (es.info() != Eigen::Success) {
    fail(ErrorKind::NumericalFailure, "eigendecomposition of Q did not converge");
  }
  q.q_min_eig = es.eigenvalues().minCoeff();
  if (q.q_min_eig < -1e-10) {
    fail(ErrorKind::InvalidParams,
         "designer objective is not convex here (min eigenvalue " +
             std::to_string(q.q_min_eig) + ")");
  }

  q.c = q.M.transpose() * game.b;
  q.a_weights = a_weights;
  q.b = game.b;
  q.gamma_budget = gamma_budget;
  return q;
}

double designer_objective(const QcqpData& q, const Vector& delta) {
  if (delta.size() != q.b.size()) {
    fail(ErrorKind::InvalidParams, "distortion vector has wrong length");
  }
  return delta.dot(q.Q * delta) - 2.0 * q.b.dot(q.Q * delta) + q.c.dot(delta);
}

Vector designer_gradient(const QcqpData& q, const Vector& delta) {
  if (delta.size() != q.b.size()) {
    fail(ErrorKind::InvalidParams, "distortion vector has wrong length");
  }
  return 2.0 * (q.Q * (delta - q.b)) + q.c;
}

DistortionPlan solve_arbitrage(const QcqpData& q) {
  check_qcqp(q);
  if (!std::isfinite(q.gamma_budget) || q.gamma_budget <= 0.0) {
    fail(ErrorKind::InfeasibleBudget, "distortion budget must be positive");
  }
  const auto n = q.b.size();
  const double budget = q.gamma_budget;
  const Vector rhs = q.Q * q.b - 0.5 * q.c;

  DistortionPlan plan;
  plan.rho = Vector::Zero(n);
  plan.gamma_budget = budget;
  plan.a_weights = q.a_weights;

  // Unconstrained stationary point, minimum-norm when Q is singular.
  {
    Eigen::SelfAdjointEigenSolver<Matrix> es(q.Q);
    if (es.info() != Eigen::Success) {
      fail(ErrorKind::NumericalFailure,
           "eigendecomposition of Q did not converge");
    }
    const Vector& eigs = es.eigenvalues();
    const double cutoff = 1e-12 * std::max(eigs.maxCoeff(), 0.0);
    Vector inv_eigs = Vector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (eigs(i) > cutoff) inv_eigs(i) = 1.0 / eigs(i);
    }
    const Vector candidate =
        es.eigenvectors() *
        inv_eigs.cwiseProduct(es.eigenvectors().transpose() * rhs);
    const bool consistent =
        (q.Q * candidate - rhs).norm() <= 1e-10 * std::max(1.0, rhs.norm());
    if (consistent && budget_used(q, candidate) <= budget) {
      plan.delta = candidate;
      plan.lambda = 0.0;
      plan.active =
          std::abs(budget_used(q, candidate) - budget) <= 1e-8 * std::max(1.0, budget);
      return plan;
    }
  }

  // The budget binds: the multiplier is the unique root of
  // g(lambda) = d(lambda)'A d(lambda) - budget, which is strictly decreasing.
  const auto eval = [&](double lambda) {
    Matrix shifted = q.Q;
    shifted.diagonal() += lambda * q.a_weights;
    Vector delta = solve_linear(shifted, rhs);
    return std::make_pair(budget_used(q, delta) - budget, std::move(delta));
  };

  double hi = 1.0;
  double g_hi = eval(hi).first;
  int doublings = 0;
  while (g_hi >= 0.0) {
    if (++doublings > 200) {
      fail(ErrorKind::NumericalFailure,
           "could not bracket the budget multiplier in 200 doublings");
    }
    hi *= 2.0;
    g_hi = eval(hi).first;
  }

  double lo = 0.0;
  const double tol_g = 1e-10 * budget;
  double lambda = hi;
  Vector delta;
  double g = g_hi;
  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;  // interval collapsed to machine limit
    auto [g_mid, d_mid] = eval(mid);
    lambda = mid;
    delta = std::move(d_mid);
    g = g_mid;
    if (std::abs(g) <= tol_g) break;
    if (g > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (std::abs(g) > 1e-8 * std::max(1.0, budget)) {
    fail(ErrorKind::NumericalFailure,
         "budget-multiplier bisection stalled at residual " + std::to_string(g));
  }

  plan.delta = std::move(delta);
  plan.lambda = lambda;
  plan.active = true;
  return plan;
}

EquilibriumResult induced_equilibrium(const NetworkGame& game,
                                      const AttentionStructure& att,
                                      const DistortionPlan& plan) {
  const int n = game.n();
  if (plan.delta.size() != n || !plan.delta.allFinite()) {
    fail(ErrorKind::InvalidParams, "distortion vector has wrong length");
  }
  const Matrix system = perceived_system(game, att);
  EquilibriumResult result;
  result.kind = EquilibriumKind::Induced;
  const Vector shifted_b = game.b - plan.delta;
  result.x = solve_linear(system, shifted_b);
  result.residual = (system * result.x - shifted_b).norm();
  // The conjecture diagnostic divides by each attended-set average, so it is
  // only defined when every agent attends to someone; otherwise it is omitted.
  if (!any_empty_subset(att)) {
    result.theta = consistent_theta(game, att, result.x, &plan.delta);
  }
  return result;
}

KktReport kkt_verify(const QcqpData& q, const DistortionPlan& plan,
                     double tol) {
  check_qcqp(q);
  if (plan.delta.size() != q.b.size()) {
    fail(ErrorKind::InvalidParams, "distortion vector has wrong length");
  }
  KktReport report;
  const Vector grad = designer_gradient(q, plan.delta) +
                      2.0 * plan.lambda * q.a_weights.cwiseProduct(plan.delta);
  const double used = budget_used(q, plan.delta);
  report.stationarity = grad.norm();
  report.primal_slack = q.gamma_budget - used;
  report.dual_value = plan.lambda;
  report.complementarity = std::abs(plan.lambda * (used - q.gamma_budget));
  report.stationarity_ok = report.stationarity <= tol;
  report.primal_ok = report.primal_slack >= -tol;
  report.dual_ok = plan.lambda >= -tol;
  report.complementarity_ok = report.complementarity <= tol;
  report.ok = report.stationarity_ok && report.primal_ok && report.dual_ok &&
              report.complementarity_ok;
  return report;
}

}  // namespace berknash
