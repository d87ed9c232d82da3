#include "core/timescale.hpp"

#include <cmath>
#include <fstream>
#include <utility>

#include "core/errors.hpp"
#include "core/format.hpp"
#include "core/numerics.hpp"

namespace berknash {

namespace {

void check_two_scale(const TwoScaleConfig& config) {
  check_schedule(config.fast);
  if (!std::isfinite(config.b_hat) || config.b_hat < 0.0) {
    fail(ErrorKind::InvalidParams, "slow scale b_hat must be >= 0");
  }
  if (!std::isfinite(config.k1) || config.k1 < 1.0) {
    fail(ErrorKind::InvalidParams, "slow schedule needs k1 >= 1");
  }
  if (config.inner_steps_per_outer < 1) {
    fail(ErrorKind::InvalidParams, "inner_steps_per_outer must be >= 1");
  }
  if (config.total_steps < 1) {
    fail(ErrorKind::InvalidParams, "total_steps must be >= 1");
  }
  // beta_k < alpha_k for every k >= 1 reduces to the linear form
  // h(k) = a (k + k1) - b_hat (k + k0) staying positive, which only needs
  // the slope and the k = 1 endpoint.
  const double slope = config.fast.a - config.b_hat;
  const double h1 = config.fast.a * (1.0 + config.k1) -
                    config.b_hat * (1.0 + config.fast.k0);
  if (slope < 0.0 || h1 <= 0.0) {
    fail(ErrorKind::InvalidParams,
         "slow schedule must stay strictly below the fast schedule");
  }
}

// Radial pull-back onto the budget ellipsoid; exact projection when the
// weights are uniform, always feasible otherwise.
void feasibility_map(Vector& delta, const Vector& a_weights, double budget) {
  const double used = delta.dot(a_weights.cwiseProduct(delta));
  if (used > budget) delta *= std::sqrt(budget / used);
}

bool record_step(long k, long total) {
  if (k <= 1000) return true;
  if (k % 10 == 0) return true;
  return k == total;
}

}  // namespace

TwoScaleResult run_two_timescale(const NetworkGame& game,
                                 const AttentionStructure& att,
                                 const TwoScaleConfig& config) {
  check_two_scale(config);
  if (!std::isfinite(config.gamma_budget) || config.gamma_budget <= 0.0) {
    fail(ErrorKind::InfeasibleBudget, "distortion budget must be positive");
  }
  const int n = game.n();
  Vector a_weights = config.a_weights;
  if (a_weights.size() == 0) a_weights = Vector::Ones(n);

  const QcqpData qcqp = assemble_qcqp(game, att, a_weights, config.gamma_budget);
  const DistortionPlan plan = solve_arbitrage(qcqp);

  ConjectureClass conjecture;
  conjecture.kind = ConjectureKind::LocalMeanField;
  const ValidationReport stability = validate(game, &att);

  Vector delta = Vector::Zero(n);
  if (config.delta0.has_value()) {
    if (config.delta0->size() != n || !config.delta0->allFinite()) {
      fail(ErrorKind::InvalidParams, "delta0 has wrong length");
    }
    delta = *config.delta0;
    feasibility_map(delta, a_weights, config.gamma_budget);
  }

  TwoScaleResult out;
  out.trace.n = n;
  TwoScaleReport& report = out.report;
  report.delta_star = plan.delta;
  report.budget_active = plan.active;
  report.lambda = plan.lambda;
  report.f_star = designer_objective(qcqp, plan.delta);
  report.x_star = qcqp.M * (game.b - plan.delta);
  report.stability_warning = stability.rho_r_inv_g_tilde.has_value() &&
                             *stability.rho_r_inv_g_tilde >= 1.0;

  LearningState state = initial_state(game, config.seed);
  const double bound = default_divergence_bound(game);

  Vector x_prev = state.x;
  Vector theta_prev = state.theta;
  while (state.k < config.total_steps) {
    const double alpha = config.fast.at(state.k);
    step_at(game, conjecture, &att, state, alpha, &delta, bound);
    const long k = state.k;

    const double dx = (state.x - x_prev).norm();
    const double dtheta = (state.theta - theta_prev).norm();
    x_prev = state.x;
    theta_prev = state.theta;

    double ddelta = 0.0;
    if (config.b_hat > 0.0 && k % config.inner_steps_per_outer == 0) {
      Vector next = delta - config.slow_at(k) * designer_gradient(qcqp, delta);
      feasibility_map(next, a_weights, config.gamma_budget);
      ddelta = (next - delta).norm();
      delta = std::move(next);
    }

    if (dx > report.eps) report.last_cross_x = k;
    if (dtheta > report.eps) report.last_cross_theta = k;
    if (ddelta > report.eps) report.last_cross_delta = k;

    if (record_step(k, config.total_steps)) {
      TwoScaleRow row;
      row.k = k;
      row.x = state.x;
      row.theta = state.theta;
      row.delta = delta;
      row.dx_norm = dx;
      row.dtheta_norm = dtheta;
      row.ddelta_norm = ddelta;
      out.trace.rows.push_back(std::move(row));
    }
  }

  report.x = state.x;
  report.theta = state.theta;
  report.delta = delta;
  report.f_terminal = designer_objective(qcqp, delta);
  report.dist_delta_star = (delta - plan.delta).norm();
  report.dist_x_star = (state.x - report.x_star).norm();
  report.dist_x_bn_final = (state.x - qcqp.M * (game.b - delta)).norm();
  Matrix full = game.G;
  full.diagonal() += game.r;
  report.dist_x_ne_final = (state.x - solve_linear(full, game.b - delta)).norm();
  report.steps = state.k;
  return out;
}

std::string diagnostics_csv(const TwoScaleTrace& trace) {
  std::string csv = "k,dx_norm,dtheta_norm,ddelta_norm\n";
  for (const TwoScaleRow& row : trace.rows) {
    csv += std::to_string(row.k);
    csv += ',';
    csv += fmt_double(row.dx_norm);
    csv += ',';
    csv += fmt_double(row.dtheta_norm);
    csv += ',';
    csv += fmt_double(row.ddelta_norm);
    csv += '\n';
  }
  return csv;
}

void emit_diagnostics(const TwoScaleTrace& trace, const std::string& path) {
  if (trace.rows.empty()) {
    fail(ErrorKind::InvalidParams, "diagnostics trace is empty");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot open " + path + " for writing");
  out << diagnostics_csv(trace);
  out.close();
  if (!out) fail(ErrorKind::IoError, "failed writing " + path);
}

}  // namespace berknash
