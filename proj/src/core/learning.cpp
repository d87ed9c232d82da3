#include "core/learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "core/errors.hpp"

namespace berknash {

void check_schedule(const StepSchedule& schedule) {
  if (!std::isfinite(schedule.a) || schedule.a <= 0.0) {
    fail(ErrorKind::InvalidParams, "step schedule needs a > 0");
  }
  if (!std::isfinite(schedule.k0) || schedule.k0 < 1.0) {
    fail(ErrorKind::InvalidParams, "step schedule needs k0 >= 1");
  }
}

LearningState initial_state(const NetworkGame& game, std::uint64_t seed) {
  LearningState state;
  state.k = 0;
  state.x = game.b.cwiseQuotient(game.r);
  state.theta = Vector::Zero(game.n());
  state.rng = Rng(seed);
  return state;
}

Vector regressors(const NetworkGame& game, const ConjectureClass& conjecture,
                  const AttentionStructure* att, const Vector& x) {
  const int n = game.n();
  Vector z(n);
  for (int i = 0; i < n; ++i) {
    switch (conjecture.agent_kind(i)) {
      case ConjectureKind::Constant:
        z(i) = 1.0;
        break;
      case ConjectureKind::GlobalMeanField: {
        if (n < 2) {
          fail(ErrorKind::InvalidParams,
               "global mean-field regressor needs at least two agents");
        }
        z(i) = (x.sum() - x(i)) / static_cast<double>(n - 1);
        break;
      }
      case ConjectureKind::LocalMeanField: {
        if (att == nullptr) {
          fail(ErrorKind::InvalidParams,
               "local mean-field regressor requires an attention structure");
        }
        const auto& subset = att->subsets[static_cast<std::size_t>(i)];
        if (subset.empty()) {
          fail(ErrorKind::EmptyAttention,
               "agent " + std::to_string(i) + " has an empty attention set");
        }
        double sum = 0.0;
        for (int j : subset) sum += x(j);
        z(i) = sum / static_cast<double>(subset.size());
        break;
      }
    }
  }
  return z;
}

double default_divergence_bound(const NetworkGame& game) {
  return 1e6 * (1.0 + game.b.lpNorm<Eigen::Infinity>() / game.r.minCoeff());
}

void step_at(const NetworkGame& game, const ConjectureClass& conjecture,
             const AttentionStructure* att, LearningState& state, double alpha,
             const Vector* signal_shift, double divergence_bound) {
  const int n = game.n();
  if (divergence_bound <= 0.0) divergence_bound = default_divergence_bound(game);
  const Vector z = regressors(game, conjecture, att, state.x);
  Vector y = game.G * state.x;
  if (signal_shift != nullptr) y += *signal_shift;
  for (int i = 0; i < n; ++i) {
    y(i) += game.sigma(i) * state.rng.normal();
  }
  for (int i = 0; i < n; ++i) {
    state.theta(i) += alpha * (y(i) - state.theta(i) * z(i)) * z(i);
    state.x(i) = (game.b(i) - state.theta(i) * z(i)) / game.r(i);
  }
  state.k += 1;
  if (!state.x.allFinite() ||
      state.x.lpNorm<Eigen::Infinity>() > divergence_bound) {
    fail(ErrorKind::Diverged,
         "actions exceeded the blow-up bound at step " + std::to_string(state.k));
  }
}

void step(const NetworkGame& game, const ConjectureClass& conjecture,
          const AttentionStructure* att, LearningState& state,
          const StepSchedule& schedule) {
  step_at(game, conjecture, att, state, schedule.at(state.k));
}

const char* verdict_token(Verdict verdict) {
  switch (verdict) {
    case Verdict::ConvergedToNe: return "converged-to-NE";
    case Verdict::ConvergedToBn: return "converged-to-BN";
    case Verdict::ConvergedElsewhere: return "converged-elsewhere";
    case Verdict::NotConverged: return "not-converged";
  }
  return "unknown";
}

namespace {

bool record_step(long k, long max_steps) {
  if (k <= 1000) return true;
  if (k % 10 == 0) return true;
  return k == max_steps;
}

}  // namespace

RunReport run(const NetworkGame& game, const ConjectureClass& conjecture,
              const AttentionStructure* att, const StepSchedule& schedule,
              std::uint64_t seed, long max_steps, double tol, int window) {
  check_schedule(schedule);
  if (max_steps < 1) fail(ErrorKind::InvalidParams, "max_steps must be >= 1");
  if (!std::isfinite(tol) || tol <= 0.0) {
    fail(ErrorKind::InvalidParams, "tol must be positive");
  }
  if (window < 1) fail(ErrorKind::InvalidParams, "window must be >= 1");
  if (att != nullptr) check_attention(game, *att);

  RunReport report;
  report.tol = tol;
  report.threshold = 10.0 * tol;
  report.ne = solve_nash(game);
  report.bn = solve_bne(game, conjecture, att);

  const ValidationReport stability = validate(game, att);
  const bool conjecture_is_lmf =
      conjecture.homogeneous()
          ? conjecture.kind == ConjectureKind::LocalMeanField
          : std::any_of(conjecture.per_agent.begin(), conjecture.per_agent.end(),
                        [](ConjectureKind k) {
                          return k == ConjectureKind::LocalMeanField;
                        });
  if (conjecture_is_lmf && stability.rho_r_inv_g_tilde.has_value()) {
    report.stability_warning = *stability.rho_r_inv_g_tilde >= 1.0;
  } else {
    report.stability_warning = stability.rho_r_inv_g >= 1.0;
  }

  LearningState state = initial_state(game, seed);
  const double bound = default_divergence_bound(game);
  report.trace.n = game.n();
  report.z_min = std::numeric_limits<double>::infinity();

  // Full-resolution ring buffer of max-norm action changes for the window
  // criterion; the recorded trace may be decimated.
  std::vector<double> ring(static_cast<std::size_t>(window), 0.0);

  Vector x_prev = state.x;
  Vector theta_prev = state.theta;
  for (long k = 0; k < max_steps; ++k) {
    const Vector z = regressors(game, conjecture, att, state.x);
    report.z_min = std::min(report.z_min, z.cwiseAbs().minCoeff());
    step_at(game, conjecture, att, state, schedule.at(k), nullptr, bound);

    const double dx_inf = (state.x - x_prev).lpNorm<Eigen::Infinity>();
    ring[static_cast<std::size_t>(k % window)] = dx_inf;
    const bool met = state.k >= window &&
                     *std::max_element(ring.begin(), ring.end()) <= tol;
    if (met) report.window_met = true;

    if (met || record_step(state.k, max_steps)) {
      TraceRow row;
      row.k = state.k;
      row.x = state.x;
      row.theta = state.theta;
      row.dx_norm = (state.x - x_prev).norm();
      row.dtheta_norm = (state.theta - theta_prev).norm();
      report.trace.rows.push_back(std::move(row));
    }
    x_prev = state.x;
    theta_prev = state.theta;
    if (met) break;
  }

  report.steps = state.k;
  report.dist_ne = (state.x - report.ne.x).lpNorm<Eigen::Infinity>();
  report.dist_bn = (state.x - report.bn.x).lpNorm<Eigen::Infinity>();
  Vector ne_res = game.r.cwiseProduct(state.x) + game.G * state.x - game.b;
  report.ne_residual = ne_res.norm();

  const bool constant_conjecture =
      conjecture.homogeneous() && conjecture.kind == ConjectureKind::Constant;
  if (report.window_met) {
    if (!constant_conjecture && report.dist_bn <= report.threshold) {
      report.verdict = Verdict::ConvergedToBn;
    } else if (report.dist_ne <= report.threshold) {
      report.verdict = Verdict::ConvergedToNe;
    } else {
      report.verdict = Verdict::ConvergedElsewhere;
    }
  } else {
    report.verdict = Verdict::NotConverged;
  }
  report.final_state = std::move(state);
  return report;
}

}  // namespace berknash
