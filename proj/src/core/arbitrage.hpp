#pragma once

#include "core/equilibrium.hpp"
#include "core/model.hpp"
#include "core/types.hpp"

namespace berknash {

// Quadratic program behind the designer's distortion choice:
// minimize f(d) = d'Qd - 2b'Qd + c'd subject to d'Ad <= budget, with
// Q = M'(R + G + G')M / 2, c = M'b, M = (R + Gt)^{-1}, A = diag(a_weights).
struct QcqpData {
  Matrix Q;
  Vector c;
  Vector a_weights;
  Matrix M;
  Vector b;
  double gamma_budget = 0.0;
  double q_min_eig = 0.0;
};

struct DistortionPlan {
  Vector delta;
  Vector rho;             // distortion noise scales, identically zero at the optimum
  double lambda = 0.0;    // budget multiplier
  bool active = false;    // budget constraint tight?
  double gamma_budget = 0.0;
  Vector a_weights;
};

struct KktReport {
  double stationarity = 0.0;        // ||2(Q + lambda A)d - 2Qb + c||
  double primal_slack = 0.0;        // budget - d'Ad
  double dual_value = 0.0;          // lambda
  double complementarity = 0.0;     // |lambda (d'Ad - budget)|
  bool stationarity_ok = false;
  bool primal_ok = false;
  bool dual_ok = false;
  bool complementarity_ok = false;
  bool ok = false;
};

// Throws SingularMatrix when R + Gt is singular, InvalidParams when the
// assembled Q is indefinite beyond roundoff or a_weights are not positive.
QcqpData assemble_qcqp(const NetworkGame& game, const AttentionStructure& att,
                       const Vector& a_weights, double gamma_budget);

double designer_objective(const QcqpData& q, const Vector& delta);

Vector designer_gradient(const QcqpData& q, const Vector& delta);

// Closed-form solve: the unconstrained stationary point when it fits the
// budget (minimum-norm when Q is singular), otherwise bisection on the
// multiplier of the tight budget constraint.
DistortionPlan solve_arbitrage(const QcqpData& q);

// Equilibrium reached by the agents when the designer shifts each signal by
// delta_i: x = M (b - delta), theta fitted against the shifted influence.
EquilibriumResult induced_equilibrium(const NetworkGame& game,
                                      const AttentionStructure& att,
                                      const DistortionPlan& plan);

KktReport kkt_verify(const QcqpData& q, const DistortionPlan& plan,
                     double tol = 1e-8);

}  // namespace berknash
