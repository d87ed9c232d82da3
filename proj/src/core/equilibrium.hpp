#pragma once

#include <optional>
#include <vector>

#include "core/model.hpp"

namespace berknash {

enum class EquilibriumKind {
  Nash,
  BneConstant,
  BneGlobalMeanField,
  BneLocalMeanField,
  BneMixed,
  Induced,
};

const char* equilibrium_kind_token(EquilibriumKind kind);

struct EquilibriumResult {
  EquilibriumKind kind = EquilibriumKind::Nash;
  Vector x;
  std::optional<Vector> theta;  // per-agent conjecture parameter at equilibrium
  std::optional<Vector> gamma;  // row sums gamma_i (global mean-field only)
  double residual = 0.0;        // |(R + W) x - b|_2 for the implied linear system
};

// Aggregate cost J(x) = 1/2 x'Rx + x'Gx - b'x.
double aggregate_cost(const NetworkGame& game, const Vector& x);

// Nash equilibrium of the true game: (R + G) x = b.
EquilibriumResult solve_nash(const NetworkGame& game);

// Berk-Nash equilibrium under the given conjecture class. Attention is
// required whenever some agent uses the local mean-field conjecture.
//  - constant: coincides with Nash; theta_i = sum_j g_ij x_j.
//  - global mean-field: theta_i = gamma_i = sum_j g_ij and
//      xbar = (n^-1 sum b_i/r_i) / (1 + n^-1 sum gamma_i/r_i),
//      x_i = (b_i - gamma_i xbar) / r_i.
//  - local mean-field: (R + Gtilde) x = b with Gtilde from sparsify().
// Mixed per-agent profiles solve (R + W) x = b with W assembled row-wise.
EquilibriumResult solve_bne(const NetworkGame& game,
                            const ConjectureClass& conjecture,
                            const AttentionStructure* att = nullptr);

// Least-squares conjecture parameter at a frozen action profile:
//   theta_i = (sum_j g_ij x_j + shift_i) / z_i,
// where z_i is the attention-set mean of x and shift is an optional signal
// offset (the designer's distortion). Throws DegenerateRegressor when
// |z_i| < 1e-12 * |x|_inf or x = 0, EmptyAttention for an empty subset.
Vector consistent_theta(const NetworkGame& game, const AttentionStructure& att,
                        const Vector& x, const Vector* signal_shift = nullptr);

struct VomReport {
  double vom = 0.0;               // (cost_bn - cost_ne) / cost_ne
  double cost_ne = 0.0;
  double cost_bn = 0.0;
  double cost_diff = 0.0;
  double action_deviation = 0.0;  // |x_bn - x_ne|_2
  double delta_g_norm = 0.0;      // |Gtilde - G|_2
  bool stable = false;            // rho(G) < r_min; bound constants valid only if set
  double k1 = 0.0;                // (r_min - rho(G))^-2
  double k4 = 0.0;                // r_min / (2 (|R| + |G|)^2)
  bool sign_caveat = false;       // cost_ne < 0, so negative vom means "worse"
  EquilibriumResult ne;
  EquilibriumResult bn;
};

// Relative equilibrium-cost gap caused by the local mean-field distortion.
// Throws ZeroBaselineCost when |J(x_ne)| < 1e-14.
VomReport value_of_misspecification(const NetworkGame& game,
                                    const AttentionStructure& att);

struct BoundCheckRow {
  double scale = 0.0;  // attenuation t applied to Gtilde - G
  double vom = 0.0;
  double cost_bn = 0.0;
  double action_deviation = 0.0;
  double bound_rhs = 0.0;  // k1 * |b|_2 * t * |Gtilde - G|_2
  bool bound_ok = false;
  std::optional<double> ratio;  // |vom| / (t |Gtilde - G|_2); absent at t = 0
};

struct BoundCheckReport {
  double cost_ne = 0.0;
  double identity_gap = 0.0;  // |J(x_ne) + 1/2 x_ne' R x_ne|
  bool identity_ok = false;   // gap <= 1e-10 |J(x_ne)|
  double k1 = 0.0;
  double delta_g_norm = 0.0;
  std::vector<BoundCheckRow> rows;  // ascending in scale
  bool ratio_bounded = false;  // all ratios within 3x of the smallest-t ratio
};

// Attenuated-distortion sweep: for each t solves (R + G + t(Gtilde - G)) x = b
// and checks the cost identity, the action-deviation bound and the
// near-linearity of the cost gap. Requires rho(G) < r_min and nonnegative,
// finite scales. Throws ZeroBaselineCost when |J(x_ne)| < 1e-14.
BoundCheckReport vom_bound_check(const NetworkGame& game,
                                 const AttentionStructure& att,
                                 const std::vector<double>& scales);

}  // namespace berknash
