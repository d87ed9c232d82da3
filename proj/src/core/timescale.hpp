#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/arbitrage.hpp"
#include "core/learning.hpp"
#include "core/model.hpp"
#include "core/types.hpp"

namespace berknash {

// Coupled simulation: agents learn against the distorted signal on the fast
// clock while the designer follows the projected objective gradient on the
// slow clock, beta_k = b_hat / (k + k1) on the shared step index.
struct TwoScaleConfig {
  StepSchedule fast;
  double b_hat = 0.05;
  double k1 = 10.0;
  double gamma_budget = 0.0;
  Vector a_weights;                  // empty means uniform weights
  long inner_steps_per_outer = 1;    // fast steps between designer updates
  long total_steps = 20000;          // fast-clock length of the run
  std::uint64_t seed = 0;
  std::optional<Vector> delta0;      // start distortion, default zero

  double slow_at(long k) const { return b_hat / (static_cast<double>(k) + k1); }
};

struct TwoScaleRow {
  long k = 0;
  Vector x;
  Vector theta;
  Vector delta;
  double dx_norm = 0.0;
  double dtheta_norm = 0.0;
  double ddelta_norm = 0.0;
};

// Same decimation as the learning trace; crossing indices below are tracked
// at full resolution regardless.
struct TwoScaleTrace {
  std::vector<TwoScaleRow> rows;
  int n = 0;
};

struct TwoScaleReport {
  Vector x;
  Vector theta;
  Vector delta;
  Vector delta_star;          // closed-form optimum of the budgeted objective
  Vector x_star;              // equilibrium induced by delta_star
  double f_terminal = 0.0;
  double f_star = 0.0;
  double dist_delta_star = 0.0;
  double dist_x_star = 0.0;
  double dist_x_bn_final = 0.0;   // terminal x vs (R + Gt) x = b - delta
  double dist_x_ne_final = 0.0;   // terminal x vs (R + G) x = b - delta
  long last_cross_x = -1;         // last k with ||dx|| > eps, -1 if never
  long last_cross_theta = -1;
  long last_cross_delta = -1;
  double eps = 1e-4;
  bool budget_active = false;
  double lambda = 0.0;
  bool stability_warning = false;
  long steps = 0;
};

struct TwoScaleResult {
  TwoScaleTrace trace;
  TwoScaleReport report;
};

// Throws InvalidParams when the slow schedule is not strictly below the fast
// one for every step index, InfeasibleBudget when gamma_budget <= 0, and
// propagates Diverged from the fast loop.
TwoScaleResult run_two_timescale(const NetworkGame& game,
                                 const AttentionStructure& att,
                                 const TwoScaleConfig& config);

// CSV with columns k, dx_norm, dtheta_norm, ddelta_norm.
std::string diagnostics_csv(const TwoScaleTrace& trace);

// Writes diagnostics_csv to path; throws IoError on failure.
void emit_diagnostics(const TwoScaleTrace& trace, const std::string& path);

}  // namespace berknash
