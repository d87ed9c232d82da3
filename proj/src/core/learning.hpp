#pragma once

#include <optional>
#include <vector>

#include "core/equilibrium.hpp"
#include "core/model.hpp"
#include "core/rng.hpp"
#include "core/types.hpp"

namespace berknash {

// Diminishing step sizes alpha_k = a / (k + k0).
struct StepSchedule {
  double a = 1.0;
  double k0 = 10.0;

  double at(long k) const { return a / (static_cast<double>(k) + k0); }
};

// Throws InvalidParams unless a > 0 and k0 >= 1 (both finite).
void check_schedule(const StepSchedule& schedule);

struct LearningState {
  long k = 0;
  Vector x;
  Vector theta;
  Rng rng;
};

// x(0) = b / r (naive best response to a zero conjecture), theta(0) = 0.
LearningState initial_state(const NetworkGame& game, std::uint64_t seed);

// Per-agent regressor z_i at the current actions: Constant -> 1,
// GlobalMeanField -> mean of the other agents' actions, LocalMeanField ->
// mean over the attention set.
Vector regressors(const NetworkGame& game, const ConjectureClass& conjecture,
                  const AttentionStructure* att, const Vector& x);

double default_divergence_bound(const NetworkGame& game);

// One update with an explicit step size: theta moves first on the stale
// actions and regressors, then each action best-responds to the fresh theta.
// signal_shift, when given, is added to the observed signal agent by agent.
// Noise is drawn every step (sigma scales it), so the random stream does not
// depend on sigma. Throws Diverged when the new actions exceed the bound.
void step_at(const NetworkGame& game, const ConjectureClass& conjecture,
             const AttentionStructure* att, LearningState& state, double alpha,
             const Vector* signal_shift = nullptr,
             double divergence_bound = 0.0);

void step(const NetworkGame& game, const ConjectureClass& conjecture,
          const AttentionStructure* att, LearningState& state,
          const StepSchedule& schedule);

enum class Verdict { ConvergedToNe, ConvergedToBn, ConvergedElsewhere, NotConverged };

const char* verdict_token(Verdict verdict);

struct TraceRow {
  long k = 0;
  Vector x;
  Vector theta;
  double dx_norm = 0.0;
  double dtheta_norm = 0.0;
};

// Rows are decimated: every step through k = 1000, then every 10th, and the
// final step always. Norms are Euclidean per-step differences.
struct Trace {
  std::vector<TraceRow> rows;
  int n = 0;
};

struct RunReport {
  LearningState final_state;
  Trace trace;
  Verdict verdict = Verdict::NotConverged;
  long steps = 0;
  bool window_met = false;
  double dist_ne = 0.0;        // terminal max-norm distance to the Nash profile
  double dist_bn = 0.0;        // same, to the conjectured equilibrium
  double tol = 0.0;
  double threshold = 0.0;      // verdict threshold, 10 * tol
  double ne_residual = 0.0;    // terminal ||(R + G) x - b||
  double z_min = 0.0;          // smallest |z_i(k)| seen, excitation audit
  bool stability_warning = false;
  EquilibriumResult ne;
  EquilibriumResult bn;
};

// Iterates until the sliding window of the last `window` max-norm action
// changes fits under tol, or max_steps. The verdict compares the terminal
// actions against both closed-form candidates at threshold 10 * tol.
RunReport run(const NetworkGame& game, const ConjectureClass& conjecture,
              const AttentionStructure* att, const StepSchedule& schedule,
              std::uint64_t seed, long max_steps = 200000, double tol = 1e-6,
              int window = 100);

}  // namespace berknash
