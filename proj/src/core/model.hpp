#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace berknash {

// Linear-quadratic network game. Agent i pays
//   J_i(x) = r_i/2 x_i^2 + x_i (sum_j g_ij x_j - b_i)
// and observes the aggregate neighbor influence through the noisy signal
//   y_i = sum_j g_ij x_j + eta_i,  eta_i ~ N(0, sigma_i^2).
struct NetworkGame {
  Matrix G;      // interaction weights, zero diagonal
  Vector r;      // own-cost curvatures, all positive
  Vector b;      // standalone marginal benefits
  Vector sigma;  // observation noise levels, all nonnegative

  int n() const { return static_cast<int>(r.size()); }
};

// Builds a game after checking shapes, the zero diagonal, positivity of r,
// nonnegativity of sigma and finiteness everywhere (InvalidParams otherwise).
// Stability is deliberately not checked here; see validate().
NetworkGame make_game(Matrix G, Vector r, Vector b, Vector sigma);

// Attention sets S_i: the neighbors agent i actually tracks, a subset of its
// true neighborhood V_i = { j : g_ij != 0 }, never containing i itself.
struct AttentionStructure {
  std::vector<std::vector<int>> subsets;
};

// Range/membership/duplicate checks against a game (InvalidParams on
// violation). Empty subsets are legal here; local mean-field consumers
// reject them at the point of use.
void check_attention(const NetworkGame& game, const AttentionStructure& att);

enum class ConjectureKind { Constant, GlobalMeanField, LocalMeanField };

const char* conjecture_kind_token(ConjectureKind kind);
ConjectureKind conjecture_kind_from_token(const std::string& token);

// Conjecture assignment: one kind for everyone, or one per agent.
struct ConjectureClass {
  ConjectureKind kind = ConjectureKind::LocalMeanField;
  std::vector<ConjectureKind> per_agent;  // empty means homogeneous

  bool homogeneous() const { return per_agent.empty(); }
  ConjectureKind agent_kind(int i) const {
    return per_agent.empty() ? kind : per_agent[static_cast<std::size_t>(i)];
  }
};

struct ValidationReport {
  double r_min = 0.0;
  double rho_g = 0.0;
  double rho_r_inv_g = 0.0;
  bool stable = false;  // rho(G) < r_min
  std::optional<double> rho_r_inv_g_tilde;  // present when attention is given
};

// Stability diagnostics. Never throws on an unstable game; instability is a
// flag, not an error.
ValidationReport validate(const NetworkGame& game,
                          const AttentionStructure* att = nullptr);

// Attention-averaged interaction matrix: for every agent with the local
// mean-field conjecture, gtilde_ij = g_ij / |S_i| for j in S_i and zero
// elsewhere; rows of agents with other conjectures are copied from G
// unchanged. Throws EmptyAttention when a local mean-field agent has an
// empty subset.
Matrix sparsify(const NetworkGame& game, const AttentionStructure& att,
                const ConjectureClass& conjecture = {});

struct GeneratedScenario {
  NetworkGame game;
  AttentionStructure attention;
  Vector coverage;  // achieved per-agent share sum_{S_i} |g_ij| / sum_j |g_ij|
  double coverage_target = 0.0;
};

// Random dense game plus greedy attention sets, deterministic in the seed.
// Off-diagonal magnitudes are Uniform(0,1), each sign flipped with
// probability sign_flip_prob, then G is rescaled so rho(G) = 0.8 * r_min
// (r_i = 1). Benefits are Uniform(0.25, 0.75). Each agent keeps its
// avg_degree largest-|g_ij| neighbors, ties resolved toward the lower index;
// weight_coverage is the documented target share, reported against the
// achieved one. Preconditions: 0 < avg_degree < n, 0 < weight_coverage <= 1.
GeneratedScenario generate_scenario(int n, int avg_degree,
                                    double weight_coverage, std::uint64_t seed,
                                    double sigma = 0.05,
                                    double sign_flip_prob = 0.0);

}  // namespace berknash
