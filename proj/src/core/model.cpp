#include "core/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/errors.hpp"
#include "core/numerics.hpp"
#include "core/rng.hpp"

namespace berknash {

NetworkGame make_game(Matrix G, Vector r, Vector b, Vector sigma) {
  const auto n = r.size();
  if (n == 0) fail(ErrorKind::InvalidParams, "game must have at least one agent");
  if (G.rows() != n || G.cols() != n) {
    fail(ErrorKind::InvalidParams,
         "G is " + std::to_string(G.rows()) + "x" + std::to_string(G.cols()) +
             ", expected " + std::to_string(n) + "x" + std::to_string(n));
  }
  if (b.size() != n) fail(ErrorKind::InvalidParams, "b has wrong length");
  if (sigma.size() != n) fail(ErrorKind::InvalidParams, "sigma has wrong length");
  if (!G.allFinite() || !r.allFinite() || !b.allFinite() || !sigma.allFinite()) {
    fail(ErrorKind::InvalidParams, "game parameters must be finite");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (G(i, i) != 0.0) {
      fail(ErrorKind::InvalidParams,
           "G has nonzero diagonal entry at agent " + std::to_string(i));
    }
    if (!(r(i) > 0.0)) {
      fail(ErrorKind::InvalidParams,
           "r must be positive, got " + std::to_string(r(i)) + " at agent " +
               std::to_string(i));
    }
    if (sigma(i) < 0.0) {
      fail(ErrorKind::InvalidParams,
           "sigma must be nonnegative, got " + std::to_string(sigma(i)) +
               " at agent " + std::to_string(i));
    }
  }
  return NetworkGame{std::move(G), std::move(r), std::move(b), std::move(sigma)};
}

void check_attention(const NetworkGame& game, const AttentionStructure& att) {
  const int n = game.n();
  if (static_cast<int>(att.subsets.size()) != n) {
    fail(ErrorKind::InvalidParams,
         "attention has " + std::to_string(att.subsets.size()) +
             " subsets, expected " + std::to_string(n));
  }
  for (int i = 0; i < n; ++i) {
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int j : att.subsets[static_cast<std::size_t>(i)]) {
      if (j < 0 || j >= n) {
        fail(ErrorKind::InvalidParams,
             "attention subset of agent " + std::to_string(i) +
                 " references agent " + std::to_string(j));
      }
      if (j == i) {
        fail(ErrorKind::InvalidParams,
             "attention subset of agent " + std::to_string(i) + " contains itself");
      }
      if (seen[static_cast<std::size_t>(j)]) {
        fail(ErrorKind::InvalidParams,
             "attention subset of agent " + std::to_string(i) +
                 " lists agent " + std::to_string(j) + " twice");
      }
      seen[static_cast<std::size_t>(j)] = true;
      if (game.G(i, j) == 0.0) {
        fail(ErrorKind::InvalidParams,
             "attention subset of agent " + std::to_string(i) +
                 " includes non-neighbor " + std::to_string(j));
      }
    }
  }
}

const char* conjecture_kind_token(ConjectureKind kind) {
  switch (kind) {
    case ConjectureKind::Constant: return "constant";
    case ConjectureKind::GlobalMeanField: return "gmf";
    case ConjectureKind::LocalMeanField: return "lmf";
  }
  return "unknown";
}

ConjectureKind conjecture_kind_from_token(const std::string& token) {
  if (token == "constant") return ConjectureKind::Constant;
  if (token == "gmf") return ConjectureKind::GlobalMeanField;
  if (token == "lmf") return ConjectureKind::LocalMeanField;
  fail(ErrorKind::ConfigError,
       "unknown conjecture kind '" + token + "' (expected constant|gmf|lmf)");
}

ValidationReport validate(const NetworkGame& game, const AttentionStructure* att) {
  ValidationReport report;
  report.r_min = game.r.minCoeff();
  report.rho_g = spectral_radius(game.G);
  const Matrix r_inv_g = game.r.cwiseInverse().asDiagonal() * game.G;
  report.rho_r_inv_g = spectral_radius(r_inv_g);
  report.stable = report.rho_g < report.r_min;
  if (att != nullptr) {
    const Matrix gt = sparsify(game, *att);
    report.rho_r_inv_g_tilde =
        spectral_radius(game.r.cwiseInverse().asDiagonal() * gt);
  }
  return report;
}

Matrix sparsify(const NetworkGame& game, const AttentionStructure& att,
                const ConjectureClass& conjecture) {
  check_attention(game, att);
  const int n = game.n();
  if (!conjecture.per_agent.empty() &&
      static_cast<int>(conjecture.per_agent.size()) != n) {
    fail(ErrorKind::InvalidParams, "per-agent conjecture list has wrong length");
  }
  Matrix gt = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (conjecture.agent_kind(i) != ConjectureKind::LocalMeanField) {
      gt.row(i) = game.G.row(i);
      continue;
    }
    const auto& subset = att.subsets[static_cast<std::size_t>(i)];
    if (subset.empty()) {
      fail(ErrorKind::EmptyAttention,
           "agent " + std::to_string(i) +
               " uses the local mean-field conjecture with an empty attention set");
    }
    const double scale = 1.0 / static_cast<double>(subset.size());
    for (int j : subset) gt(i, j) = scale * game.G(i, j);
  }
  return gt;
}

GeneratedScenario generate_scenario(int n, int avg_degree, double weight_coverage,
                                    std::uint64_t seed, double sigma,
                                    double sign_flip_prob) {
  if (n < 2) fail(ErrorKind::InvalidParams, "generator needs n >= 2");
  if (avg_degree <= 0 || avg_degree >= n) {
    fail(ErrorKind::InvalidParams,
         "avg_degree must satisfy 0 < avg_degree < n, got " +
             std::to_string(avg_degree));
  }
  if (!(weight_coverage > 0.0) || weight_coverage > 1.0) {
    fail(ErrorKind::InvalidParams,
         "weight_coverage must lie in (0, 1], got " + std::to_string(weight_coverage));
  }
  if (sigma < 0.0) fail(ErrorKind::InvalidParams, "sigma must be nonnegative");
  if (sign_flip_prob < 0.0 || sign_flip_prob > 1.0) {
    fail(ErrorKind::InvalidParams, "sign_flip_prob must lie in [0, 1]");
  }

  Rng rng(seed);
  Matrix G = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      double w = rng.uniform();
      if (sign_flip_prob > 0.0 && rng.uniform() < sign_flip_prob) w = -w;
      G(i, j) = w;
    }
  }
  Vector r = Vector::Ones(n);
  Vector b(n);
  for (int i = 0; i < n; ++i) b(i) = rng.uniform(0.25, 0.75);
  Vector sig = Vector::Constant(n, sigma);

  // Rescale so the raw spectral radius lands exactly on 0.8 * r_min.
  const double rho0 = spectral_radius(G);
  if (rho0 <= 0.0) fail(ErrorKind::NumericalFailure, "degenerate random draw, rho(G) = 0");
  G *= 0.8 * r.minCoeff() / rho0;

  // Greedy attention: the avg_degree largest magnitudes per row, ties broken
  // toward the lower index, stored ascending.
  AttentionStructure att;
  att.subsets.resize(static_cast<std::size_t>(n));
  Vector coverage(n);
  for (int i = 0; i < n; ++i) {
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(n - 1));
    for (int j = 0; j < n; ++j) {
      if (j != i && G(i, j) != 0.0) order.push_back(j);
    }
    std::sort(order.begin(), order.end(), [&](int ja, int jb) {
      const double wa = std::abs(G(i, ja));
      const double wb = std::abs(G(i, jb));
      if (wa != wb) return wa > wb;
      return ja < jb;
    });
    if (static_cast<int>(order.size()) > avg_degree) {
      order.resize(static_cast<std::size_t>(avg_degree));
    }
    std::sort(order.begin(), order.end());
    double kept = 0.0;
    for (int j : order) kept += std::abs(G(i, j));
    const double total = G.row(i).cwiseAbs().sum();
    coverage(i) = total > 0.0 ? kept / total : 0.0;
    att.subsets[static_cast<std::size_t>(i)] = std::move(order);
  }

  GeneratedScenario scenario{make_game(std::move(G), std::move(r), std::move(b), std::move(sig)),
                             std::move(att), std::move(coverage), weight_coverage};
  return scenario;
}

}  // namespace berknash
