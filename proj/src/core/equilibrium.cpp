#include "core/equilibrium.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"
#include "core/numerics.hpp"

namespace berknash {

namespace {

void check_profile(const NetworkGame& game, const Vector& x, const char* op) {
  if (x.size() != game.n()) {
    fail(ErrorKind::InvalidParams,
         std::string(op) + ": profile has length " + std::to_string(x.size()) +
             ", expected " + std::to_string(game.n()));
  }
  if (!x.allFinite()) {
    fail(ErrorKind::InvalidParams, std::string(op) + ": non-finite profile");
  }
}

// Collapses a per-agent list that names a single kind everywhere.
ConjectureClass normalized(const ConjectureClass& conjecture, int n) {
  if (conjecture.per_agent.empty()) return conjecture;
  if (static_cast<int>(conjecture.per_agent.size()) != n) {
    fail(ErrorKind::InvalidParams, "per-agent conjecture list has wrong length");
  }
  const ConjectureKind first = conjecture.per_agent.front();
  const bool uniform = std::all_of(conjecture.per_agent.begin(),
                                   conjecture.per_agent.end(),
                                   [&](ConjectureKind k) { return k == first; });
  if (!uniform) return conjecture;
  ConjectureClass flat;
  flat.kind = first;
  return flat;
}

EquilibriumResult solve_system(const NetworkGame& game, const Matrix& W,
                               EquilibriumKind kind) {
  Matrix A = W;
  A.diagonal() += game.r;
  EquilibriumResult result;
  result.kind = kind;
  result.x = solve_linear(A, game.b);
  result.residual = (A * result.x - game.b).norm();
  return result;
}

EquilibriumResult solve_gmf(const NetworkGame& game) {
  const Vector gamma = game.G.rowwise().sum();
  const double mean_br = (game.b.array() / game.r.array()).mean();
  const double mean_gr = (gamma.array() / game.r.array()).mean();
  const double denom = 1.0 + mean_gr;
  if (std::abs(denom) <= 1e-12 * (1.0 + std::abs(mean_gr))) {
    fail(ErrorKind::SingularMatrix,
         "global mean-field aggregate response denominator vanishes");
  }
  const double xbar = mean_br / denom;
  EquilibriumResult result;
  result.kind = EquilibriumKind::BneGlobalMeanField;
  result.x = (game.b - gamma * xbar).cwiseQuotient(game.r);
  result.theta = gamma;
  result.gamma = gamma;
  // Residual against the equivalent linear system whose rows are gamma_i / n.
  const double xbar_actual = result.x.mean();
  result.residual =
      (game.r.cwiseProduct(result.x) + gamma * xbar_actual - game.b).norm();
  return result;
}

// Mixed per-agent profile. W arrives from sparsify() with local mean-field
// rows averaged and everything else copied from G; global mean-field rows
// are replaced by the constant row gamma_i / n so that agent responds to the
// population average.
EquilibriumResult solve_mixed(const NetworkGame& game, const ConjectureClass& conj,
                              const AttentionStructure& att, Matrix W) {
  const int n = game.n();
  const Vector gamma = game.G.rowwise().sum();
  for (int i = 0; i < n; ++i) {
    if (conj.agent_kind(i) == ConjectureKind::GlobalMeanField) {
      W.row(i).setConstant(gamma(i) / static_cast<double>(n));
    }
  }
  EquilibriumResult result = solve_system(game, W, EquilibriumKind::BneMixed);

  Vector theta(n);
  bool theta_ok = true;
  const Vector influence = game.G * result.x;
  const double x_inf = result.x.lpNorm<Eigen::Infinity>();
  for (int i = 0; i < n && theta_ok; ++i) {
    switch (conj.agent_kind(i)) {
      case ConjectureKind::Constant:
        theta(i) = influence(i);
        break;
      case ConjectureKind::GlobalMeanField:
        theta(i) = gamma(i);
        break;
      case ConjectureKind::LocalMeanField: {
        const auto& subset = att.subsets[static_cast<std::size_t>(i)];
        double z = 0.0;
        for (int j : subset) z += result.x(j);
        z /= static_cast<double>(subset.size());
        if (x_inf == 0.0 || std::abs(z) < 1e-12 * x_inf) {
          theta_ok = false;  // actions stand on their own without the diagnostic
        } else {
          theta(i) = influence(i) / z;
        }
        break;
      }
    }
  }
  if (theta_ok) result.theta = std::move(theta);
  return result;
}

}  // namespace

const char* equilibrium_kind_token(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::Nash: return "ne";
    case EquilibriumKind::BneConstant: return "bne-const";
    case EquilibriumKind::BneGlobalMeanField: return "bne-gmf";
    case EquilibriumKind::BneLocalMeanField: return "bne-lmf";
    case EquilibriumKind::BneMixed: return "bne-mixed";
    case EquilibriumKind::Induced: return "induced";
  }
  return "unknown";
}

double aggregate_cost(const NetworkGame& game, const Vector& x) {
  check_profile(game, x, "aggregate_cost");
  return 0.5 * x.dot(game.r.cwiseProduct(x)) + x.dot(game.G * x) - game.b.dot(x);
}

EquilibriumResult solve_nash(const NetworkGame& game) {
  return solve_system(game, game.G, EquilibriumKind::Nash);
}

EquilibriumResult solve_bne(const NetworkGame& game,
                            const ConjectureClass& conjecture,
                            const AttentionStructure* att) {
  const int n = game.n();
  const ConjectureClass conj = normalized(conjecture, n);

  const bool has_lmf_agent = [&] {
    if (conj.homogeneous()) return conj.kind == ConjectureKind::LocalMeanField;
    return std::any_of(
        conj.per_agent.begin(), conj.per_agent.end(),
        [](ConjectureKind k) { return k == ConjectureKind::LocalMeanField; });
  }();
  if (has_lmf_agent && att == nullptr) {
    fail(ErrorKind::InvalidParams,
         "local mean-field conjecture requires an attention structure");
  }

  if (conj.homogeneous()) {
    switch (conj.kind) {
      case ConjectureKind::Constant: {
        EquilibriumResult result =
            solve_system(game, game.G, EquilibriumKind::BneConstant);
        result.theta = game.G * result.x;
        return result;
      }
      case ConjectureKind::GlobalMeanField:
        return solve_gmf(game);
      case ConjectureKind::LocalMeanField: {
        const Matrix gt = sparsify(game, *att);
        EquilibriumResult result =
            solve_system(game, gt, EquilibriumKind::BneLocalMeanField);
        try {
          result.theta = consistent_theta(game, *att, result.x);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::DegenerateRegressor) throw;
          // Equilibrium actions stand on their own; the diagnostic
          // regression parameter is simply unavailable here.
        }
        return result;
      }
    }
  }

  AttentionStructure trivial;
  const AttentionStructure* att_use = att;
  if (att_use == nullptr) {
    trivial.subsets.resize(static_cast<std::size_t>(n));
    att_use = &trivial;
  }
  Matrix W = sparsify(game, *att_use, conj);
  return solve_mixed(game, conj, *att_use, std::move(W));
}

Vector consistent_theta(const NetworkGame& game, const AttentionStructure& att,
                        const Vector& x, const Vector* signal_shift) {
  check_attention(game, att);
  check_profile(game, x, "consistent_theta");
  if (signal_shift != nullptr) {
    check_profile(game, *signal_shift, "consistent_theta");
  }
  const int n = game.n();
  const double x_inf = x.lpNorm<Eigen::Infinity>();
  if (x_inf == 0.0) {
    fail(ErrorKind::DegenerateRegressor, "action profile is identically zero");
  }
  Vector influence = game.G * x;
  if (signal_shift != nullptr) influence += *signal_shift;
  Vector theta(n);
  for (int i = 0; i < n; ++i) {
    const auto& subset = att.subsets[static_cast<std::size_t>(i)];
    if (subset.empty()) {
      fail(ErrorKind::EmptyAttention,
           "agent " + std::to_string(i) + " has an empty attention set");
    }
    double z = 0.0;
    for (int j : subset) z += x(j);
    z /= static_cast<double>(subset.size());
    if (std::abs(z) < 1e-12 * x_inf) {
      fail(ErrorKind::DegenerateRegressor,
           "attention-set mean vanishes for agent " + std::to_string(i));
    }
    theta(i) = influence(i) / z;
  }
  return theta;
}

VomReport value_of_misspecification(const NetworkGame& game,
                                    const AttentionStructure& att) {
  VomReport report;
  report.ne = solve_nash(game);
  ConjectureClass lmf;
  lmf.kind = ConjectureKind::LocalMeanField;
  report.bn = solve_bne(game, lmf, &att);
  report.cost_ne = aggregate_cost(game, report.ne.x);
  report.cost_bn = aggregate_cost(game, report.bn.x);
  if (std::abs(report.cost_ne) < 1e-14) {
    fail(ErrorKind::ZeroBaselineCost,
         "baseline equilibrium cost is numerically zero");
  }
  report.cost_diff = report.cost_bn - report.cost_ne;
  report.vom = report.cost_diff / report.cost_ne;
  report.action_deviation = (report.bn.x - report.ne.x).norm();
  const Matrix gt = sparsify(game, att);
  report.delta_g_norm = operator_norm(gt - game.G);
  const double r_min = game.r.minCoeff();
  const double rho_g = spectral_radius(game.G);
  report.stable = rho_g < r_min;
  if (report.stable) {
    report.k1 = 1.0 / ((r_min - rho_g) * (r_min - rho_g));
    const double norm_sum = game.r.maxCoeff() + operator_norm(game.G);
    report.k4 = r_min / (2.0 * norm_sum * norm_sum);
  }
  report.sign_caveat = report.cost_ne < 0.0;
  return report;
}

BoundCheckReport vom_bound_check(const NetworkGame& game,
                                 const AttentionStructure& att,
                                 const std::vector<double>& scales) {
  if (scales.empty()) fail(ErrorKind::InvalidParams, "no scales given");
  for (double t : scales) {
    if (!std::isfinite(t) || t < 0.0) {
      fail(ErrorKind::InvalidParams, "scales must be finite and nonnegative");
    }
  }
  const double r_min = game.r.minCoeff();
  const double rho_g = spectral_radius(game.G);
  if (!(rho_g < r_min)) {
    fail(ErrorKind::InvalidParams,
         "bound check requires rho(G) < r_min, got rho = " +
             std::to_string(rho_g) + ", r_min = " + std::to_string(r_min));
  }

  BoundCheckReport report;
  const EquilibriumResult ne = solve_nash(game);
  report.cost_ne = aggregate_cost(game, ne.x);
  if (std::abs(report.cost_ne) < 1e-14) {
    fail(ErrorKind::ZeroBaselineCost,
         "baseline equilibrium cost is numerically zero");
  }
  const double quad = 0.5 * ne.x.dot(game.r.cwiseProduct(ne.x));
  report.identity_gap = std::abs(report.cost_ne + quad);
  report.identity_ok = report.identity_gap <= 1e-10 * std::abs(report.cost_ne);

  const Matrix delta_g = sparsify(game, att) - game.G;
  report.delta_g_norm = operator_norm(delta_g);
  report.k1 = 1.0 / ((r_min - rho_g) * (r_min - rho_g));
  const double b_norm = game.b.norm();

  std::vector<double> sorted = scales;
  std::sort(sorted.begin(), sorted.end());
  for (double t : sorted) {
    Matrix A = game.G + t * delta_g;
    A.diagonal() += game.r;
    const Vector x_t = solve_linear(A, game.b);
    BoundCheckRow row;
    row.scale = t;
    row.cost_bn = aggregate_cost(game, x_t);
    row.vom = (row.cost_bn - report.cost_ne) / report.cost_ne;
    row.action_deviation = (x_t - ne.x).norm();
    row.bound_rhs = report.k1 * b_norm * t * report.delta_g_norm;
    row.bound_ok = row.action_deviation <= row.bound_rhs;
    if (t > 0.0 && report.delta_g_norm > 0.0) {
      row.ratio = std::abs(row.vom) / (t * report.delta_g_norm);
    }
    report.rows.push_back(std::move(row));
  }

  report.ratio_bounded = true;
  const auto first_ratio =
      std::find_if(report.rows.begin(), report.rows.end(),
                   [](const BoundCheckRow& row) { return row.ratio.has_value(); });
  if (first_ratio != report.rows.end()) {
    const double base = *first_ratio->ratio;
    for (auto it = first_ratio; it != report.rows.end(); ++it) {
      if (!it->ratio.has_value()) continue;
      if (*it->ratio > 3.0 * base || *it->ratio < base / 3.0) {
        report.ratio_bounded = false;
        break;
      }
    }
  }
  return report;
}

}  // namespace berknash
