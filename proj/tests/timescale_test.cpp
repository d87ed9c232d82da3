#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>

#include "core/arbitrage.hpp"
#include "core/errors.hpp"
#include "core/serialize.hpp"
#include "core/timescale.hpp"
#include "helpers.hpp"

using namespace berknash;
using namespace berknash::testing;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  throw std::logic_error("expected an Error");
}

NetworkGame noiseless(const NetworkGame& game) {
  return make_game(game.G, game.r, game.b, Vector::Zero(game.n()));
}

bool exactly_equal(const Vector& a, const Vector& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

// Noiseless two-agent setup where the fast loop equilibrates within a few
// dozen steps (alpha ~ 0.4) and the designer objective has its
// budget-constrained optimum at delta = (0.2, 0.2).
TwoScaleConfig snap_config() {
  TwoScaleConfig config;
  config.fast = StepSchedule{4e5, 1e6};
  config.b_hat = 1.5e5;  // beta ~ 0.15, still strictly below alpha
  config.k1 = 1e6;
  config.gamma_budget = 0.08;
  config.inner_steps_per_outer = 500;
  config.total_steps = 20000;
  config.seed = 3;
  return config;
}

}  // namespace

TEST_CASE("two-scale configuration validation endpoints") {
  const NetworkGame game = noiseless(two_agent_game());
  const AttentionStructure att = two_agent_attention();
  TwoScaleConfig config;
  config.gamma_budget = 0.08;
  config.fast = StepSchedule{1.0, 10.0};

  auto run_with = [&](const std::function<void(TwoScaleConfig&)>& tweak) {
    return [&, tweak] {
      TwoScaleConfig bad = config;
      tweak(bad);
      run_two_timescale(game, att, bad);
    };
  };

  CHECK(kind_of(run_with([](TwoScaleConfig& c) { c.b_hat = -0.1; })) ==
        ErrorKind::InvalidParams);
  CHECK(kind_of(run_with([](TwoScaleConfig& c) { c.k1 = 0.5; })) ==
        ErrorKind::InvalidParams);
  // Slow scale above the fast one: negative slope of a(k+k1) - b_hat(k+k0).
  CHECK(kind_of(run_with([](TwoScaleConfig& c) { c.b_hat = 1.5; })) ==
        ErrorKind::InvalidParams);
  // Nonnegative slope but the k = 1 endpoint is already violated.
  CHECK(kind_of(run_with([](TwoScaleConfig& c) {
          c.fast = StepSchedule{1.0, 1e6};
          c.b_hat = 0.99;
          c.k1 = 10.0;
        })) == ErrorKind::InvalidParams);
  CHECK(kind_of(run_with([](TwoScaleConfig& c) {
          c.inner_steps_per_outer = 0;
        })) == ErrorKind::InvalidParams);
  CHECK(kind_of(run_with([](TwoScaleConfig& c) { c.total_steps = 0; })) ==
        ErrorKind::InvalidParams);
  CHECK(kind_of(run_with([](TwoScaleConfig& c) { c.gamma_budget = 0.0; })) ==
        ErrorKind::InfeasibleBudget);
  CHECK(kind_of(run_with([](TwoScaleConfig& c) { c.gamma_budget = -1.0; })) ==
        ErrorKind::InfeasibleBudget);
  CHECK(kind_of(run_with([](TwoScaleConfig& c) {
          c.delta0 = Vector::Zero(3);
        })) == ErrorKind::InvalidParams);
}

TEST_CASE("slow schedule stays strictly below the fast one") {
  TwoScaleConfig config;
  config.fast = StepSchedule{1.0, 10.0};
  for (long k : {0L, 1L, 10L, 1000L, 200000L}) {
    CHECK(config.slow_at(k) < config.fast.at(k));
  }
  CHECK(config.slow_at(0) == doctest::Approx(0.005));
  CHECK(config.slow_at(90) == doctest::Approx(0.0005));
}

TEST_CASE("frozen designer holds the distortion while agents equilibrate") {
  // b_hat = 0 disables the slow updates entirely; the distortion stays at the
  // precomputed optimum and the fast loop settles onto the induced response.
  const NetworkGame game = noiseless(two_agent_game());
  const AttentionStructure att = two_agent_attention();
  TwoScaleConfig config = snap_config();
  config.b_hat = 0.0;
  config.inner_steps_per_outer = 1;
  config.total_steps = 2000;
  Vector star(2);
  star << 0.2, 0.2;
  config.delta0 = star;

  const TwoScaleResult result = run_two_timescale(game, att, config);
  const TwoScaleReport& report = result.report;

  CHECK((report.delta - star).norm() <= 1e-12);
  CHECK(report.last_cross_delta == -1);
  CHECK(report.dist_delta_star <= 1e-9);
  CHECK(report.budget_active);
  CHECK(report.lambda == doctest::Approx(1.0 / 9.0).epsilon(1e-8));
  // Induced response: x = M (b - delta*) = (8/15, 8/15).
  CHECK(report.x_star(0) == doctest::Approx(8.0 / 15.0).epsilon(1e-9));
  CHECK(report.dist_x_star <= 1e-6);
  CHECK(report.dist_x_bn_final <= 1e-8);
  CHECK(report.f_star == doctest::Approx(-4.0 / 75.0).epsilon(1e-8));
  CHECK(report.f_terminal == doctest::Approx(-4.0 / 75.0).epsilon(1e-8));
  CHECK(report.steps == 2000);
  CHECK_FALSE(report.stability_warning);
  // Every recorded distortion row equals the frozen vector.
  for (const TwoScaleRow& row : result.trace.rows) {
    CHECK((row.delta - star).norm() <= 1e-12);
    CHECK(row.ddelta_norm == 0.0);
  }
}

TEST_CASE("equilibrated inner loops drive the distortion onto the optimum") {
  // Projected gradient descent on the designer objective walks up the
  // symmetric ray and the radial pull-back lands exactly on the budget
  // sphere, which is where the constrained optimum sits.
  const NetworkGame game = noiseless(two_agent_game());
  const AttentionStructure att = two_agent_attention();
  const TwoScaleConfig config = snap_config();

  const TwoScaleResult result = run_two_timescale(game, att, config);
  const TwoScaleReport& report = result.report;

  CHECK(report.dist_delta_star <= 1e-8);
  CHECK(report.budget_active);
  CHECK(report.lambda == doctest::Approx(1.0 / 9.0).epsilon(1e-8));
  CHECK(report.dist_x_star <= 1e-6);
  CHECK(report.f_terminal == doctest::Approx(report.f_star).epsilon(1e-10));
  CHECK(report.last_cross_delta >= 0);

  // The recorded objective values never increase and every recorded
  // distortion respects the budget.
  const QcqpData q =
      assemble_qcqp(game, att, Vector::Ones(2), config.gamma_budget);
  double previous = 0.0;  // f at the zero start
  for (const TwoScaleRow& row : result.trace.rows) {
    const double value = designer_objective(q, row.delta);
    CHECK(value <= previous + 1e-12);
    previous = value;
    CHECK(row.delta.squaredNorm() <= config.gamma_budget * (1.0 + 1e-8));
  }
}

TEST_CASE("an infeasible starting distortion is pulled back onto the budget") {
  const NetworkGame game = noiseless(two_agent_game());
  const AttentionStructure att = two_agent_attention();
  TwoScaleConfig config = snap_config();
  config.b_hat = 0.0;
  config.total_steps = 5;
  Vector huge(2);
  huge << 10.0, 10.0;
  config.delta0 = huge;

  const TwoScaleResult result = run_two_timescale(game, att, config);
  // Radial pull-back of t(1,1) onto the sphere 2 t^2 = 0.08 gives (0.2, 0.2).
  CHECK(result.report.delta(0) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(result.report.delta(1) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(result.report.delta.squaredNorm() <=
        config.gamma_budget * (1.0 + 1e-8));
}

TEST_CASE("coupled runs are deterministic in the seed") {
  const NetworkGame game = two_agent_game(0.05);
  const AttentionStructure att = two_agent_attention();
  TwoScaleConfig config;
  config.fast = StepSchedule{1.0, 10.0};
  config.gamma_budget = 0.08;
  config.total_steps = 3000;
  config.seed = 11;

  const TwoScaleResult first = run_two_timescale(game, att, config);
  const TwoScaleResult second = run_two_timescale(game, att, config);
  REQUIRE(first.trace.rows.size() == second.trace.rows.size());
  for (std::size_t m = 0; m < first.trace.rows.size(); ++m) {
    CHECK(exactly_equal(first.trace.rows[m].x, second.trace.rows[m].x));
    CHECK(exactly_equal(first.trace.rows[m].theta, second.trace.rows[m].theta));
    CHECK(exactly_equal(first.trace.rows[m].delta, second.trace.rows[m].delta));
  }
  CHECK(exactly_equal(first.report.x, second.report.x));
  CHECK(first.report.last_cross_x == second.report.last_cross_x);
  CHECK(first.report.last_cross_theta == second.report.last_cross_theta);
  CHECK(first.report.last_cross_delta == second.report.last_cross_delta);

  config.seed = 12;
  const TwoScaleResult third = run_two_timescale(game, att, config);
  CHECK_FALSE(exactly_equal(first.report.x, third.report.x));
}

TEST_CASE("diagnostics table carries the per-step movement norms") {
  const NetworkGame game = noiseless(two_agent_game());
  const AttentionStructure att = two_agent_attention();
  TwoScaleConfig config = snap_config();
  config.total_steps = 1;
  config.inner_steps_per_outer = 1;

  const TwoScaleResult result = run_two_timescale(game, att, config);
  REQUIRE(result.trace.rows.size() == 1);
  const std::string csv = diagnostics_csv(result.trace);
  REQUIRE(csv.rfind("k,dx_norm,dtheta_norm,ddelta_norm\n", 0) == 0);
  // Exactly one data line, starting with the step index 1.
  const std::string body = csv.substr(csv.find('\n') + 1);
  CHECK(body.find('\n') == body.size() - 1);
  CHECK(body.rfind("1,", 0) == 0);

  // Every numeric field round-trips exactly through strtod.
  std::size_t start = body.find(',') + 1;
  const double expected[3] = {result.trace.rows[0].dx_norm,
                              result.trace.rows[0].dtheta_norm,
                              result.trace.rows[0].ddelta_norm};
  for (double want : expected) {
    std::size_t end = body.find_first_of(",\n", start);
    const std::string field = body.substr(start, end - start);
    CHECK(std::strtod(field.c_str(), nullptr) == want);
    start = end + 1;
  }
}

TEST_CASE("diagnostics writer reports io failures and refuses empty traces") {
  const TwoScaleTrace empty;
  CHECK(kind_of([&] { emit_diagnostics(empty, "/tmp/unused.csv"); }) ==
        ErrorKind::InvalidParams);

  const NetworkGame game = noiseless(two_agent_game());
  const AttentionStructure att = two_agent_attention();
  TwoScaleConfig config = snap_config();
  config.total_steps = 3;
  const TwoScaleResult result = run_two_timescale(game, att, config);

  CHECK(kind_of([&] {
          emit_diagnostics(result.trace, "/no-such-directory/out.csv");
        }) == ErrorKind::IoError);

  const std::string path = "/tmp/berknash_diag_test.csv";
  emit_diagnostics(result.trace, path);
  CHECK(read_text_file(path) == diagnostics_csv(result.trace));
  std::remove(path.c_str());
}
