#include "berknash/berknash.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "core/arbitrage.hpp"
#include "core/config.hpp"
#include "core/equilibrium.hpp"
#include "core/errors.hpp"
#include "core/learning.hpp"
#include "core/model.hpp"
#include "core/serialize.hpp"
#include "core/timescale.hpp"

struct bn_config {
  berknash::ScenarioConfig value;
};

namespace {

using namespace berknash;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

bn_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigError:
    case ErrorKind::InvalidParams:
    case ErrorKind::EmptyAttention:
    case ErrorKind::InfeasibleBudget:
      return BN_ERR_CONFIG;
    case ErrorKind::IoError:
      return BN_ERR_IO;
    case ErrorKind::SingularMatrix:
    case ErrorKind::NoConvergence:
    case ErrorKind::DegenerateRegressor:
    case ErrorKind::ZeroBaselineCost:
    case ErrorKind::NumericalFailure:
    case ErrorKind::Diverged:
      return BN_ERR_SOLVER;
  }
  return BN_ERR_SOLVER;
}

template <typename Fn>
bn_status guarded(char** err, Fn&& fn) {
  if (err != nullptr) *err = nullptr;
  try {
    fn();
    return BN_OK;
  } catch (const Error& e) {
    if (err != nullptr) *err = dup_string(e.what());
    return status_of(e.kind());
  } catch (const std::exception& e) {
    if (err != nullptr) *err = dup_string(e.what());
    return BN_ERR_SOLVER;
  }
}

const ScenarioConfig& need_config(const bn_config* config) {
  if (config == nullptr) {
    fail(ErrorKind::ConfigError, "config handle is null");
  }
  return config->value;
}

const AttentionStructure& need_attention(const ScenarioConfig& config) {
  if (!config.attention.has_value()) {
    fail(ErrorKind::ConfigError, "config missing field: attention");
  }
  return *config.attention;
}

const DesignerConfig& need_designer(const ScenarioConfig& config) {
  if (!config.designer.has_value()) {
    fail(ErrorKind::ConfigError, "config missing field: designer");
  }
  return *config.designer;
}

std::vector<double> parse_scales(const char* scales) {
  if (scales == nullptr || *scales == '\0') return {0.0, 0.25, 0.5, 1.0};
  std::vector<double> out;
  const std::string text(scales);
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    const std::string item = text.substr(start, end - start);
    if (item.empty()) {
      fail(ErrorKind::ConfigError, "empty entry in scales list");
    }
    try {
      std::size_t used = 0;
      const double value = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(value);
    } catch (const std::exception&) {
      fail(ErrorKind::ConfigError, "scales entry is not a number: " + item);
    }
    start = end + 1;
  }
  return out;
}

void set_out(char** slot, const std::string& text) {
  if (slot == nullptr) {
    fail(ErrorKind::ConfigError, "output pointer is null");
  }
  *slot = dup_string(text);
}

}  // namespace

extern "C" {

const char* bn_version(void) { return "0.1.0"; }

bn_status bn_config_parse(const char* json_text, bn_config** out, char** err) {
  return guarded(err, [&] {
    if (json_text == nullptr) {
      fail(ErrorKind::ConfigError, "config text is null");
    }
    if (out == nullptr) {
      fail(ErrorKind::ConfigError, "output pointer is null");
    }
    auto parsed = std::make_unique<bn_config>();
    parsed->value = parse_config(json_text);
    *out = parsed.release();
  });
}

bn_status bn_config_load(const char* path, bn_config** out, char** err) {
  return guarded(err, [&] {
    if (path == nullptr) fail(ErrorKind::ConfigError, "config path is null");
    if (out == nullptr) fail(ErrorKind::ConfigError, "output pointer is null");
    auto parsed = std::make_unique<bn_config>();
    parsed->value = load_config(path);
    *out = parsed.release();
  });
}

void bn_config_free(bn_config* config) { delete config; }

bn_status bn_config_json(const bn_config* config, char** out, char** err) {
  return guarded(err, [&] { set_out(out, config_to_json(need_config(config))); });
}

bn_status bn_config_hash(const bn_config* config, char** out, char** err) {
  return guarded(err, [&] { set_out(out, config_hash_hex(need_config(config))); });
}

bn_status bn_generate(int n, int avg_degree, double weight_coverage,
                      uint64_t seed, double sigma, char** out, char** err) {
  return guarded(err, [&] {
    GeneratedScenario scenario =
        generate_scenario(n, avg_degree, weight_coverage, seed, sigma);
    ScenarioConfig config;
    config.game = std::move(scenario.game);
    config.attention = std::move(scenario.attention);
    config.conjecture.kind = ConjectureKind::LocalMeanField;
    config.seed = seed;
    config.coverage = std::move(scenario.coverage);

    DesignerConfig designer;
    designer.a_weights = Vector::Ones(config.game.n());
    designer.b_weights = Vector::Ones(config.game.n());
    // Slow schedule calibrated on the default scenario: a near-constant
    // designer step keeps the distortion moving well past the point where
    // noise-driven action updates fall under the diagnostic threshold, so the
    // time-scale separation is visible in the crossing indices.
    designer.b_hat = 0.5;
    designer.k1 = 2000.0;
    // Budget sized off the unconstrained optimum so the constraint is slack
    // by default; a fixed fallback covers degenerate objectives.
    designer.gamma_budget = 1.0;
    try {
      const QcqpData q = assemble_qcqp(config.game, *config.attention,
                                       designer.a_weights, 1.0);
      QcqpData loose = q;
      loose.gamma_budget = 1e12;
      const DistortionPlan plan = solve_arbitrage(loose);
      const double used =
          plan.delta.dot(designer.a_weights.cwiseProduct(plan.delta));
      if (used > 1e-12) designer.gamma_budget = 2.0 * used;
    } catch (const Error&) {
      // keep the fallback budget
    }
    config.designer = std::move(designer);
    set_out(out, config_to_json(config));
  });
}

bn_status bn_validate(const bn_config* config, char** out, char** err) {
  return guarded(err, [&] {
    const ScenarioConfig& c = need_config(config);
    const AttentionStructure* att =
        c.attention.has_value() ? &*c.attention : nullptr;
    set_out(out, validation_to_json(validate(c.game, att)));
  });
}

bn_status bn_solve(const bn_config* config, const char* kind, char** out,
                   char** err) {
  return guarded(err, [&] {
    const ScenarioConfig& c = need_config(config);
    if (kind == nullptr) fail(ErrorKind::ConfigError, "solve kind is null");
    const std::string token(kind);
    const AttentionStructure* att =
        c.attention.has_value() ? &*c.attention : nullptr;
    EquilibriumResult result;
    if (token == "ne") {
      result = solve_nash(c.game);
    } else {
      ConjectureClass conjecture;
      if (token == "bne-const") {
        conjecture.kind = ConjectureKind::Constant;
      } else if (token == "bne-gmf") {
        conjecture.kind = ConjectureKind::GlobalMeanField;
      } else if (token == "bne-lmf") {
        conjecture.kind = ConjectureKind::LocalMeanField;
      } else {
        fail(ErrorKind::ConfigError, "unknown solve kind: " + token);
      }
      result = solve_bne(c.game, conjecture, att);
    }
    set_out(out, equilibrium_to_json(result));
  });
}

bn_status bn_vom(const bn_config* config, char** out, char** err) {
  return guarded(err, [&] {
    const ScenarioConfig& c = need_config(config);
    set_out(out, vom_to_json(value_of_misspecification(c.game, need_attention(c))));
  });
}

bn_status bn_vom_table(const bn_config* config, const char* scales, char** out,
                       char** err) {
  return guarded(err, [&] {
    const ScenarioConfig& c = need_config(config);
    const BoundCheckReport report =
        vom_bound_check(c.game, need_attention(c), parse_scales(scales));
    set_out(out, bound_check_csv(report));
  });
}

bn_status bn_arbitrage(const bn_config* config, char** out, char** err) {
  return guarded(err, [&] {
    const ScenarioConfig& c = need_config(config);
    const AttentionStructure& att = need_attention(c);
    const DesignerConfig& designer = need_designer(c);
    const QcqpData q = assemble_qcqp(c.game, att, designer.a_weights,
                                     designer.gamma_budget);
    const DistortionPlan plan = solve_arbitrage(q);
    const KktReport kkt = kkt_verify(q, plan);
    const EquilibriumResult induced = induced_equilibrium(c.game, att, plan);
    set_out(out, arbitrage_to_json(q, plan, kkt, induced));
  });
}

bn_status bn_simulate_learning(const bn_config* config, uint64_t seed,
                               char** trace_csv, char** summary_json,
                               char** err) {
  return guarded(err, [&] {
    const ScenarioConfig& c = need_config(config);
    const AttentionStructure* att =
        c.attention.has_value() ? &*c.attention : nullptr;
    const RunReport report =
        run(c.game, c.conjecture, att, c.learning.schedule, seed,
            c.learning.max_steps, c.learning.tol, c.learning.window);
    set_out(trace_csv, berknash::trace_csv(report.trace));
    set_out(summary_json, run_report_to_json(report));
  });
}

bn_status bn_simulate_two_timescale(const bn_config* config, uint64_t seed,
                                    char** trace_csv, char** diagnostics_csv,
                                    char** summary_json, char** err) {
  return guarded(err, [&] {
    const ScenarioConfig& c = need_config(config);
    TwoScaleConfig ts = two_scale_config(c);
    ts.seed = seed;
    const TwoScaleResult result =
        run_two_timescale(c.game, need_attention(c), ts);
    set_out(trace_csv, two_scale_trace_csv(result.trace));
    set_out(diagnostics_csv, berknash::diagnostics_csv(result.trace));
    set_out(summary_json, two_scale_report_to_json(result.report));
  });
}

void bn_string_free(char* s) { std::free(s); }

}  // extern "C"
