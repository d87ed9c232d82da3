#include "core/config.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "core/errors.hpp"

namespace berknash {

namespace {

using nlohmann::json;

[[noreturn]] void missing(const std::string& path) {
  fail(ErrorKind::ConfigError, "config missing field: " + path);
}

const json& field(const json& j, const std::string& path, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) missing(path.empty() ? key : path + "." + key);
  return *it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) {
    fail(ErrorKind::ConfigError, "config field " + path + " must be a number");
  }
  return j.get<double>();
}

long as_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) {
    fail(ErrorKind::ConfigError, "config field " + path + " must be an integer");
  }
  return j.get<long>();
}

Vector as_vector(const json& j, const std::string& path) {
  if (!j.is_array()) {
    fail(ErrorKind::ConfigError, "config field " + path + " must be an array");
  }
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) =
        as_number(j[i], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

Matrix as_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) {
    fail(ErrorKind::ConfigError,
         "config field " + path + " must be a nonempty array of rows");
  }
  const std::size_t rows = j.size();
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& row = j[i];
    if (!row.is_array() || row.size() != cols) {
      fail(ErrorKind::ConfigError,
           "config field " + path + " must have rows of equal length");
    }
    for (std::size_t k = 0; k < cols; ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          as_number(row[k], path);
    }
  }
  return m;
}

ConjectureClass parse_conjecture(const json& j, int n) {
  ConjectureClass conjecture;
  if (j.is_string()) {
    conjecture.kind = conjecture_kind_from_token(j.get<std::string>());
    return conjecture;
  }
  if (j.is_object()) {
    if (j.contains("per_agent")) {
      const auto& list = j["per_agent"];
      if (!list.is_array()) {
        fail(ErrorKind::ConfigError,
             "config field conjecture.per_agent must be an array");
      }
      if (static_cast<int>(list.size()) != n) {
        fail(ErrorKind::ConfigError,
             "config field conjecture.per_agent must list every agent");
      }
      for (const auto& item : list) {
        if (!item.is_string()) {
          fail(ErrorKind::ConfigError,
               "config field conjecture.per_agent must hold kind tokens");
        }
        conjecture.per_agent.push_back(
            conjecture_kind_from_token(item.get<std::string>()));
      }
      return conjecture;
    }
    if (j.contains("kind")) {
      if (!j["kind"].is_string()) {
        fail(ErrorKind::ConfigError, "config field conjecture.kind must be a string");
      }
      conjecture.kind = conjecture_kind_from_token(j["kind"].get<std::string>());
      return conjecture;
    }
    missing("conjecture.kind");
  }
  fail(ErrorKind::ConfigError,
       "config field conjecture must be a token or an object");
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    fail(ErrorKind::ConfigError, "config must be a JSON object");
  }

  ScenarioConfig config;
  const json& game = field(doc, "", "game");
  const Matrix g = as_matrix(field(game, "game", "G"), "game.G");
  const Vector r = as_vector(field(game, "game", "r"), "game.r");
  const Vector b = as_vector(field(game, "game", "b"), "game.b");
  const Vector sigma = as_vector(field(game, "game", "sigma"), "game.sigma");
  config.game = make_game(g, r, b, sigma);
  const int n = config.game.n();

  if (doc.contains("attention")) {
    const json& att = doc["attention"];
    const json& subsets = field(att, "attention", "subsets");
    if (!subsets.is_array() || static_cast<int>(subsets.size()) != n) {
      fail(ErrorKind::ConfigError,
           "config field attention.subsets must list every agent");
    }
    AttentionStructure structure;
    for (std::size_t i = 0; i < subsets.size(); ++i) {
      const auto& subset = subsets[i];
      if (!subset.is_array()) {
        fail(ErrorKind::ConfigError,
             "config field attention.subsets must hold index arrays");
      }
      std::vector<int> indices;
      for (const auto& item : subset) {
        indices.push_back(static_cast<int>(
            as_integer(item, "attention.subsets[" + std::to_string(i) + "]")));
      }
      structure.subsets.push_back(std::move(indices));
    }
    check_attention(config.game, structure);
    config.attention = std::move(structure);
  }

  if (doc.contains("conjecture")) {
    config.conjecture = parse_conjecture(doc["conjecture"], n);
  }

  if (doc.contains("seed")) {
    const long seed = as_integer(doc["seed"], "seed");
    if (seed < 0) {
      fail(ErrorKind::ConfigError, "config field seed must be nonnegative");
    }
    config.seed = static_cast<std::uint64_t>(seed);
  }

  if (doc.contains("learning")) {
    const json& learning = doc["learning"];
    if (learning.contains("a")) {
      config.learning.schedule.a = as_number(learning["a"], "learning.a");
    }
    if (learning.contains("k0")) {
      config.learning.schedule.k0 = as_number(learning["k0"], "learning.k0");
    }
    if (learning.contains("tol")) {
      config.learning.tol = as_number(learning["tol"], "learning.tol");
    }
    if (learning.contains("max_steps")) {
      config.learning.max_steps = as_integer(learning["max_steps"], "learning.max_steps");
    }
    if (learning.contains("window")) {
      config.learning.window =
          static_cast<int>(as_integer(learning["window"], "learning.window"));
    }
    check_schedule(config.learning.schedule);
  }

  if (doc.contains("designer")) {
    const json& designer = doc["designer"];
    DesignerConfig d;
    d.gamma_budget =
        as_number(field(designer, "designer", "gamma_budget"), "designer.gamma_budget");
    d.a_weights =
        as_vector(field(designer, "designer", "a_weights"), "designer.a_weights");
    d.b_weights =
        as_vector(field(designer, "designer", "b_weights"), "designer.b_weights");
    if (d.a_weights.size() != n || d.b_weights.size() != n) {
      fail(ErrorKind::ConfigError,
           "config designer weights must list every agent");
    }
    if (designer.contains("b_hat")) {
      d.b_hat = as_number(designer["b_hat"], "designer.b_hat");
    }
    if (designer.contains("k1")) {
      d.k1 = as_number(designer["k1"], "designer.k1");
    }
    if (designer.contains("inner_steps_per_outer")) {
      d.inner_steps_per_outer = as_integer(designer["inner_steps_per_outer"],
                                           "designer.inner_steps_per_outer");
    }
    if (designer.contains("total_steps")) {
      d.total_steps = as_integer(designer["total_steps"], "designer.total_steps");
    }
    if (designer.contains("delta0")) {
      d.delta0 = as_vector(designer["delta0"], "designer.delta0");
    }
    config.designer = std::move(d);
  }

  if (doc.contains("coverage")) {
    config.coverage = as_vector(doc["coverage"], "coverage");
  }
  return config;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot read config file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string config_to_json(const ScenarioConfig& config) {
  json doc;
  doc["game"]["G"] = matrix_to_json(config.game.G);
  doc["game"]["r"] = vector_to_json(config.game.r);
  doc["game"]["b"] = vector_to_json(config.game.b);
  doc["game"]["sigma"] = vector_to_json(config.game.sigma);

  if (config.attention.has_value()) {
    json subsets = json::array();
    for (const auto& subset : config.attention->subsets) subsets.push_back(subset);
    doc["attention"]["subsets"] = std::move(subsets);
  }

  if (config.conjecture.homogeneous()) {
    doc["conjecture"] = conjecture_kind_token(config.conjecture.kind);
  } else {
    json list = json::array();
    for (ConjectureKind kind : config.conjecture.per_agent) {
      list.push_back(conjecture_kind_token(kind));
    }
    doc["conjecture"]["per_agent"] = std::move(list);
  }

  doc["seed"] = config.seed;
  doc["learning"] = {{"a", config.learning.schedule.a},
                     {"k0", config.learning.schedule.k0},
                     {"tol", config.learning.tol},
                     {"max_steps", config.learning.max_steps},
                     {"window", config.learning.window}};

  if (config.designer.has_value()) {
    const DesignerConfig& d = *config.designer;
    json designer = {{"gamma_budget", d.gamma_budget},
                     {"a_weights", vector_to_json(d.a_weights)},
                     {"b_weights", vector_to_json(d.b_weights)},
                     {"b_hat", d.b_hat},
                     {"k1", d.k1},
                     {"inner_steps_per_outer", d.inner_steps_per_outer},
                     {"total_steps", d.total_steps}};
    if (d.delta0.has_value()) designer["delta0"] = vector_to_json(*d.delta0);
    doc["designer"] = std::move(designer);
  }

  if (config.coverage.has_value()) {
    doc["coverage"] = vector_to_json(*config.coverage);
  }
  return doc.dump(2) + "\n";
}

std::string config_hash_hex(const ScenarioConfig& config) {
  const std::string text = config_to_json(config);
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  static const char* digits = "0123456789abcdef";
  std::string hex(16, '0');
  for (int i = 15; i >= 0; --i) {
    hex[static_cast<std::size_t>(i)] = digits[hash & 0xf];
    hash >>= 4;
  }
  return hex;
}

TwoScaleConfig two_scale_config(const ScenarioConfig& config) {
  if (!config.designer.has_value()) {
    fail(ErrorKind::ConfigError, "config missing field: designer");
  }
  const DesignerConfig& d = *config.designer;
  TwoScaleConfig ts;
  ts.fast = config.learning.schedule;
  ts.b_hat = d.b_hat;
  ts.k1 = d.k1;
  ts.gamma_budget = d.gamma_budget;
  ts.a_weights = d.a_weights;
  ts.inner_steps_per_outer = d.inner_steps_per_outer;
  ts.total_steps = d.total_steps;
  ts.seed = config.seed;
  ts.delta0 = d.delta0;
  return ts;
}

}  // namespace berknash
