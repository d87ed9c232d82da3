#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <berknash/berknash.h>

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <string>

using nlohmann::json;

namespace {

// Owns a string returned by the library.
struct OwnedString {
  char* ptr = nullptr;
  ~OwnedString() { bn_string_free(ptr); }
  std::string str() const { return ptr == nullptr ? std::string() : ptr; }
};

// Owns a parsed configuration handle.
struct OwnedConfig {
  bn_config* ptr = nullptr;
  ~OwnedConfig() { bn_config_free(ptr); }
};

OwnedConfig parse_ok(const std::string& text) {
  OwnedConfig config;
  OwnedString err;
  REQUIRE(bn_config_parse(text.c_str(), &config.ptr, &err.ptr) == BN_OK);
  REQUIRE(config.ptr != nullptr);
  return config;
}

const char* kTwoAgentConfig = R"({
  "game": {
    "G": [[0.0, 0.5], [0.5, 0.0]],
    "r": [1.0, 1.0],
    "b": [1.0, 1.0],
    "sigma": [0.0, 0.0]
  },
  "attention": {"subsets": [[1], [0]]},
  "conjecture": "lmf",
  "seed": 3,
  "learning": {"a": 400000.0, "k0": 1000000.0, "max_steps": 4000,
               "tol": 1e-9, "window": 100},
  "designer": {
    "gamma_budget": 0.08,
    "a_weights": [1.0, 1.0],
    "b_weights": [1.0, 1.0],
    "b_hat": 150000.0,
    "k1": 1000000.0,
    "inner_steps_per_outer": 500,
    "total_steps": 20000
  }
})";

const char* kRingConfig = R"({
  "game": {
    "G": [[0.0, 0.3, 0.3], [0.3, 0.0, 0.3], [0.3, 0.3, 0.0]],
    "r": [1.0, 1.0, 1.0],
    "b": [1.0, 1.0, 1.0],
    "sigma": [0.0, 0.0, 0.0]
  },
  "attention": {"subsets": [[1], [2], [0]]},
  "conjecture": "lmf"
})";

}  // namespace

TEST_CASE("the library reports a version") {
  const char* version = bn_version();
  REQUIRE(version != nullptr);
  CHECK(std::string(version) == "0.1.0");
}

TEST_CASE("config parsing distinguishes config, io, and null-argument faults") {
  OwnedConfig config = parse_ok(kTwoAgentConfig);

  {
    OwnedConfig bad;
    OwnedString err;
    CHECK(bn_config_parse("{ not json", &bad.ptr, &err.ptr) == BN_ERR_CONFIG);
    CHECK(bad.ptr == nullptr);
    REQUIRE(err.ptr != nullptr);
    CHECK(err.str().find("JSON") != std::string::npos);
  }
  {
    OwnedConfig bad;
    OwnedString err;
    CHECK(bn_config_parse(nullptr, &bad.ptr, &err.ptr) == BN_ERR_CONFIG);
  }
  {
    OwnedConfig bad;
    // A null err slot must be tolerated.
    CHECK(bn_config_parse("{ not json", &bad.ptr, nullptr) == BN_ERR_CONFIG);
  }
  {
    OwnedString out;
    OwnedString err;
    CHECK(bn_config_json(nullptr, &out.ptr, &err.ptr) == BN_ERR_CONFIG);
    REQUIRE(err.ptr != nullptr);
    CHECK(err.str().find("null") != std::string::npos);
  }
  {
    OwnedConfig missing;
    OwnedString err;
    CHECK(bn_config_load("/no/such/file.json", &missing.ptr, &err.ptr) ==
          BN_ERR_IO);
  }

  const std::string path = "/tmp/berknash_capi_config.json";
  {
    std::ofstream out(path);
    out << kTwoAgentConfig;
  }
  {
    OwnedConfig loaded;
    OwnedString err;
    CHECK(bn_config_load(path.c_str(), &loaded.ptr, &err.ptr) == BN_OK);
    REQUIRE(loaded.ptr != nullptr);
  }
  std::remove(path.c_str());
}

TEST_CASE("canonical json and hashes are stable fingerprints") {
  OwnedConfig config = parse_ok(kTwoAgentConfig);
  OwnedString first, second, err;
  REQUIRE(bn_config_json(config.ptr, &first.ptr, &err.ptr) == BN_OK);
  REQUIRE(bn_config_json(config.ptr, &second.ptr, &err.ptr) == BN_OK);
  CHECK(first.str() == second.str());

  // The canonical form reparses to the same canonical form.
  OwnedConfig reparsed = parse_ok(first.str());
  OwnedString third;
  REQUIRE(bn_config_json(reparsed.ptr, &third.ptr, &err.ptr) == BN_OK);
  CHECK(third.str() == first.str());

  OwnedString hash;
  REQUIRE(bn_config_hash(config.ptr, &hash.ptr, &err.ptr) == BN_OK);
  CHECK(hash.str().size() == 16);
  CHECK(hash.str().find_first_not_of("0123456789abcdef") == std::string::npos);
}

TEST_CASE("generated scenarios are deterministic, complete documents") {
  OwnedString first, second, err;
  REQUIRE(bn_generate(12, 3, 0.3, 7, 0.05, &first.ptr, &err.ptr) == BN_OK);
  REQUIRE(bn_generate(12, 3, 0.3, 7, 0.05, &second.ptr, &err.ptr) == BN_OK);
  CHECK(first.str() == second.str());

  OwnedConfig config = parse_ok(first.str());
  const json doc = json::parse(first.str());
  CHECK(doc["game"]["G"].size() == 12);
  CHECK(doc["conjecture"] == "lmf");
  CHECK(doc["seed"].get<uint64_t>() == 7);
  // The generator fills in a slack budget and the calibrated slow schedule.
  CHECK(doc["designer"]["gamma_budget"].get<double>() > 0.0);
  CHECK(doc["designer"]["b_hat"].get<double>() == 0.5);
  CHECK(doc["designer"]["k1"].get<double>() == 2000.0);
  CHECK(doc["coverage"].size() == 12);

  OwnedString other, bad;
  REQUIRE(bn_generate(12, 3, 0.3, 8, 0.05, &other.ptr, &err.ptr) == BN_OK);
  CHECK(other.str() != first.str());
  CHECK(bn_generate(1, 3, 0.3, 7, 0.05, &bad.ptr, &err.ptr) == BN_ERR_CONFIG);
}

TEST_CASE("validation reports the stability margins") {
  OwnedConfig config = parse_ok(kTwoAgentConfig);
  OwnedString out, err;
  REQUIRE(bn_validate(config.ptr, &out.ptr, &err.ptr) == BN_OK);
  const json doc = json::parse(out.str());
  CHECK(doc["stable"].get<bool>());
  CHECK(doc["rho_g"].get<double>() == doctest::Approx(0.5));
  CHECK(doc["rho_r_inv_g_tilde"].get<double>() == doctest::Approx(0.5));
}

TEST_CASE("every equilibrium kind solves through the c surface") {
  OwnedConfig config = parse_ok(kTwoAgentConfig);
  for (const char* kind : {"ne", "bne-const", "bne-gmf", "bne-lmf"}) {
    OwnedString out, err;
    REQUIRE_MESSAGE(bn_solve(config.ptr, kind, &out.ptr, &err.ptr) == BN_OK,
                    kind);
    const json doc = json::parse(out.str());
    CHECK(doc["x"][0].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    CHECK(doc["x"][1].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  }
  {
    OwnedString out, err;
    CHECK(bn_solve(config.ptr, "oracle", &out.ptr, &err.ptr) == BN_ERR_CONFIG);
    CHECK(err.str().find("oracle") != std::string::npos);
  }
  {
    OwnedString out, err;
    CHECK(bn_solve(config.ptr, nullptr, &out.ptr, &err.ptr) == BN_ERR_CONFIG);
  }
}

TEST_CASE("solver faults map to the solver exit code") {
  // g = 1 makes R + G exactly singular.
  OwnedConfig config = parse_ok(R"({
    "game": {"G": [[0.0, 1.0], [1.0, 0.0]], "r": [1.0, 1.0],
             "b": [1.0, 1.0], "sigma": [0.0, 0.0]}
  })");
  OwnedString out, err;
  CHECK(bn_solve(config.ptr, "ne", &out.ptr, &err.ptr) == BN_ERR_SOLVER);
  REQUIRE(err.ptr != nullptr);
  CHECK(err.str().find("SingularMatrix") != std::string::npos);
}

TEST_CASE("misspecification cost surfaces through the c api") {
  OwnedConfig ring = parse_ok(kRingConfig);
  OwnedString out, err;
  REQUIRE(bn_vom(ring.ptr, &out.ptr, &err.ptr) == BN_OK);
  const json doc = json::parse(out.str());
  CHECK(doc["vom"].get<double>() ==
        doctest::Approx(-333.0 / 845.0).epsilon(1e-9));

  OwnedConfig no_attention = parse_ok(R"({
    "game": {"G": [[0.0, 0.5], [0.5, 0.0]], "r": [1.0, 1.0],
             "b": [1.0, 1.0], "sigma": [0.0, 0.0]}
  })");
  OwnedString out2, err2;
  CHECK(bn_vom(no_attention.ptr, &out2.ptr, &err2.ptr) == BN_ERR_CONFIG);
  CHECK(err2.str().find("attention") != std::string::npos);
}

TEST_CASE("bound tables honor explicit and default scale lists") {
  OwnedConfig ring = parse_ok(kRingConfig);
  {
    OwnedString out, err;
    REQUIRE(bn_vom_table(ring.ptr, nullptr, &out.ptr, &err.ptr) == BN_OK);
    const std::string csv = out.str();
    CHECK(csv.rfind("scale,vom,cost_ne,cost_bn,delta_g_norm,bound_ok\n", 0) ==
          0);
    // Header plus the default four scales.
    long rows = 0;
    for (char c : csv) rows += c == '\n';
    CHECK(rows == 5);
  }
  {
    OwnedString out, err;
    REQUIRE(bn_vom_table(ring.ptr, "0,0.5,1", &out.ptr, &err.ptr) == BN_OK);
    long rows = 0;
    for (char c : out.str()) rows += c == '\n';
    CHECK(rows == 4);
  }
  {
    OwnedString out, err;
    CHECK(bn_vom_table(ring.ptr, "0,abc", &out.ptr, &err.ptr) ==
          BN_ERR_CONFIG);
    CHECK(err.str().find("abc") != std::string::npos);
  }
  {
    OwnedString out, err;
    CHECK(bn_vom_table(ring.ptr, "0,,1", &out.ptr, &err.ptr) == BN_ERR_CONFIG);
  }
}

TEST_CASE("the distortion plan solves through the c surface") {
  OwnedConfig config = parse_ok(kTwoAgentConfig);
  OwnedString out, err;
  REQUIRE(bn_arbitrage(config.ptr, &out.ptr, &err.ptr) == BN_OK);
  const json doc = json::parse(out.str());
  CHECK(doc["delta"][0].get<double>() == doctest::Approx(0.2).epsilon(1e-8));
  CHECK(doc["delta"][1].get<double>() == doctest::Approx(0.2).epsilon(1e-8));
  CHECK(doc["lambda"].get<double>() ==
        doctest::Approx(1.0 / 9.0).epsilon(1e-8));
  CHECK(doc["active"].get<bool>());
  CHECK(doc["kkt"]["ok"].get<bool>());
  CHECK(doc["x_induced"][0].get<double>() ==
        doctest::Approx(8.0 / 15.0).epsilon(1e-8));

  // Missing designer section is a config fault.
  OwnedConfig ring = parse_ok(kRingConfig);
  OwnedString out2, err2;
  CHECK(bn_arbitrage(ring.ptr, &out2.ptr, &err2.ptr) == BN_ERR_CONFIG);
  CHECK(err2.str().find("designer") != std::string::npos);

  // A zero budget is rejected as infeasible.
  std::string zero_budget(kTwoAgentConfig);
  zero_budget.replace(zero_budget.find("\"gamma_budget\": 0.08"),
                      std::string("\"gamma_budget\": 0.08").size(),
                      "\"gamma_budget\": 0.0");
  OwnedConfig zero = parse_ok(zero_budget);
  OwnedString out3, err3;
  CHECK(bn_arbitrage(zero.ptr, &out3.ptr, &err3.ptr) == BN_ERR_CONFIG);
}

TEST_CASE("learning runs stream a trace and a verdict") {
  OwnedConfig config = parse_ok(kTwoAgentConfig);
  OwnedString trace, summary, err;
  REQUIRE(bn_simulate_learning(config.ptr, 3, &trace.ptr, &summary.ptr,
                               &err.ptr) == BN_OK);
  CHECK(trace.str().rfind("k,x_1,x_2,theta_1,theta_2,dx_norm,dtheta_norm\n",
                          0) == 0);
  const json doc = json::parse(summary.str());
  // Noiseless local mean-field run lands on the conjectured equilibrium,
  // which for this symmetric instance coincides with the best-reply point.
  CHECK(doc["verdict"] == "converged-to-BN");
  CHECK(doc["window_met"].get<bool>());
  CHECK(doc["dist_bn"].get<double>() <= 1e-6);

  // Determinism in the seed, sensitivity across seeds (with noise).
  std::string noisy(kTwoAgentConfig);
  noisy.replace(noisy.find("\"sigma\": [0.0, 0.0]"),
                std::string("\"sigma\": [0.0, 0.0]").size(),
                "\"sigma\": [0.05, 0.05]");
  OwnedConfig noisy_config = parse_ok(noisy);
  OwnedString t1, s1, t2, s2, t3, s3;
  REQUIRE(bn_simulate_learning(noisy_config.ptr, 11, &t1.ptr, &s1.ptr,
                               &err.ptr) == BN_OK);
  REQUIRE(bn_simulate_learning(noisy_config.ptr, 11, &t2.ptr, &s2.ptr,
                               &err.ptr) == BN_OK);
  REQUIRE(bn_simulate_learning(noisy_config.ptr, 12, &t3.ptr, &s3.ptr,
                               &err.ptr) == BN_OK);
  CHECK(t1.str() == t2.str());
  CHECK(s1.str() == s2.str());
  CHECK(t1.str() != t3.str());
}

TEST_CASE("coupled runs report crossing indices and diagnostics") {
  OwnedConfig config = parse_ok(kTwoAgentConfig);
  OwnedString trace, diag, summary, err;
  REQUIRE(bn_simulate_two_timescale(config.ptr, 3, &trace.ptr, &diag.ptr,
                                    &summary.ptr, &err.ptr) == BN_OK);
  CHECK(trace.str().rfind("k,x_1,x_2,theta_1,theta_2,delta_1,delta_2,", 0) ==
        0);
  CHECK(diag.str().rfind("k,dx_norm,dtheta_norm,ddelta_norm\n", 0) == 0);
  const json doc = json::parse(summary.str());
  CHECK(doc.contains("last_cross_x"));
  CHECK(doc.contains("last_cross_theta"));
  CHECK(doc.contains("last_cross_delta"));
  // The noiseless equilibrated run parks the distortion on the optimum.
  CHECK(doc["dist_delta_star"].get<double>() <= 1e-6);
  CHECK(doc["budget_active"].get<bool>());
  CHECK(doc["lambda"].get<double>() == doctest::Approx(1.0 / 9.0).epsilon(1e-6));
}
