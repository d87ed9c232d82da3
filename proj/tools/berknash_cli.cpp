// Batch front-end: every computation goes through the shared library's C
// interface; this layer only parses flags, fans out seeds, and writes files.

#include <CLI11.hpp>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <thread>
#include <vector>

#include "berknash/berknash.h"

namespace {

using nlohmann::json;

// Owns a string handed out by the library.
struct LibString {
  char* ptr = nullptr;
  ~LibString() { bn_string_free(ptr); }
  std::string str() const { return ptr == nullptr ? std::string() : ptr; }
};

struct LibConfig {
  bn_config* ptr = nullptr;
  ~LibConfig() { bn_config_free(ptr); }
};

int report_error(bn_status status, const LibString& err) {
  std::cerr << "error: " << (err.ptr != nullptr ? err.ptr : "unknown failure")
            << "\n";
  return static_cast<int>(status);
}

int write_or_print(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open " << out_path << " for writing\n";
    return static_cast<int>(BN_ERR_IO);
  }
  out << text;
  out.close();
  if (!out) {
    std::cerr << "error: failed writing " << out_path << "\n";
    return static_cast<int>(BN_ERR_IO);
  }
  return 0;
}

int load_config_or_fail(const std::string& path, LibConfig& config) {
  LibString err;
  const bn_status status = bn_config_load(path.c_str(), &config.ptr, &err.ptr);
  if (status != BN_OK) return report_error(status, err);
  return 0;
}

unsigned worker_count(std::size_t jobs) {
  unsigned workers = std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  if (const char* env = std::getenv("BERKNASH_THREADS")) {
    char* end = nullptr;
    const unsigned long parsed = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && parsed > 0) {
      workers = static_cast<unsigned>(parsed);
    }
  }
  if (workers > jobs) workers = static_cast<unsigned>(jobs);
  return workers == 0 ? 1 : workers;
}

struct SeedOutcome {
  bn_status status = BN_OK;
  std::string error;
  std::string trace;
  std::string diagnostics;
  std::string summary;
};

std::string command_line(int argc, char** argv) {
  std::string joined;
  for (int i = 0; i < argc; ++i) {
    if (i > 0) joined += ' ';
    joined += argv[i];
  }
  return joined;
}

int run_simulate(const std::string& config_path, const std::string& mode,
                 long seeds, const std::string& out_dir,
                 const std::string& command) {
  const auto started = std::chrono::steady_clock::now();
  LibConfig config;
  if (const int code = load_config_or_fail(config_path, config); code != 0) {
    return code;
  }
  LibString hash_err;
  LibString hash;
  if (const bn_status status =
          bn_config_hash(config.ptr, &hash.ptr, &hash_err.ptr);
      status != BN_OK) {
    return report_error(status, hash_err);
  }

  json config_doc;
  {
    LibString text, err;
    if (const bn_status status =
            bn_config_json(config.ptr, &text.ptr, &err.ptr);
        status != BN_OK) {
      return report_error(status, err);
    }
    config_doc = json::parse(text.str());
  }
  const std::uint64_t seed_base = config_doc.value("seed", 0ull);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create " << out_dir << ": " << ec.message()
              << "\n";
    return static_cast<int>(BN_ERR_IO);
  }

  std::vector<SeedOutcome> outcomes(static_cast<std::size_t>(seeds));
  std::atomic<std::size_t> cursor{0};
  const bool two_scale = mode == "two-timescale";
  auto worker = [&] {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= outcomes.size()) return;
      const std::uint64_t seed = seed_base + i;
      SeedOutcome& slot = outcomes[i];
      LibString trace, diag, summary, err;
      bn_status status;
      if (two_scale) {
        status = bn_simulate_two_timescale(config.ptr, seed, &trace.ptr,
                                           &diag.ptr, &summary.ptr, &err.ptr);
      } else {
        status = bn_simulate_learning(config.ptr, seed, &trace.ptr,
                                      &summary.ptr, &err.ptr);
      }
      slot.status = status;
      if (status != BN_OK) {
        slot.error = err.str();
        continue;
      }
      slot.trace = trace.str();
      slot.diagnostics = diag.str();
      slot.summary = summary.str();
    }
  };
  {
    std::vector<std::thread> pool;
    const unsigned workers = worker_count(outcomes.size());
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  const std::filesystem::path dir(out_dir);
  std::vector<std::string> outputs;
  json runs = json::array();
  json verdicts = json::object();
  int exit_code = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const std::uint64_t seed = seed_base + i;
    SeedOutcome& outcome = outcomes[i];
    if (outcome.status != BN_OK) {
      std::cerr << "seed " << seed << " failed: " << outcome.error << "\n";
      runs.push_back({{"seed", seed},
                      {"status", static_cast<int>(outcome.status)},
                      {"error", outcome.error}});
      exit_code = std::max(exit_code, static_cast<int>(outcome.status));
      continue;
    }
    const std::string trace_name = "trace_seed" + std::to_string(seed) + ".csv";
    if (const int code =
            write_or_print((dir / trace_name).string(), outcome.trace);
        code != 0) {
      return code;
    }
    outputs.push_back(trace_name);
    json entry = json::parse(outcome.summary);
    entry["seed"] = seed;
    entry["trace_file"] = trace_name;
    if (two_scale) {
      const std::string diag_name =
          "diagnostics_seed" + std::to_string(seed) + ".csv";
      if (const int code =
              write_or_print((dir / diag_name).string(), outcome.diagnostics);
          code != 0) {
        return code;
      }
      outputs.push_back(diag_name);
      entry["diagnostics_file"] = diag_name;
      const long cx = entry.value("last_cross_x", -1l);
      const long cd = entry.value("last_cross_delta", -1l);
      entry["separation_ok"] = cx >= 0 && cd >= 0 && cx < cd;
    } else {
      const std::string verdict = entry.value("verdict", "unknown");
      verdicts[verdict] = verdicts.value(verdict, 0) + 1;
    }
    runs.push_back(std::move(entry));
  }

  json summary;
  summary["mode"] = mode;
  summary["config_hash"] = hash.str();
  summary["seed_base"] = seed_base;
  summary["seeds"] = seeds;
  summary["runs"] = std::move(runs);
  if (!two_scale) summary["verdicts"] = std::move(verdicts);
  if (const int code = write_or_print((dir / "summary.json").string(),
                                      summary.dump(2) + "\n");
      code != 0) {
    return code;
  }
  outputs.push_back("summary.json");

  const auto elapsed = std::chrono::steady_clock::now() - started;
  json manifest;
  manifest["command"] = command;
  manifest["config_hash"] = hash.str();
  manifest["duration_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
  manifest["outputs"] = outputs;
  manifest["seed"] = seed_base;
  manifest["seeds"] = seeds;
  manifest["version"] = bn_version();
  if (const int code = write_or_print((dir / "manifest.json").string(),
                                      manifest.dump(2) + "\n");
      code != 0) {
    return code;
  }
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibria, misspecification costs, and learning dynamics for "
               "linear-quadratic network games"};
  app.require_subcommand(1);

  auto* generate = app.add_subcommand(
      "generate", "Write a random scenario config (JSON)");
  int gen_n = 12;
  int gen_degree = 3;
  double gen_coverage = 0.3;
  double gen_sigma = 0.05;
  std::uint64_t gen_seed = 7;
  std::string gen_out = "config.json";
  generate->add_option("--n", gen_n, "Number of agents");
  generate->add_option("--avg-degree", gen_degree, "Attention-set size");
  generate->add_option("--coverage", gen_coverage, "Target weight coverage");
  generate->add_option("--sigma", gen_sigma, "Observation noise scale");
  generate->add_option("--seed", gen_seed, "Generator seed");
  generate->add_option("--out", gen_out, "Output config path");

  auto* solve = app.add_subcommand("solve", "Solve one equilibrium (JSON)");
  std::string solve_config, solve_kind, solve_out;
  solve->add_option("--config", solve_config, "Scenario config path")
      ->required();
  solve->add_option("--kind", solve_kind, "Equilibrium kind")
      ->required()
      ->check(CLI::IsMember({"ne", "bne-const", "bne-gmf", "bne-lmf"}));
  solve->add_option("--out", solve_out, "Output path (default stdout)");

  auto* vom = app.add_subcommand(
      "vom", "Misspecification cost table across distortion scales (CSV)");
  std::string vom_config, vom_out;
  std::string vom_scales = "0,0.25,0.5,1";
  vom->add_option("--config", vom_config, "Scenario config path")->required();
  vom->add_option("--scales", vom_scales, "Comma-separated scale list");
  vom->add_option("--out", vom_out, "Output path (default stdout)");

  auto* arbitrage = app.add_subcommand(
      "arbitrage", "Optimal signal distortion plan and induced equilibrium");
  std::string arb_config, arb_out;
  arbitrage->add_option("--config", arb_config, "Scenario config path")
      ->required();
  arbitrage->add_option("--out", arb_out, "Output path (default stdout)");

  auto* simulate = app.add_subcommand(
      "simulate", "Run learning or coupled fast/slow dynamics over seeds");
  std::string sim_config, sim_mode;
  std::string sim_dir = ".";
  long sim_seeds = 1;
  simulate->add_option("--config", sim_config, "Scenario config path")
      ->required();
  simulate->add_option("--mode", sim_mode, "Simulation mode")
      ->required()
      ->check(CLI::IsMember({"learning", "two-timescale"}));
  simulate->add_option("--seeds", sim_seeds, "Number of consecutive seeds")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--out-dir", sim_dir, "Directory for trace files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(BN_ERR_CONFIG);
  }

  if (generate->parsed()) {
    LibString out, err;
    const bn_status status = bn_generate(gen_n, gen_degree, gen_coverage,
                                         gen_seed, gen_sigma, &out.ptr, &err.ptr);
    if (status != BN_OK) return report_error(status, err);
    return write_or_print(gen_out, out.str());
  }
  if (solve->parsed()) {
    LibConfig config;
    if (const int code = load_config_or_fail(solve_config, config); code != 0) {
      return code;
    }
    LibString out, err;
    const bn_status status =
        bn_solve(config.ptr, solve_kind.c_str(), &out.ptr, &err.ptr);
    if (status != BN_OK) return report_error(status, err);
    return write_or_print(solve_out, out.str());
  }
  if (vom->parsed()) {
    LibConfig config;
    if (const int code = load_config_or_fail(vom_config, config); code != 0) {
      return code;
    }
    LibString out, err;
    const bn_status status =
        bn_vom_table(config.ptr, vom_scales.c_str(), &out.ptr, &err.ptr);
    if (status != BN_OK) return report_error(status, err);
    return write_or_print(vom_out, out.str());
  }
  if (arbitrage->parsed()) {
    LibConfig config;
    if (const int code = load_config_or_fail(arb_config, config); code != 0) {
      return code;
    }
    LibString out, err;
    const bn_status status = bn_arbitrage(config.ptr, &out.ptr, &err.ptr);
    if (status != BN_OK) return report_error(status, err);
    if (const int code = write_or_print(arb_out, out.str()); code != 0) {
      return code;
    }
    const json doc = json::parse(out.str());
    if (!doc.at("kkt").at("ok").get<bool>()) {
      std::cerr << "error: optimality conditions failed verification\n";
      return static_cast<int>(BN_ERR_SOLVER);
    }
    return 0;
  }
  if (simulate->parsed()) {
    return run_simulate(sim_config, sim_mode, sim_seeds, sim_dir,
                        command_line(argc, argv));
  }
  return static_cast<int>(BN_ERR_CONFIG);
}
