#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "pedebate/equilibrium.hpp"
#include "pedebate/fixtures.hpp"

namespace pedebate {

struct ExperimentConfig {
  int schema_version = 1;
  std::string fixture = "interval_q3_d2";
  double epsilon = 0.0;  // 0 = fixture default
  double rho = 0.0;
  double delta = 0.05;
  double eta = 0.0;   // when set, delta = eta / (2d + 1)
  double alpha = 0.0;
  std::uint64_t seed = 42;
  std::string mode = "exact";  // exact | mc
  std::size_t mc_runs = 100000;
  std::string out_dir = ".";

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  std::string hash() const;  // canonical serialization, FNV-1a 64
  void validate() const;
};

struct ResultRecord {
  std::string experiment_id;
  std::string config_hash;
  std::string metric;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
  bool informational = false;  // reported but excluded from the verdict
  double runtime_ms = 0.0;
  std::string note;
};

struct SuiteResult {
  std::string suite;
  std::vector<ResultRecord> records;
  bool pass = true;
  double runtime_ms = 0.0;
};

std::vector<std::string> suite_names();  // completeness soundness stackelberg stability ogd obfuscation
SuiteResult run_suite(const std::string& name, std::uint64_t seed);

std::string records_csv(const std::vector<ResultRecord>& records);
std::string suite_table(const SuiteResult& result);

// Delta = honest best-response value minus the best dishonest row, reported
// against the completeness floor and the soundness ceiling.
struct RewardGapReport {
  double gap = 0.0;
  double honest_floor = 0.0;     // (1-eps) r^{d+1}
  double soundness_ceiling = 0.0;
};

}  // namespace pedebate
