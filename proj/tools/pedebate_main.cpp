#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "pedebate/harness.hpp"
#include "pedebate/indistinguishability.hpp"
#include "pedebate/serialize.hpp"

namespace fs = std::filesystem;
using namespace pedebate;

namespace {

ExperimentConfig load_config(const std::string& config_path, std::uint64_t seed,
                             const std::string& mode, std::size_t n, const std::string& out) {
  ExperimentConfig cfg;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    require(in.good(), "cannot read config " + config_path);
    json j = json::parse(in);
    cfg = ExperimentConfig::from_json(j);
  }
  if (seed != 0) cfg.seed = seed;
  if (!mode.empty()) cfg.mode = mode;
  if (n != 0) cfg.mc_runs = n;
  if (!out.empty()) cfg.out_dir = out;
  cfg.validate();
  return cfg;
}

ProtocolParams fixture_params(const FixtureBundle& f, const ExperimentConfig& cfg) {
  double eps = cfg.epsilon != 0.0 ? cfg.epsilon : f.params.epsilon;
  double rho = cfg.rho != 0.0 ? cfg.rho : f.params.rho;
  return ProtocolParams::make(eps, rho, f.params.depth, f.params.width, cfg.seed);
}

int cmd_run_debate(const ExperimentConfig& cfg) {
  auto f = make_fixture(cfg.fixture, cfg.seed);
  const auto params = fixture_params(f, cfg);
  fs::create_directories(cfg.out_dir);

  const auto& prover = f.pool.provers[0];
  const auto& estimator = f.pool.estimators[1];  // uniform: nontrivial sampling

  json runs = json::array();
  std::string csv = debate_run_csv_header() + "\n";
  std::string summary = "input,mode,value,stddev,ci3sigma\n";
  for (const Bits& x : f.world->inputs) {
    CounterRng rng(cfg.seed, 0);
    const auto run = run_debate(*f.world, *f.dec, *prover, *estimator, x, params, rng);
    runs.push_back(debate_run_to_json(run));
    csv += debate_run_csv_row(run) + "\n";
    if (cfg.mode == "exact") {
      const double v = expected_payoff_x(*f.world, *f.dec, *prover, *estimator, x, params);
      summary += x + ",exact," + format_double(v) + ",0,0\n";
    } else {
      const auto mc = monte_carlo_payoff(*f.world, *f.dec, *prover, *estimator, x, params,
                                         cfg.mc_runs, cfg.seed);
      summary += x + ",mc," + format_double(mc.mean) + "," + format_double(mc.stddev) + "," +
                 format_double(mc.half_width_3sigma) + "\n";
    }
  }
  write_text_file(cfg.out_dir + "/transcripts.json", json(runs).dump(2) + "\n");
  write_text_file(cfg.out_dir + "/runs.csv", csv);
  write_text_file(cfg.out_dir + "/summary.csv", summary);
  write_text_file(cfg.out_dir + "/config.json", cfg.to_json().dump(2) + "\n");
  std::printf("wrote %s/{transcripts.json,runs.csv,summary.csv} (config %s)\n",
              cfg.out_dir.c_str(), cfg.hash().c_str());
  return 0;
}

int cmd_build_estimator(const ExperimentConfig& cfg, const std::string& prover_name) {
  auto f = make_fixture(cfg.fixture, cfg.seed);
  const auto params = fixture_params(f, cfg);
  double delta = cfg.delta;
  if (cfg.eta > 0.0) delta = cfg.eta / (2.0 * params.depth + 1.0);
  ProverPtr prover;
  for (const auto& p : f.pool.provers)
    if (p->name() == prover_name) prover = p;
  require(prover != nullptr, "unknown prover '" + prover_name + "' in fixture pool");

  auto built = build_ogd_estimator(*f.world, *f.dec, prover, params, delta);
  fs::create_directories(cfg.out_dir);
  json models = json::array();
  for (const auto& level : built.levels) models.push_back(outcome_model_to_json(level.h));
  write_text_file(cfg.out_dir + "/outcome_models.json", json(models).dump(2) + "\n");
  json audit;
  audit["iterations_per_level"] = built.audit->iterations_per_level;
  audit["total_test_evaluations"] = built.audit->total_test_evaluations;
  write_text_file(cfg.out_dir + "/audit.json", audit.dump(2) + "\n");
  const auto breakdown =
      expected_payoff_breakdown(*f.world, *f.dec, *prover, *built.estimator, params);
  std::printf("built %s: E[V] = %s (delta=%s)\n", built.estimator->name().c_str(),
              format_double(breakdown.total()).c_str(), format_double(delta).c_str());
  std::printf("  E[r_init] = %s\n", format_double(breakdown.init).c_str());
  for (std::size_t i = 0; i < breakdown.rounds.size(); ++i)
    std::printf("  E[r_%d]    = %s\n", params.depth - static_cast<int>(i),
                format_double(breakdown.rounds[i]).c_str());
  std::printf("  E[r_0]    = %s\n", format_double(breakdown.terminal).c_str());
  std::printf("  iterations per level:");
  for (auto it : built.audit->iterations_per_level)
    std::printf(" %llu", static_cast<unsigned long long>(it));
  std::printf("\n");
  return 0;
}

int cmd_check_stability(const std::string& logic, int w, int kappa,
                        const std::vector<double>& probs, double epsilon, double rho,
                        const std::string& out) {
  AggregatorSpec spec;
  spec.logic = logic == "or" ? AggregatorSpec::Gate::Or : AggregatorSpec::Gate::And;
  spec.group_count = w;
  spec.group_size = kappa;
  require(static_cast<int>(probs.size()) == spec.width(),
          "need exactly w*kappa probabilities (" + std::to_string(spec.width()) + ")");
  const auto report = check_stability(spec, probs, epsilon, rho);
  const std::string text = stability_report_to_json(report).dump(2) + "\n";
  if (!out.empty())
    write_text_file(out, text);
  else
    std::fputs(text.c_str(), stdout);
  return report.stable ? 0 : 2;  // distinguishes "ran fine, unstable"
}

int cmd_stable_transform(const ExperimentConfig& cfg, int w, int kappa, int depth,
                         double flip_prob, int seeds) {
  StableTransformConfig tcfg;
  tcfg.epsilon = cfg.epsilon != 0.0 ? cfg.epsilon : 0.2;
  tcfg.w = w;
  tcfg.kappa = kappa;
  tcfg.depth = depth;
  tcfg.seeds_per_input = seeds;
  tcfg.seed_base = cfg.seed;
  tcfg.input_bits = 16;
  SupportedBaseWorld base;
  base.inputs = {bits_from_u64(0x5a31, 16), bits_from_u64(0xc3f0, 16)};
  const int bases = static_cast<int>(std::pow(w, depth));
  base.base_truths = {std::vector<int>(static_cast<std::size_t>(bases), 1),
                      std::vector<int>(static_cast<std::size_t>(bases), 0)};
  base.mu = {0.5, 0.5};
  EvidenceModel ev;
  const int kap = kappa > 0 ? kappa : kappa_for(w, tcfg.epsilon);
  ev.support = static_cast<int>(std::pow(kap, depth));
  ev.flip_prob = flip_prob;
  ev.independent = true;
  for (int b = 0; b < bases; ++b) ev.base_queries.push_back("b" + std::to_string(b));

  auto tr = stable_transform(base, ev, tcfg);
  fs::create_directories(cfg.out_dir);
  write_text_file(cfg.out_dir + "/circuit.json", circuit_to_json(tr.circuit).dump(2) + "\n");
  write_text_file(cfg.out_dir + "/world_prime.json",
                  world_to_json(*tr.world_prime).dump(2) + "\n");
  write_text_file(cfg.out_dir + "/decomposition.json",
                  decomposition_to_json(*tr.dec_prime).dump(2) + "\n");
  const auto cert = certify_transformed_stability(tr, tcfg.epsilon, 0.5);
  json jcert;
  jcert["stable"] = cert.stable;
  jcert["worst"] = stability_report_to_json(cert.worst);
  jcert["worst_deterministic"] = stability_report_to_json(cert.worst_deterministic);
  write_text_file(cfg.out_dir + "/certificate.json", jcert.dump(2) + "\n");
  std::printf("transform: q=%d, s=%d, certified(eps=%s)=%s, worst_gap=%s\n", tr.config.w * kap,
              ev.support, format_double(tcfg.epsilon).c_str(), cert.stable ? "yes" : "no",
              format_double(cert.worst.worst_gap).c_str());
  return 0;
}

int cmd_equilibrium(const ExperimentConfig& cfg) {
  auto f = make_fixture(cfg.fixture, cfg.seed);
  const auto params = fixture_params(f, cfg);
  const double rtop = params.reward_pow(params.depth + 1);
  double delta = cfg.delta;
  if (cfg.eta > 0.0) delta = cfg.eta / (2.0 * params.depth + 1.0);
  const double alpha = cfg.alpha > 0.0 ? cfg.alpha : params.epsilon * rtop / 10.0;

  std::vector<ProverPtr> provers = f.pool.provers;
  std::vector<EstimatorPtr> estimators = f.pool.estimators;
  for (auto& built : build_ogd_estimators(*f.world, *f.dec, provers, params, delta))
    estimators.push_back(built.estimator);

  const auto matrix = payoff_matrix(*f.world, *f.dec, provers, estimators, params);
  const auto equilibria = stackelberg(matrix, alpha);
  const auto accuracy = verify_accuracy_bound(equilibria, *f.world, provers, params.epsilon);

  fs::create_directories(cfg.out_dir);
  write_text_file(cfg.out_dir + "/payoff_matrix.csv", payoff_matrix_csv(matrix));
  write_text_file(cfg.out_dir + "/payoff_matrix.json", payoff_matrix_to_json(matrix).dump(2) + "\n");
  write_text_file(cfg.out_dir + "/equilibria.json",
                  equilibria_to_json(matrix, equilibria).dump(2) + "\n");
  write_text_file(cfg.out_dir + "/equilibria.csv", equilibria_csv(matrix, equilibria));
  std::printf("equilibria: %zu found, gamma threshold %s, all pass: %s\n", equilibria.size(),
              format_double(accuracy.threshold).c_str(), accuracy.all_pass ? "yes" : "no");
  return accuracy.all_pass ? 0 : 2;
}

int cmd_reproduce(const std::string& suite, std::uint64_t seed, const std::string& out) {
  std::vector<std::string> suites;
  if (suite == "all")
    suites = suite_names();
  else
    suites = {suite};
  bool all_pass = true;
  std::vector<ResultRecord> records;
  for (const auto& name : suites) {
    auto result = run_suite(name, seed == 0 ? 42 : seed);
    std::fputs(suite_table(result).c_str(), stdout);
    all_pass = all_pass && result.pass;
    for (auto& r : result.records) records.push_back(std::move(r));
  }
  if (!out.empty()) {
    fs::create_directories(out);
    write_text_file(out + "/records.csv", records_csv(records));
  }
  return all_pass ? 0 : 1;
}

int cmd_naive_debate(const ExperimentConfig& cfg, std::size_t runs) {
  auto f = make_fixture(cfg.fixture, cfg.seed);
  require(f.interval.has_value(), "naive-debate expects the interval fixture");
  auto obf = obfuscating_prover(*f.interval);
  for (const Bits& x : f.world->inputs) {
    const double exact = naive_debate_flaw_probability(*f.world, *f.dec, *obf, x);
    std::size_t found = 0;
    for (std::size_t i = 0; i < runs; ++i) {
      auto selector = uniform_random_selector(cfg.seed + i);
      if (run_naive_recursive_debate(*f.world, *f.dec, *obf, selector, x).flaw_found) ++found;
    }
    std::printf("x=%s exact flaw prob %s, empirical %.6f over %zu runs\n", x.c_str(),
                format_double(exact).c_str(), static_cast<double>(found) / runs, runs);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prover-estimator debate simulator and verification harness"};
  app.require_subcommand(1);

  std::string config_path, mode, out_dir, prover_name = "honest", suite = "all";
  std::uint64_t seed = 0;
  std::size_t n = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--seed", seed, "64-bit seed");
    cmd->add_option("--mode", mode, "exact|mc")->check(CLI::IsMember({"exact", "mc"}));
    cmd->add_option("--n", n, "monte-carlo run count");
    cmd->add_option("--out", out_dir, "output directory");
  };

  auto* run = app.add_subcommand("run-debate", "run debates on a fixture and write transcripts");
  add_common(run);
  std::string fixture;
  run->add_option("--fixture", fixture, "fixture name");
  double eps_override = 0.0;
  run->add_option("--epsilon", eps_override, "epsilon override");

  auto* build = app.add_subcommand("build-estimator", "construct the OGD estimator for a prover");
  add_common(build);
  build->add_option("--fixture", fixture, "fixture name");
  build->add_option("--prover", prover_name, "prover name from the fixture pool");
  double delta_opt = 0.0, eta_opt = 0.0;
  build->add_option("--delta", delta_opt, "indistinguishability delta");
  build->add_option("--eta", eta_opt, "soundness slack eta (delta = eta/(2d+1))");

  auto* stab = app.add_subcommand("check-stability", "stability check for a gate-with-majorities");
  std::string logic = "and";
  int w = 1, kappa = 1;
  std::vector<double> probs;
  double eps_arg = 0.1, rho_arg = 0.5;
  stab->add_option("--logic", logic, "and|or")->check(CLI::IsMember({"and", "or"}));
  stab->add_option("--w", w, "logic fan-in");
  stab->add_option("--kappa", kappa, "majority fan-in");
  stab->add_option("--p", probs, "reference probabilities (w*kappa values)")->required();
  stab->add_option("--epsilon", eps_arg, "perturbation radius");
  stab->add_option("--rho", rho_arg, "stability factor");
  stab->add_option("--out", out_dir, "output file");

  auto* transform = app.add_subcommand("stable-transform", "build the majority-vote transform");
  add_common(transform);
  int tw = 1, tkappa = 0, td = 2, tseeds = 2;
  double tflip = 0.003125;
  transform->add_option("--w", tw, "logic fan-in");
  transform->add_option("--kappa", tkappa, "majority fan-in (0 = kappa_for)");
  transform->add_option("--depth", td, "schedule depth");
  transform->add_option("--flip-prob", tflip, "evidence flip probability");
  transform->add_option("--seeds", tseeds, "r seeds per input");
  transform->add_option("--epsilon", eps_override, "epsilon");

  auto* equil = app.add_subcommand("equilibrium", "payoff matrix + Stackelberg enumeration");
  add_common(equil);
  equil->add_option("--fixture", fixture, "fixture name");
  double alpha_opt = 0.0;
  equil->add_option("--alpha", alpha_opt, "approximation slack");
  equil->add_option("--delta", delta_opt, "OGD delta");

  auto* rep = app.add_subcommand("reproduce", "run a verification suite");
  rep->add_option("suite", suite, "completeness|soundness|stackelberg|stability|ogd|obfuscation|all");
  rep->add_option("--seed", seed, "64-bit seed");
  rep->add_option("--out", out_dir, "records output directory");

  auto* naive = app.add_subcommand("naive-debate", "naive recursive debate baseline");
  add_common(naive);
  naive->add_option("--fixture", fixture, "fixture name");
  std::size_t naive_runs = 1000;
  naive->add_option("--runs", naive_runs, "empirical runs per input");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = load_config(config_path, seed, mode, n, out_dir);
    if (!fixture.empty()) cfg.fixture = fixture;
    if (eps_override != 0.0) cfg.epsilon = eps_override;
    if (delta_opt != 0.0) cfg.delta = delta_opt;
    if (eta_opt != 0.0) cfg.eta = eta_opt;
    if (alpha_opt != 0.0) cfg.alpha = alpha_opt;
    cfg.validate();

    if (run->parsed()) return cmd_run_debate(cfg);
    if (build->parsed()) return cmd_build_estimator(cfg, prover_name);
    if (stab->parsed()) return cmd_check_stability(logic, w, kappa, probs, eps_arg, rho_arg, out_dir);
    if (transform->parsed()) return cmd_stable_transform(cfg, tw, tkappa, td, tflip, tseeds);
    if (equil->parsed()) return cmd_equilibrium(cfg);
    if (rep->parsed()) return cmd_reproduce(suite, seed, out_dir);
    if (naive->parsed()) return cmd_naive_debate(cfg, naive_runs);
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  }
  return 0;
}
