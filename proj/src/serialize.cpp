#include "pedebate/serialize.hpp"

#include <fstream>

namespace pedebate {

namespace {

json query_to_json(const Query& q) {
  return json{{"level", q.level}, {"path", q.path}, {"payload", q.payload}};
}

}  // namespace

json world_to_json(const ProblemWorld& world) {
  json j;
  j["inputs"] = world.inputs;
  json labels = json::object(), proofs = json::object(), dist = json::object();
  for (const Bits& x : world.inputs) {
    labels[x] = world.label(x);
    proofs[x] = world.proof(x);
    dist[x] = format_double(world.mu(x));
  }
  j["labels"] = labels;
  j["implicit_proofs"] = proofs;
  j["distribution"] = dist;
  json oracle;
  oracle["query_width"] = world.oracle.query_width();
  json entries = json::object();
  for (const auto& [key, ans] : world.oracle.entries()) entries[key] = ans;
  oracle["entries"] = entries;
  j["oracle"] = oracle;
  return j;
}

ProblemWorld world_from_json(const json& j) {
  ProblemWorld w;
  w.inputs = j.at("inputs").get<std::vector<Bits>>();
  for (const Bits& x : w.inputs) {
    w.labels[x] = j.at("labels").at(x).get<int>();
    w.implicit_proofs[x] = j.at("implicit_proofs").at(x).get<Bits>();
    w.distribution[x] = parse_double(j.at("distribution").at(x).get<std::string>());
  }
  w.oracle = OracleTable(j.at("oracle").at("query_width").get<int>());
  for (const auto& [key, ans] : j.at("oracle").at("entries").items())
    w.oracle.register_entry(key, ans.get<int>());
  w.validate();
  return w;
}

json decomposition_to_json(const Decomposition& dec) {
  json j;
  j["name"] = dec.name();
  const auto& s = dec.schedule();
  j["schedule"] = {{"depth", s.depth},
                   {"width", s.width},
                   {"poly_exponent", s.poly_exponent}};
  json subsets = json::object();
  for (const auto& [leaf, subset] : s.base_subsets) subsets[leaf] = subset;
  j["schedule"]["base_subsets"] = subsets;
  if (dec.aggregator_spec()) {
    const auto& spec = *dec.aggregator_spec();
    j["aggregator"] = {{"logic", spec.logic == AggregatorSpec::Gate::And ? "and" : "or"},
                       {"group_count", spec.group_count},
                       {"group_size", spec.group_size}};
  }
  return j;
}

Decomposition decomposition_from_json(const json& j, const ProblemWorld& world) {
  const std::string name = j.at("name").get<std::string>();
  const auto& sched = j.at("schedule");
  const int depth = sched.at("depth").get<int>();
  const int width = sched.at("width").get<int>();
  if (name == "and_tree") {
    int transcript_len = 1;
    for (int i = 0; i < depth; ++i) transcript_len *= width;
    return build_and_tree(world, transcript_len);
  }
  if (name == "interval") {
    std::vector<std::uint64_t> numbers;
    std::vector<double> mu;
    for (const Bits& x : world.inputs) {
      std::uint64_t n = 0;
      for (char c : x) n = (n << 1) | static_cast<std::uint64_t>(c == '1');
      numbers.push_back(n);
      mu.push_back(world.mu(x));
    }
    auto fixture = make_interval_fixture(numbers, mu, width, depth);
    return *fixture.dec;
  }
  throw contract_error("decomposition kind '" + name + "' is not reconstructible from JSON");
}

json debate_run_to_json(const DebateRun& run) {
  json j;
  j["input"] = run.input;
  j["seed"] = run.seed;
  j["initial"] = {{"claim", run.initial_claim},
                  {"prob", format_double(run.initial_prob)},
                  {"sample", run.initial_sample},
                  {"reward", format_double(run.initial_reward)}};
  json rounds = json::array();
  for (const auto& r : run.rounds) {
    json rd;
    rd["level"] = r.level;
    rd["parent"] = query_to_json(r.parent);
    rd["parent_prob"] = format_double(r.parent_prob);
    rd["direction"] = r.direction;
    json children = json::array(), probs = json::array();
    for (const auto& c : r.child_queries) children.push_back(query_to_json(c));
    for (double p : r.child_probs) probs.push_back(format_double(p));
    rd["children"] = children;
    rd["child_probs"] = probs;
    rd["sampled_answers"] = r.sampled_answers;
    rd["aggregator_value"] = r.aggregator_value;
    rd["reward"] = format_double(r.reward);
    rd["recursion_index"] = r.recursion_index + 1;  // 1-based in files
    rounds.push_back(std::move(rd));
  }
  j["rounds"] = rounds;
  j["terminal"] = {{"leaf", query_to_json(run.terminal.leaf)},
                   {"subset", run.terminal.subset},
                   {"claimed_bits", run.terminal.claimed_bits},
                   {"oracle_answer", run.terminal.oracle_answer},
                   {"p0", format_double(run.terminal.p0)},
                   {"direction", run.terminal.direction},
                   {"reward", format_double(run.terminal.reward)}};
  j["total_payoff"] = format_double(run.total_payoff);
  j["estimator_payoff"] = format_double(-run.total_payoff);  // zero-sum
  j["clamp_warning"] = run.clamp_warning;
  return j;
}

std::string debate_run_csv_header() {
  return "input,seed,total_payoff,initial_reward,round_rewards,terminal_reward";
}

std::string debate_run_csv_row(const DebateRun& run) {
  std::string row = run.input + "," + std::to_string(run.seed) + "," +
                    format_double(run.total_payoff) + "," + format_double(run.initial_reward) +
                    ",";
  for (std::size_t i = 0; i < run.rounds.size(); ++i) {
    if (i) row += ';';
    row += format_double(run.rounds[i].reward);
  }
  row += "," + format_double(run.terminal.reward);
  return row;
}

json circuit_to_json(const LayeredCircuit& circuit) {
  json gates = json::array();
  for (const auto& g : circuit.gates) {
    const char* kind = "input";
    switch (g.kind) {
      case CircuitGate::Kind::Input: kind = "input"; break;
      case CircuitGate::Kind::And: kind = "and"; break;
      case CircuitGate::Kind::Or: kind = "or"; break;
      case CircuitGate::Kind::Maj: kind = "maj"; break;
    }
    gates.push_back(json{{"kind", kind}, {"layer", g.layer}, {"fan_in", g.fan_in}});
  }
  return json{{"gates", gates}, {"output", circuit.output}, {"depth", circuit.depth}};
}

json stability_report_to_json(const StabilityReport& report) {
  json witness = json::array();
  for (double v : report.witness) witness.push_back(format_double(v));
  return json{{"stable", report.stable},
              {"worst_gap", format_double(report.worst_gap)},
              {"threshold", format_double(report.threshold)},
              {"witness", witness},
              {"method", report.method},
              {"aggregator", report.aggregator}};
}

std::string stability_report_csv_header() {
  return "aggregator,method,stable,worst_gap,threshold";
}

std::string stability_report_csv_row(const StabilityReport& report) {
  return report.aggregator + "," + report.method + "," + (report.stable ? "1" : "0") + "," +
         format_double(report.worst_gap) + "," + format_double(report.threshold);
}

json outcome_model_to_json(const OutcomeModel& model) {
  json rows = json::array();
  for (const auto& row : model.rows) {
    json r = json::array();
    for (double v : row) r.push_back(format_double(v));
    rows.push_back(std::move(r));
  }
  json index = json::object();
  for (const auto& [key, id] : model.index) index[key] = id;
  return json{{"outcome_width", model.outcome_width}, {"rows", rows}, {"index", index}};
}

std::string trace_csv(const OgdResult& result, const std::vector<TestFunction>& family) {
  std::string out = "t,test,adv,eta\n";
  for (const auto& step : result.trace) {
    out += std::to_string(step.t) + "," +
           family[static_cast<std::size_t>(step.test)].label + "," + format_double(step.adv) +
           "," + format_double(step.eta) + "\n";
  }
  return out;
}

json payoff_matrix_to_json(const PayoffMatrix& matrix) {
  json values = json::array();
  for (const auto& row : matrix.values) {
    json r = json::array();
    for (double v : row) r.push_back(format_double(v));
    values.push_back(std::move(r));
  }
  return json{{"provers", matrix.provers}, {"estimators", matrix.estimators}, {"values", values}};
}

std::string payoff_matrix_csv(const PayoffMatrix& matrix) {
  std::string out = "prover";
  for (const auto& e : matrix.estimators) out += "," + e;
  out += "\n";
  for (std::size_t r = 0; r < matrix.provers.size(); ++r) {
    out += matrix.provers[r];
    for (double v : matrix.values[r]) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

json equilibria_to_json(const PayoffMatrix& matrix,
                        const std::vector<StackelbergResult>& results) {
  json arr = json::array();
  for (const auto& res : results) {
    json fm = json::array();
    for (std::size_t r = 0; r < res.follower_map.size(); ++r)
      fm.push_back(matrix.estimators[static_cast<std::size_t>(res.follower_map[r])]);
    arr.push_back(json{{"alpha", format_double(res.alpha)},
                       {"leader", matrix.provers[static_cast<std::size_t>(res.leader_choice)]},
                       {"follower_map", fm},
                       {"leader_value", format_double(res.leader_value)}});
  }
  return arr;
}

std::string equilibria_csv(const PayoffMatrix& matrix,
                           const std::vector<StackelbergResult>& results) {
  std::string out = "leader,leader_value,alpha,follower_map\n";
  for (const auto& res : results) {
    out += matrix.provers[static_cast<std::size_t>(res.leader_choice)] + "," +
           format_double(res.leader_value) + "," + format_double(res.alpha) + ",";
    for (std::size_t r = 0; r < res.follower_map.size(); ++r) {
      if (r) out += ';';
      out += matrix.estimators[static_cast<std::size_t>(res.follower_map[r])];
    }
    out += "\n";
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open " + path + " for writing");
  out << contents;
  require(out.good(), "failed writing " + path);
}

}  // namespace pedebate
