#include "pedebate/stability.hpp"

#include <algorithm>
#include <cmath>

#include "pedebate/rng.hpp"

namespace pedebate {

int EvidenceModel::evidence_answer(int truth_bit, int base_index, int copy_index,
                                   std::uint64_t r) const {
  std::uint64_t h = hash_combine(r, 0x5eedULL);
  h = hash_combine(h, static_cast<std::uint64_t>(base_index) + 1);
  if (independent) h = hash_combine(h, static_cast<std::uint64_t>(copy_index) + 0x9001);
  const int flip = unit_from_hash(h) < flip_prob ? 1 : 0;
  return truth_bit ^ flip;
}

void EvidenceModel::validate() const {
  require(support >= 1, "evidence support must be >= 1");
  require(flip_prob >= 0.0 && flip_prob < 0.5, "flip probability must lie in [0, 1/2)");
}

bool EvidenceModel::certified_regime(double epsilon, int n_bits) const {
  return flip_prob <= epsilon / (4.0 * static_cast<double>(n_bits));
}

int LayeredCircuit::eval(std::span<const int> inputs) const {
  require(inputs.size() == input_count(), "circuit input width mismatch");
  std::vector<int> value(gates.size(), 0);
  std::size_t next_input = 0;
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const auto& gate = gates[i];
    switch (gate.kind) {
      case CircuitGate::Kind::Input:
        value[i] = inputs[next_input++];
        break;
      case CircuitGate::Kind::And: {
        int acc = 1;
        for (int f : gate.fan_in) acc &= value[static_cast<std::size_t>(f)];
        value[i] = acc;
        break;
      }
      case CircuitGate::Kind::Or: {
        int acc = 0;
        for (int f : gate.fan_in) acc |= value[static_cast<std::size_t>(f)];
        value[i] = acc;
        break;
      }
      case CircuitGate::Kind::Maj: {
        int ones = 0;
        for (int f : gate.fan_in) ones += value[static_cast<std::size_t>(f)];
        value[i] = 2 * ones > static_cast<int>(gate.fan_in.size()) ? 1 : 0;
        break;
      }
    }
  }
  return value[static_cast<std::size_t>(output)];
}

void LayeredCircuit::validate() const {
  require(output >= 0 && output < static_cast<int>(gates.size()), "bad output gate");
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const auto& gate = gates[i];
    if (gate.kind == CircuitGate::Kind::Maj)
      require(gate.fan_in.size() % 2 == 1, "majority fan-in must be odd");
    for (int f : gate.fan_in) {
      require(f >= 0 && f < static_cast<int>(i), "wiring must respect gate order");
      require(gates[static_cast<std::size_t>(f)].layer < gate.layer,
              "wiring must respect layer order");
    }
  }
}

std::size_t LayeredCircuit::input_count() const {
  std::size_t n = 0;
  for (const auto& gate : gates)
    if (gate.kind == CircuitGate::Kind::Input) ++n;
  return n;
}

namespace {

double acceptance_probability(const AggregatorFn& aggregator, int q,
                              std::span<const double> probs) {
  const int zs = 1 << q;
  std::vector<int> z(static_cast<std::size_t>(q));
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(zs));
  for (int mask = 0; mask < zs; ++mask) {
    double pr = 1.0;
    for (int i = 0; i < q; ++i) {
      z[static_cast<std::size_t>(i)] = (mask >> i) & 1;
      pr *= z[static_cast<std::size_t>(i)] ? probs[static_cast<std::size_t>(i)]
                                           : 1.0 - probs[static_cast<std::size_t>(i)];
    }
    if (pr == 0.0) continue;
    if (aggregator(z)) terms.push_back(pr);
  }
  return terms.empty() ? 0.0 : pairwise_sum(terms);
}

std::vector<double> perturbed(std::span<const double> p, std::span<const double> delta) {
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    out[i] = std::clamp(p[i] + delta[i], 0.0, 1.0);
  return out;
}

}  // namespace

StabilityReport check_stability(const AggregatorFn& aggregator, int q, std::span<const double> p,
                                double epsilon, double rho, const StabilityOptions& opts) {
  require(q >= 1 && q <= 20, "check_stability: q must lie in [1, 20]");
  require(static_cast<int>(p.size()) == q, "check_stability: |p| != q");
  StabilityReport report;
  report.threshold = rho * epsilon;
  if (epsilon == 0.0) {
    // the open perturbation ball is empty
    report.stable = true;
    report.method = "extreme-points";
    report.witness.assign(p.begin(), p.end());
    return report;
  }

  const double base = acceptance_probability(aggregator, q, p);
  auto consider = [&](const std::vector<double>& qprobs) {
    const double gap = std::fabs(base - acceptance_probability(aggregator, q, qprobs));
    if (gap > report.worst_gap) {
      report.worst_gap = gap;
      report.witness = qprobs;
    }
  };

  if (opts.monotone) {
    // Acceptance probability is monotone in every conditional for a
    // monotone aggregator, so the two uniform extremes are exact.
    report.method = "extreme-points";
    std::vector<double> delta(static_cast<std::size_t>(q), -epsilon);
    consider(perturbed(p, delta));
    std::fill(delta.begin(), delta.end(), epsilon);
    consider(perturbed(p, delta));
  } else if (q <= opts.grid_limit_q) {
    report.method = "grid";
    std::vector<double> delta(static_cast<std::size_t>(q), 0.0);
    std::vector<int> idx(static_cast<std::size_t>(q), 0);
    const double steps[3] = {-epsilon, 0.0, epsilon};
    while (true) {
      for (int i = 0; i < q; ++i) delta[static_cast<std::size_t>(i)] = steps[idx[static_cast<std::size_t>(i)]];
      consider(perturbed(p, delta));
      int carry = 0;
      while (carry < q && ++idx[static_cast<std::size_t>(carry)] == 3) {
        idx[static_cast<std::size_t>(carry)] = 0;
        ++carry;
      }
      if (carry == q) break;
    }
    CounterRng rng(opts.seed, 0x57ab);
    for (int t = 0; t < opts.monte_carlo; ++t) {
      for (int i = 0; i < q; ++i)
        delta[static_cast<std::size_t>(i)] = (2.0 * rng.next_unit() - 1.0) * epsilon;
      consider(perturbed(p, delta));
    }
  } else {
    report.method = "monte-carlo";
    CounterRng rng(opts.seed, 0x57ab);
    std::vector<double> delta(static_cast<std::size_t>(q), 0.0);
    for (int t = 0; t < std::max(opts.monte_carlo, 2048); ++t) {
      for (int i = 0; i < q; ++i)
        delta[static_cast<std::size_t>(i)] = (2.0 * rng.next_unit() - 1.0) * epsilon;
      consider(perturbed(p, delta));
    }
  }

  report.stable = report.worst_gap < report.threshold;
  return report;
}

StabilityReport check_stability(const AggregatorSpec& spec, std::span<const double> p,
                                double epsilon, double rho) {
  StabilityOptions opts;
  opts.monotone = true;  // AND/OR/MAJ compositions are monotone
  auto fn = [&spec](std::span<const int> z) { return spec.eval(z); };
  StabilityReport report = check_stability(fn, spec.width(), p, epsilon, rho, opts);
  report.aggregator = spec.describe();
  return report;
}

int kappa_for(int w, double epsilon) {
  require(w >= 1, "kappa_for: w must be >= 1");
  require(epsilon > 0.0 && epsilon < 1.0 / 3.0, "kappa_for: epsilon must lie in (0, 1/3)");
  const double denom = std::log(1.0 / (6.0 * epsilon * (1.0 - 1.5 * epsilon)));
  require(denom > 0.0, "kappa_for: divergence not positive");
  const double value = 3.0 * std::log(2.0 * static_cast<double>(w) / epsilon) / denom;
  int k = static_cast<int>(std::ceil(value));
  if (k % 2 == 0) ++k;
  while (k <= 3) k += 2;
  return k;
}

namespace {

std::uint64_t ipow(std::uint64_t base, int exp) {
  std::uint64_t v = 1;
  for (int i = 0; i < exp; ++i) v *= base;
  return v;
}

// Exact Pr[Maj_k = 1] for k iid inputs with success probability p.
double majority_probability(int k, double p) {
  double total = 0.0;
  // binomial tail t > k/2
  for (int t = k / 2 + 1; t <= k; ++t) {
    double c = 1.0;
    for (int i = 0; i < t; ++i)
      c = c * static_cast<double>(k - i) / static_cast<double>(i + 1);
    total += c * std::pow(p, t) * std::pow(1.0 - p, k - t);
  }
  return total;
}

}  // namespace

int StableTransform::base_label(int x_index) const {
  const int w = config.w;
  const int d = config.depth;
  const auto& truths = base.base_truths[static_cast<std::size_t>(x_index)];
  // w-ary AND tree over the base bits
  std::vector<int> layer(truths.begin(), truths.end());
  for (int k = 0; k < d; ++k) {
    std::vector<int> up;
    for (std::size_t i = 0; i < layer.size(); i += static_cast<std::size_t>(w)) {
      int acc = 1;
      for (int j = 0; j < w; ++j) acc &= layer[i + static_cast<std::size_t>(j)];
      up.push_back(acc);
    }
    layer = std::move(up);
  }
  return layer[0];
}

int StableTransform::transformed_label(int x_index, std::uint64_t r) const {
  const int w = config.w;
  const int kappa = config.kappa;
  const int d = config.depth;
  const int q = w * kappa;
  const std::uint64_t leaves = ipow(static_cast<std::uint64_t>(q), d);
  std::vector<int> inputs(static_cast<std::size_t>(leaves));
  for (std::uint64_t leaf = 0; leaf < leaves; ++leaf) {
    // Decode the leaf's base query (w-ary digits) and copy (kappa-ary digits).
    std::uint64_t rem = leaf;
    int base_idx = 0, copy_idx = 0;
    for (int lvl = 0; lvl < d; ++lvl) {
      const std::uint64_t stride = ipow(static_cast<std::uint64_t>(q), d - 1 - lvl);
      const int c = static_cast<int>(rem / stride);
      rem %= stride;
      base_idx = base_idx * w + c / kappa;
      copy_idx = copy_idx * kappa + c % kappa;
    }
    const int tb = base.base_truths[static_cast<std::size_t>(x_index)][static_cast<std::size_t>(base_idx)];
    inputs[static_cast<std::size_t>(leaf)] = evidence.evidence_answer(tb, base_idx, copy_idx, r);
  }
  return circuit.eval(inputs);
}

StableTransform stable_transform(const SupportedBaseWorld& base, const EvidenceModel& ev,
                                 const StableTransformConfig& cfg_in) {
  StableTransformConfig cfg = cfg_in;
  require(cfg.w >= 1 && cfg.depth >= 1, "stable transform: need w >= 1, d >= 1");
  if (cfg.kappa == 0) cfg.kappa = kappa_for(cfg.w, cfg.epsilon);
  require(cfg.kappa >= 1 && cfg.kappa % 2 == 1, "stable transform: kappa must be odd");
  ev.validate();

  const int w = cfg.w, kappa = cfg.kappa, d = cfg.depth;
  const int q = w * kappa;
  const std::uint64_t bases = ipow(static_cast<std::uint64_t>(w), d);
  const std::uint64_t s_needed = ipow(static_cast<std::uint64_t>(kappa), d);
  require(static_cast<std::uint64_t>(ev.support) >= s_needed,
          "insufficient evidence support: need s >= kappa^d = " + std::to_string(s_needed));
  require(ev.base_queries.size() >= bases,
          "evidence model must cover all " + std::to_string(bases) + " base queries");
  for (const auto& truths : base.base_truths)
    require(truths.size() == bases, "base truths must list one bit per base query");

  StableTransform tr;
  tr.config = cfg;
  tr.evidence = ev;
  tr.base = base;

  // Build the layered circuit bottom-up: inputs, then alternating majority
  // and logic layers. Gate ids are assigned in evaluation order.
  LayeredCircuit& circ = tr.circuit;
  circ.depth = d;
  const std::uint64_t leaves = ipow(static_cast<std::uint64_t>(q), d);
  std::vector<int> current;  // gate ids of the current level's outputs
  for (std::uint64_t i = 0; i < leaves; ++i) {
    circ.gates.push_back(CircuitGate{CircuitGate::Kind::Input, 0, {}});
    current.push_back(static_cast<int>(circ.gates.size()) - 1);
  }
  int layer = 1;
  for (int lvl = 1; lvl <= d; ++lvl) {
    std::vector<int> majs;
    for (std::size_t i = 0; i < current.size(); i += static_cast<std::size_t>(kappa)) {
      CircuitGate gate{CircuitGate::Kind::Maj, layer, {}};
      for (int j = 0; j < kappa; ++j) gate.fan_in.push_back(current[i + static_cast<std::size_t>(j)]);
      circ.gates.push_back(std::move(gate));
      majs.push_back(static_cast<int>(circ.gates.size()) - 1);
    }
    ++layer;
    std::vector<int> logic;
    for (std::size_t i = 0; i < majs.size(); i += static_cast<std::size_t>(w)) {
      CircuitGate gate{CircuitGate::Kind::And, layer, {}};
      for (int j = 0; j < w; ++j) gate.fan_in.push_back(majs[i + static_cast<std::size_t>(j)]);
      circ.gates.push_back(std::move(gate));
      logic.push_back(static_cast<int>(circ.gates.size()) - 1);
    }
    ++layer;
    current = std::move(logic);
  }
  require(current.size() == 1, "circuit must reduce to a single output");
  circ.output = current[0];
  circ.validate();

  // World': one instance per (x, r seed).
  auto world = std::make_shared<ProblemWorld>();
  std::unordered_map<Bits, std::pair<int, std::uint64_t>> instance_of;
  for (std::size_t xi = 0; xi < base.inputs.size(); ++xi) {
    for (int t = 0; t < cfg.seeds_per_input; ++t) {
      CounterRng rng(cfg.seed_base, hash_combine(xi, static_cast<std::uint64_t>(t)));
      const std::uint64_t r = rng.next_u64();
      const Bits xprime = base.inputs[xi] + bits_from_u64(r, 64);
      tr.instances.emplace_back(static_cast<int>(xi), r);
      instance_of[xprime] = {static_cast<int>(xi), r};
      world->inputs.push_back(xprime);
      world->distribution[xprime] = base.mu[xi] / static_cast<double>(cfg.seeds_per_input);
      world->labels[xprime] = tr.transformed_label(static_cast<int>(xi), r);
      Bits u;
      u.reserve(static_cast<std::size_t>(leaves));
      // evidence answer bits in leaf order form the implicit proof
      std::vector<int> answers(static_cast<std::size_t>(leaves));
      for (std::uint64_t leaf = 0; leaf < leaves; ++leaf) {
        std::uint64_t rem = leaf;
        int base_idx = 0, copy_idx = 0;
        for (int lvl = 0; lvl < d; ++lvl) {
          const std::uint64_t stride = ipow(static_cast<std::uint64_t>(q), d - 1 - lvl);
          const int c = static_cast<int>(rem / stride);
          rem %= stride;
          base_idx = base_idx * w + c / kappa;
          copy_idx = copy_idx * kappa + c % kappa;
        }
        const int tb = base.base_truths[xi][static_cast<std::size_t>(base_idx)];
        answers[static_cast<std::size_t>(leaf)] = ev.evidence_answer(tb, base_idx, copy_idx, r);
        u += answers[static_cast<std::size_t>(leaf)] ? '1' : '0';
      }
      world->implicit_proofs[xprime] = u;
    }
  }
  world->oracle = OracleTable(static_cast<int>(base.inputs[0].size()) + 128);
  for (const Bits& xprime : world->inputs) {
    const Bits& u = world->implicit_proofs[xprime];
    for (std::size_t leaf = 0; leaf < u.size(); ++leaf) {
      const std::vector<int> subset{static_cast<int>(leaf) + 1};
      const int ans = u[leaf] == '1' ? 1 : 0;
      // The judge re-derives the evidence answer; claimed content is moot.
      for (int b = 0; b <= 1; ++b)
        world->oracle.register_entry(oracle_key(xprime, subset, Bits(1, b ? '1' : '0')), ans);
    }
  }
  world->validate();
  tr.world_prime = world;

  // Decomposition over the circuit: one round = logic gate over w
  // majorities, q = w*kappa children per node.
  DecompositionSchedule sched;
  sched.depth = d;
  sched.width = q;
  sched.poly_exponent = cfg.poly_exponent;

  // leaf base subsets
  {
    std::vector<int> path;
    const std::uint64_t total = leaves;
    for (std::uint64_t leaf = 0; leaf < total; ++leaf) {
      path.clear();
      std::uint64_t rem = leaf;
      for (int lvl = 0; lvl < d; ++lvl) {
        const std::uint64_t stride = ipow(static_cast<std::uint64_t>(q), d - 1 - lvl);
        path.push_back(static_cast<int>(rem / stride));
        rem %= stride;
      }
      Query lq{0, path, ""};
      sched.base_subsets[lq.encode()] = {static_cast<int>(leaf) + 1};
    }
  }

  auto query_gen = [q](const Bits&, const Query& parent, int level) {
    require(level == parent.level, "transform query_gen called off-level");
    std::vector<Query> out;
    out.reserve(static_cast<std::size_t>(q));
    for (int c = 0; c < q; ++c) {
      Query child{parent.level - 1, parent.path, ""};
      child.path.push_back(c);
      out.push_back(std::move(child));
    }
    return out;
  };

  AggregatorSpec spec;
  spec.logic = AggregatorSpec::Gate::And;
  spec.group_count = w;
  spec.group_size = kappa;
  auto aggregator = [spec](const Bits&, const std::vector<Query>&, std::span<const int> z) {
    return spec.eval(z);
  };

  // Node truth: the sub-circuit value under the instance's noisy evidence.
  // All values are precomputed per instance, so lookups are pure.
  auto node_values = std::make_shared<std::unordered_map<Bits, std::vector<int>>>();
  auto evidence_copy = ev;
  auto base_copy = std::make_shared<SupportedBaseWorld>(base);
  for (const Bits& xprime : world->inputs) {
    const auto [xi, r] = instance_of[xprime];
    // value per node key: levels d..0, indexed by path
    std::vector<int> values;  // flattened: level-major, path-minor
    // compute leaves then reduce
    std::vector<int> cur(static_cast<std::size_t>(leaves));
    for (std::uint64_t leaf = 0; leaf < leaves; ++leaf) {
      std::uint64_t rem = leaf;
      int base_idx = 0, copy_idx = 0;
      for (int lvl = 0; lvl < d; ++lvl) {
        const std::uint64_t stride = ipow(static_cast<std::uint64_t>(q), d - 1 - lvl);
        const int c = static_cast<int>(rem / stride);
        rem %= stride;
        base_idx = base_idx * w + c / kappa;
        copy_idx = copy_idx * kappa + c % kappa;
      }
      const int tb = base_copy->base_truths[static_cast<std::size_t>(xi)][static_cast<std::size_t>(base_idx)];
      cur[static_cast<std::size_t>(leaf)] = evidence_copy.evidence_answer(tb, base_idx, copy_idx, r);
    }
    // store level 0 first
    std::vector<std::vector<int>> per_level{cur};
    std::vector<int> level_vals = cur;
    for (int lvl = 1; lvl <= d; ++lvl) {
      std::vector<int> up;
      std::vector<int> zbuf(static_cast<std::size_t>(q));
      for (std::size_t i = 0; i < level_vals.size(); i += static_cast<std::size_t>(q)) {
        for (int j = 0; j < q; ++j) zbuf[static_cast<std::size_t>(j)] = level_vals[i + static_cast<std::size_t>(j)];
        up.push_back(spec.eval(zbuf));
      }
      per_level.push_back(up);
      level_vals = std::move(up);
    }
    // flatten: per_level[lvl][path-index]
    for (auto& lv : per_level)
      for (int v : lv) values.push_back(v);
    (*node_values)[xprime] = std::move(values);
  }

  auto truth = [node_values, q, d](const Bits& xprime, const Query& node) {
    auto it = node_values->find(xprime);
    require(it != node_values->end(), "transform truth: unknown instance " + xprime);
    // index: levels 0..d flattened; level lvl has q^(d-lvl) nodes
    const int lvl = node.level;
    std::uint64_t idx = 0;
    for (int c : node.path) idx = idx * static_cast<std::uint64_t>(q) + static_cast<std::uint64_t>(c);
    std::uint64_t offset = 0;
    for (int l = 0; l < lvl; ++l) offset += ipow(static_cast<std::uint64_t>(q), d - l);
    return it->second[static_cast<std::size_t>(offset + idx)];
  };

  tr.dec_prime = std::make_shared<Decomposition>("stable_transform", std::move(sched), aggregator,
                                                 query_gen, truth, spec, /*memoize=*/false);
  tr.dec_prime->check_consistency(*world);
  return tr;
}

TransformCertificate certify_transformed_stability(const StableTransform& tr, double epsilon,
                                                   double rho) {
  require(tr.evidence.independent,
          "stability certification requires independent evidence");
  TransformCertificate cert;
  const int w = tr.config.w, kappa = tr.config.kappa, d = tr.config.depth;
  const int q = w * kappa;
  const double e = tr.evidence.flip_prob;
  AggregatorSpec spec;
  spec.logic = AggregatorSpec::Gate::And;
  spec.group_count = w;
  spec.group_size = kappa;

  // Exact node marginals under the evidence distribution, per input.
  // Children of a node are the next level's logic outputs; all copies in
  // one majority group share a marginal.
  double worst = -1.0, worst_det = -1.0;
  for (std::size_t xi = 0; xi < tr.base.inputs.size(); ++xi) {
    // marginal and noiseless value per (level, base path)
    std::vector<std::vector<double>> marg(static_cast<std::size_t>(d) + 1);
    std::vector<std::vector<int>> clean(static_cast<std::size_t>(d) + 1);
    const auto& truths = tr.base.base_truths[xi];
    marg[0].resize(truths.size());
    clean[0].resize(truths.size());
    for (std::size_t b = 0; b < truths.size(); ++b) {
      clean[0][b] = truths[b];
      marg[0][b] = truths[b] ? 1.0 - e : e;
    }
    for (int lvl = 1; lvl <= d; ++lvl) {
      const std::size_t nodes = marg[static_cast<std::size_t>(lvl - 1)].size() /
                                static_cast<std::size_t>(w);
      marg[static_cast<std::size_t>(lvl)].resize(nodes);
      clean[static_cast<std::size_t>(lvl)].resize(nodes);
      for (std::size_t i = 0; i < nodes; ++i) {
        double acc = 1.0;
        int cacc = 1;
        for (int g = 0; g < w; ++g) {
          const double child = marg[static_cast<std::size_t>(lvl - 1)]
                                   [i * static_cast<std::size_t>(w) + static_cast<std::size_t>(g)];
          acc *= majority_probability(kappa, child);
          cacc &= clean[static_cast<std::size_t>(lvl - 1)]
                       [i * static_cast<std::size_t>(w) + static_cast<std::size_t>(g)];
        }
        marg[static_cast<std::size_t>(lvl)][i] = acc;
        clean[static_cast<std::size_t>(lvl)][i] = cacc;
      }
    }
    // Round at level lvl, node i: children probs = per group g, kappa
    // copies of the level lvl-1 marginal.
    for (int lvl = 1; lvl <= d; ++lvl) {
      for (std::size_t i = 0; i < marg[static_cast<std::size_t>(lvl)].size(); ++i) {
        std::vector<double> probs, det;
        for (int g = 0; g < w; ++g) {
          const std::size_t child = i * static_cast<std::size_t>(w) + static_cast<std::size_t>(g);
          for (int c = 0; c < kappa; ++c) {
            probs.push_back(marg[static_cast<std::size_t>(lvl - 1)][child]);
            det.push_back(static_cast<double>(clean[static_cast<std::size_t>(lvl - 1)][child]));
          }
        }
        auto rep = check_stability(spec, probs, epsilon, rho);
        auto rep_det = check_stability(spec, det, epsilon, rho);
        if (rep.worst_gap > worst) {
          worst = rep.worst_gap;
          cert.worst = rep;
        }
        if (rep_det.worst_gap > worst_det) {
          worst_det = rep_det.worst_gap;
          cert.worst_deterministic = rep_det;
        }
        if (cert.per_round.size() < 64) cert.per_round.push_back(rep);
      }
    }
  }
  (void)q;
  cert.stable = cert.worst.stable;
  return cert;
}

}  // namespace pedebate
