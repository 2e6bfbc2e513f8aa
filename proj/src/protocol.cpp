#include "pedebate/protocol.hpp"

#include <algorithm>
#include <cmath>

namespace pedebate {

ProtocolParams ProtocolParams::make(double epsilon, double rho, int depth, int width,
                                    std::uint64_t seed) {
  require(epsilon > 0.0 && epsilon < 0.5, "epsilon must lie in (0, 1/2)");
  require(rho > 0.0 && rho < 1.0, "rho must lie in (0, 1)");
  require(depth >= 1 && width >= 1, "depth and width must be positive");
  ProtocolParams p;
  p.epsilon = epsilon;
  p.rho = rho;
  p.depth = depth;
  p.width = width;
  p.reward_ratio = 0.25 * epsilon * (1.0 - rho);
  require(p.reward_ratio <= 0.25, "reward ratio exceeds 1/4");
  p.seed = seed;
  return p;
}

double ProtocolParams::reward_pow(int k) const {
  double v = 1.0;
  for (int i = 0; i < k; ++i) v *= reward_ratio;
  return v;
}

namespace {

double clamp_prob(double p, bool* warned) {
  if (p < 0.0) {
    if (warned) *warned = true;
    return 0.0;
  }
  if (p > 1.0) {
    if (warned) *warned = true;
    return 1.0;
  }
  return p;
}

int checked_direction(const ProverStrategy& A, const RoundView& view) {
  const int dir = A.direction(view);
  require(dir >= -1 && dir <= 1, "prover direction outside {-1,0,1}");
  return dir;
}

struct TerminalEval {
  TerminalRecord record;
};

TerminalEval eval_terminal(const ProblemWorld& world, const Decomposition& dec,
                           const ProverStrategy& A, const Bits& x, const Query& leaf, double p0,
                           const RoundView& base_view) {
  TerminalEval out;
  RoundView view = base_view;
  view.parent = leaf;
  view.level = 0;
  view.p = p0;
  const int dir = checked_direction(A, view);
  const auto& subset = dec.base_subset(leaf);
  // Evaluated with no other debate context: a function of (x, leaf) alone.
  const Bits claimed = A.proof_bits(x, leaf);
  require(claimed.size() == subset.size(), "proof bits width mismatch at terminal round");
  const int oracle_ans = world.oracle.lookup(oracle_key(x, subset, claimed));
  out.record.leaf = leaf;
  out.record.subset = subset;
  out.record.claimed_bits = claimed;
  out.record.oracle_answer = oracle_ans;
  out.record.p0 = p0;
  out.record.direction = dir;
  out.record.reward = dir * (static_cast<double>(oracle_ans) - p0);
  return out;
}

}  // namespace

DebateRun run_debate(const ProblemWorld& world, const Decomposition& dec,
                     const ProverStrategy& A, const EstimatorStrategy& B, const Bits& x,
                     const ProtocolParams& params, CounterRng& rng) {
  require(params.depth == dec.schedule().depth && params.width == dec.schedule().width,
          "params schedule does not match the decomposition");
  DebateRun run;
  run.input = x;
  run.seed = rng.seed();

  run.initial_claim = A.claim(x);
  require(run.initial_claim == 0 || run.initial_claim == 1, "claim must be a bit");
  run.initial_prob = clamp_prob(B.initial(x), &run.clamp_warning);
  run.initial_sample = rng.bernoulli(run.initial_prob);
  run.initial_reward =
      params.reward_pow(params.depth + 1) * (run.initial_sample == run.initial_claim ? 1.0 : 0.0);

  RoundView base_view;
  base_view.x = x;
  base_view.p_initial = run.initial_prob;
  base_view.initial_claim = run.initial_claim;
  base_view.epsilon = params.epsilon;

  Query parent = dec.root(x);
  double p = run.initial_prob;
  std::vector<double> rewards{run.initial_reward};

  for (int k = params.depth; k >= 1; --k) {
    RoundRecord rec;
    rec.level = k;
    rec.parent = parent;
    rec.parent_prob = p;

    RoundView view = base_view;
    view.parent = parent;
    view.level = k;
    view.p = p;
    rec.direction = checked_direction(A, view);

    rec.child_queries = A.decompose(x, parent, k);
    require(static_cast<int>(rec.child_queries.size()) == params.width,
            "prover decomposition width mismatch");

    rec.child_probs.resize(rec.child_queries.size());
    rec.sampled_answers.resize(rec.child_queries.size());
    EstimatorView ev;
    ev.x = x;
    ev.parent = parent;
    ev.children = rec.child_queries;
    ev.level = k;
    ev.parent_p = p;
    ev.p_initial = run.initial_prob;
    if (params.estimator_observes_direction) ev.direction = rec.direction;
    for (std::size_t i = 0; i < rec.child_queries.size(); ++i) {
      ev.index = static_cast<int>(i);
      ev.z_prefix.assign(rec.sampled_answers.begin(),
                         rec.sampled_answers.begin() + static_cast<std::ptrdiff_t>(i));
      const double cp = clamp_prob(B.conditional(ev), &run.clamp_warning);
      rec.child_probs[i] = cp;
      rec.sampled_answers[i] = rng.bernoulli(cp);
    }

    rec.aggregator_value = dec.eval_aggregator(x, rec.child_queries, rec.sampled_answers);
    rec.reward = params.reward_pow(k) * rec.direction *
                 (static_cast<double>(rec.aggregator_value) - p);

    rec.recursion_index =
        A.choose_recursion(x, rec.child_queries, rec.child_probs, rec.sampled_answers);
    require(rec.recursion_index >= 0 &&
                rec.recursion_index < static_cast<int>(rec.child_queries.size()),
            "recursion index out of range");

    parent = rec.child_queries[static_cast<std::size_t>(rec.recursion_index)];
    p = rec.child_probs[static_cast<std::size_t>(rec.recursion_index)];
    rewards.push_back(rec.reward);
    run.rounds.push_back(std::move(rec));
  }

  auto terminal = eval_terminal(world, dec, A, x, parent, p, base_view);
  run.terminal = terminal.record;
  rewards.push_back(run.terminal.reward);
  run.total_payoff = pairwise_sum(rewards);
  return run;
}

namespace {

struct Enumerator {
  const ProblemWorld& world;
  const Decomposition& dec;
  const ProverStrategy& A;
  const EstimatorStrategy& B;
  const ProtocolParams& params;
  Bits x;
  double p_initial = 0.0;
  int initial_claim = 0;
  std::uint64_t branches = 0;

  // Expected downstream reward from a round at (parent, p, level k).
  double descend(const Query& parent, double p, int k, RoundView base_view) {
    if (k == 0) {
      ++branches;
      require(branches <= params.branch_budget,
              "branch budget exceeded; use monte-carlo mode");
      return eval_terminal(world, dec, A, x, parent, p, base_view).record.reward;
    }
    RoundView view = base_view;
    view.parent = parent;
    view.level = k;
    view.p = p;
    const int dir = checked_direction(A, view);
    const auto children = A.decompose(x, parent, k);
    require(static_cast<int>(children.size()) == params.width,
            "prover decomposition width mismatch");
    const std::size_t q = children.size();
    const double rk = params.reward_pow(k);

    std::vector<double> acc;
    acc.reserve(static_cast<std::size_t>(1) << q);
    std::vector<int> z(q, 0);
    std::vector<double> conds(q, 0.0);

    EstimatorView ev;
    ev.x = x;
    ev.parent = parent;
    ev.children = children;
    ev.level = k;
    ev.parent_p = p;
    ev.p_initial = p_initial;
    if (params.estimator_observes_direction) ev.direction = dir;

    const auto total = static_cast<std::uint64_t>(1) << q;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      double prob = 1.0;
      for (std::size_t i = 0; i < q; ++i) {
        z[i] = static_cast<int>((mask >> i) & 1u);
      }
      for (std::size_t i = 0; i < q; ++i) {
        ev.index = static_cast<int>(i);
        ev.z_prefix.assign(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(i));
        const double cp = clamp_prob(B.conditional(ev), nullptr);
        conds[i] = cp;
        prob *= z[i] ? cp : (1.0 - cp);
      }
      if (prob == 0.0) {
        ++branches;
        continue;
      }
      const int agg = dec.eval_aggregator(x, children, z);
      const double reward = rk * dir * (static_cast<double>(agg) - p);
      const int j = A.choose_recursion(x, children, conds, z);
      require(j >= 0 && j < static_cast<int>(q), "recursion index out of range");
      const double down =
          descend(children[static_cast<std::size_t>(j)], conds[static_cast<std::size_t>(j)],
                  k - 1, base_view);
      acc.push_back(prob * (reward + down));
    }
    return pairwise_sum(acc);
  }
};

}  // namespace

double expected_payoff_x(const ProblemWorld& world, const Decomposition& dec,
                         const ProverStrategy& A, const EstimatorStrategy& B, const Bits& x,
                         const ProtocolParams& params) {
  require(params.depth == dec.schedule().depth && params.width == dec.schedule().width,
          "params schedule does not match the decomposition");
  // budget precondition: 2 * (2^q)^d branches for this input
  const double per_x = 2.0 * std::pow(std::pow(2.0, params.width), params.depth);
  require(per_x <= static_cast<double>(params.branch_budget),
          "branch budget exceeded; use monte-carlo mode");

  Enumerator en{world, dec, A, B, params, x};
  en.initial_claim = A.claim(x);
  bool warned = false;
  en.p_initial = clamp_prob(B.initial(x), &warned);

  RoundView base_view;
  base_view.x = x;
  base_view.p_initial = en.p_initial;
  base_view.initial_claim = en.initial_claim;
  base_view.epsilon = params.epsilon;

  const double r_init_exp = params.reward_pow(params.depth + 1) *
                            (en.initial_claim == 1 ? en.p_initial : 1.0 - en.p_initial);
  const double rounds_exp = en.descend(dec.root(x), en.p_initial, params.depth, base_view);
  return r_init_exp + rounds_exp;
}

double expected_payoff(const ProblemWorld& world, const Decomposition& dec,
                       const ProverStrategy& A, const EstimatorStrategy& B,
                       const ProtocolParams& params) {
  std::vector<double> terms;
  terms.reserve(world.inputs.size());
  for (const Bits& x : world.inputs)
    terms.push_back(world.mu(x) * expected_payoff_x(world, dec, A, B, x, params));
  return pairwise_sum(terms);
}

double PayoffBreakdown::total() const {
  std::vector<double> parts{init};
  for (double r : rounds) parts.push_back(r);
  parts.push_back(terminal);
  return pairwise_sum(parts);
}

namespace {

struct BreakdownEnumerator {
  const ProblemWorld& world;
  const Decomposition& dec;
  const ProverStrategy& A;
  const EstimatorStrategy& B;
  const ProtocolParams& params;
  Bits x;
  double p_initial = 0.0;
  int initial_claim = 0;
  // weighted reward terms per phase; pairwise-summed at the end
  std::vector<std::vector<double>> round_terms;  // index 0 = level d
  std::vector<double> terminal_terms;

  void descend(const Query& parent, double p, int k, double weight, const RoundView& base_view) {
    if (k == 0) {
      const auto term = eval_terminal(world, dec, A, x, parent, p, base_view);
      terminal_terms.push_back(weight * term.record.reward);
      return;
    }
    RoundView view = base_view;
    view.parent = parent;
    view.level = k;
    view.p = p;
    const int dir = checked_direction(A, view);
    const auto children = A.decompose(x, parent, k);
    const std::size_t q = children.size();
    const double rk = params.reward_pow(k);
    std::vector<int> z(q, 0);
    std::vector<double> conds(q, 0.0);

    EstimatorView ev;
    ev.x = x;
    ev.parent = parent;
    ev.children = children;
    ev.level = k;
    ev.parent_p = p;
    ev.p_initial = p_initial;
    if (params.estimator_observes_direction) ev.direction = dir;

    const auto total = static_cast<std::uint64_t>(1) << q;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      double prob = 1.0;
      for (std::size_t i = 0; i < q; ++i) z[i] = static_cast<int>((mask >> i) & 1u);
      for (std::size_t i = 0; i < q; ++i) {
        ev.index = static_cast<int>(i);
        ev.z_prefix.assign(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(i));
        conds[i] = clamp_prob(B.conditional(ev), nullptr);
        prob *= z[i] ? conds[i] : (1.0 - conds[i]);
      }
      if (prob == 0.0) continue;
      const int agg = dec.eval_aggregator(x, children, z);
      round_terms[static_cast<std::size_t>(params.depth - k)].push_back(
          weight * prob * rk * dir * (static_cast<double>(agg) - p));
      const int j = A.choose_recursion(x, children, conds, z);
      descend(children[static_cast<std::size_t>(j)], conds[static_cast<std::size_t>(j)], k - 1,
              weight * prob, base_view);
    }
  }
};

}  // namespace

PayoffBreakdown expected_payoff_breakdown_x(const ProblemWorld& world, const Decomposition& dec,
                                            const ProverStrategy& A, const EstimatorStrategy& B,
                                            const Bits& x, const ProtocolParams& params) {
  BreakdownEnumerator en{world, dec, A, B, params, x, 0.0, 0, {}, {}};
  en.round_terms.assign(static_cast<std::size_t>(params.depth), {});
  en.initial_claim = A.claim(x);
  en.p_initial = clamp_prob(B.initial(x), nullptr);

  RoundView base_view;
  base_view.x = x;
  base_view.p_initial = en.p_initial;
  base_view.initial_claim = en.initial_claim;
  base_view.epsilon = params.epsilon;

  PayoffBreakdown out;
  out.init = params.reward_pow(params.depth + 1) *
             (en.initial_claim == 1 ? en.p_initial : 1.0 - en.p_initial);
  en.descend(dec.root(x), en.p_initial, params.depth, 1.0, base_view);
  for (auto& terms : en.round_terms) out.rounds.push_back(pairwise_sum(terms));
  out.terminal = pairwise_sum(en.terminal_terms);
  return out;
}

PayoffBreakdown expected_payoff_breakdown(const ProblemWorld& world, const Decomposition& dec,
                                          const ProverStrategy& A, const EstimatorStrategy& B,
                                          const ProtocolParams& params) {
  PayoffBreakdown out;
  out.rounds.assign(static_cast<std::size_t>(params.depth), 0.0);
  std::vector<double> init_terms, term_terms;
  std::vector<std::vector<double>> round_terms(static_cast<std::size_t>(params.depth));
  for (const Bits& x : world.inputs) {
    const auto bx = expected_payoff_breakdown_x(world, dec, A, B, x, params);
    const double w = world.mu(x);
    init_terms.push_back(w * bx.init);
    term_terms.push_back(w * bx.terminal);
    for (std::size_t i = 0; i < bx.rounds.size(); ++i)
      round_terms[i].push_back(w * bx.rounds[i]);
  }
  out.init = pairwise_sum(init_terms);
  out.terminal = pairwise_sum(term_terms);
  for (std::size_t i = 0; i < round_terms.size(); ++i) out.rounds[i] = pairwise_sum(round_terms[i]);
  return out;
}

MonteCarloSummary monte_carlo_payoff(const ProblemWorld& world, const Decomposition& dec,
                                     const ProverStrategy& A, const EstimatorStrategy& B,
                                     const Bits& x, const ProtocolParams& params,
                                     std::size_t runs, std::uint64_t seed) {
  require(runs >= 2, "monte carlo needs at least two runs");
  std::vector<double> payoffs(runs);
  for (std::size_t i = 0; i < runs; ++i) {
    CounterRng rng(seed, i);
    payoffs[i] = run_debate(world, dec, A, B, x, params, rng).total_payoff;
  }
  MonteCarloSummary s;
  s.runs = runs;
  s.mean = pairwise_sum(payoffs) / static_cast<double>(runs);
  std::vector<double> sq(runs);
  for (std::size_t i = 0; i < runs; ++i) sq[i] = (payoffs[i] - s.mean) * (payoffs[i] - s.mean);
  s.stddev = std::sqrt(pairwise_sum(sq) / static_cast<double>(runs - 1));
  s.half_width_3sigma = 3.0 * s.stddev / std::sqrt(static_cast<double>(runs));
  return s;
}

NaiveOutcome run_naive_recursive_debate(const ProblemWorld& world, const Decomposition& dec,
                                        const ProverStrategy& A, const ChildSelector& select,
                                        const Bits& x) {
  NaiveOutcome out;
  Query cur = dec.root(x);
  for (int k = dec.schedule().depth; k >= 1; --k) {
    const auto children = A.decompose(x, cur, k);
    const int pick = select(x, cur, children, k);
    require(pick >= 0 && pick < static_cast<int>(children.size()),
            "selector index out of range");
    cur = children[static_cast<std::size_t>(pick)];
    out.path.push_back(cur);
  }
  // At the leaf the judge answers the query directly.
  const auto& subset = dec.base_subset(cur);
  const Bits claimed = A.proof_bits(x, cur);
  const int oracle_ans = world.oracle.lookup(oracle_key(x, subset, claimed));
  out.flaw_found = (A.answer(x, cur) != oracle_ans);
  return out;
}

ChildSelector uniform_random_selector(std::uint64_t seed) {
  auto rng = std::make_shared<CounterRng>(seed, 0xabcdef);
  return [rng](const Bits&, const Query&, const std::vector<Query>& children, int) {
    return static_cast<int>(rng->next_u64() % children.size());
  };
}

namespace {

double naive_flaw_mass(const ProblemWorld& world, const Decomposition& dec,
                       const ProverStrategy& A, const Bits& x, const Query& cur, int level) {
  if (level == 0) {
    const auto& subset = dec.base_subset(cur);
    const Bits claimed = A.proof_bits(x, cur);
    const int oracle_ans = world.oracle.lookup(oracle_key(x, subset, claimed));
    return (A.answer(x, cur) != oracle_ans) ? 1.0 : 0.0;
  }
  const auto children = A.decompose(x, cur, level);
  std::vector<double> parts;
  parts.reserve(children.size());
  for (const auto& c : children)
    parts.push_back(naive_flaw_mass(world, dec, A, x, c, level - 1));
  return pairwise_sum(parts) / static_cast<double>(children.size());
}

}  // namespace

double naive_debate_flaw_probability(const ProblemWorld& world, const Decomposition& dec,
                                     const ProverStrategy& A, const Bits& x) {
  return naive_flaw_mass(world, dec, A, x, dec.root(x), dec.schedule().depth);
}

}  // namespace pedebate
