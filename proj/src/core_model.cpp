#include "pedebate/core_model.hpp"

#include <algorithm>
#include <cmath>

#include "pedebate/strategies.hpp"

namespace pedebate {

std::string Query::encode() const {
  std::string s = "L" + std::to_string(level) + "/P";
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(path[i]);
  }
  s += '/';
  s += payload;
  return s;
}

void OracleTable::register_entry(const std::string& key, int answer) {
  require(answer == 0 || answer == 1, "oracle answer must be a bit");
  require(static_cast<int>(key.size()) <= query_width_,
          "oracle key exceeds query width: " + key);
  entries_[key] = answer;
}

int OracleTable::lookup(const std::string& key) const {
  auto it = entries_.find(key);
  require(it != entries_.end(), "unregistered oracle query: " + key);
  return it->second;
}

std::string oracle_key(const Bits& x, std::span<const int> subset, const Bits& claimed_bits) {
  std::string key = "x=" + x + "|S=";
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (i) key += ',';
    key += std::to_string(subset[i]);
  }
  key += "|u=" + claimed_bits;
  return key;
}

int ProblemWorld::label(const Bits& x) const {
  auto it = labels.find(x);
  require(it != labels.end(), "no label for input " + x);
  return it->second;
}

const Bits& ProblemWorld::proof(const Bits& x) const {
  auto it = implicit_proofs.find(x);
  require(it != implicit_proofs.end(), "no implicit proof for input " + x);
  return it->second;
}

double ProblemWorld::mu(const Bits& x) const {
  auto it = distribution.find(x);
  require(it != distribution.end(), "no probability for input " + x);
  return it->second;
}

void ProblemWorld::validate() const {
  double total = 0.0;
  std::vector<double> probs;
  probs.reserve(inputs.size());
  for (const Bits& x : inputs) {
    double p = mu(x);
    require(p >= 0.0, "negative probability for " + x);
    probs.push_back(p);
    label(x);
    proof(x);
  }
  total = pairwise_sum(probs);
  require(std::fabs(total - 1.0) <= 1e-12, "distribution sums to " + format_double(total));
}

int AggregatorSpec::eval(std::span<const int> z) const {
  require(static_cast<int>(z.size()) == width(), "aggregator width mismatch");
  int acc = (logic == Gate::And) ? 1 : 0;
  for (int gse = 0; gse < group_count; ++gse) {
    int ones = 0;
    for (int j = 0; j < group_size; ++j) ones += z[static_cast<std::size_t>(gse * group_size + j)];
    const int vote = (2 * ones > group_size) ? 1 : 0;
    if (logic == Gate::And)
      acc &= vote;
    else
      acc |= vote;
  }
  return acc;
}

std::string AggregatorSpec::describe() const {
  std::string s = (logic == Gate::And) ? "and" : "or";
  s += "(w=" + std::to_string(group_count) + ",maj=" + std::to_string(group_size) + ")";
  return s;
}

Decomposition::Decomposition(std::string name, DecompositionSchedule schedule,
                             Aggregator aggregator, QueryGen query_gen, Truth truth,
                             std::optional<AggregatorSpec> spec, bool memoize)
    : name_(std::move(name)),
      schedule_(std::move(schedule)),
      aggregator_(std::move(aggregator)),
      query_gen_(std::move(query_gen)),
      truth_(std::move(truth)),
      spec_(spec),
      memoize_(memoize),
      memo_lock_(std::make_shared<std::mutex>()) {
  double qd = std::pow(static_cast<double>(schedule_.width), schedule_.depth);
  require(schedule_.depth >= 1 && schedule_.width >= 1, "schedule needs d >= 1, q >= 1");
  (void)qd;
}

Query Decomposition::root(const Bits& x) const {
  return Query{schedule_.depth, {}, x};
}

std::vector<Query> Decomposition::children(const Bits& x, const Query& parent, int level) const {
  auto ys = query_gen_(x, parent, level);
  require(static_cast<int>(ys.size()) == schedule_.width, "query_gen width mismatch");
  return ys;
}

int Decomposition::eval_aggregator(const Bits& x, const std::vector<Query>& y,
                                   std::span<const int> z) const {
  require(static_cast<int>(y.size()) == schedule_.width &&
              static_cast<int>(z.size()) == schedule_.width,
          "eval_aggregator: |y| and |z| must equal q");
  return aggregator_(x, y, z);
}

int Decomposition::truth(const Bits& x, const Query& q) const {
  if (!memoize_) {
    const int v = truth_(x, q);
    require(v == 0 || v == 1, "truth must be a bit");
    return v;
  }
  const std::string key = x + "#" + q.encode();
  {
    std::lock_guard<std::mutex> lock(*memo_lock_);
    auto it = g_memo_.find(key);
    if (it != g_memo_.end()) return it->second;
  }
  int v = truth_(x, q);
  require(v == 0 || v == 1, "truth must be a bit");
  std::lock_guard<std::mutex> lock(*memo_lock_);
  g_memo_.emplace(key, v);
  return v;
}

const std::vector<int>& Decomposition::base_subset(const Query& leaf) const {
  auto it = schedule_.base_subsets.find(leaf.encode());
  require(it != schedule_.base_subsets.end(), "no base subset for leaf " + leaf.encode());
  return it->second;
}

namespace {

Bits subset_bits(const Bits& u, const std::vector<int>& subset) {
  Bits out;
  out.reserve(subset.size());
  for (int j : subset) {
    require(j >= 1 && j <= static_cast<int>(u.size()), "subset index out of range");
    out += u[static_cast<std::size_t>(j - 1)];
  }
  return out;
}

}  // namespace

void Decomposition::check_consistency(const ProblemWorld& world) const {
  for (const Bits& x : world.inputs) {
    const Query r = root(x);
    require(truth(x, r) == world.label(x), "top level: g(x,x) != L(x) at " + x);
    // depth-first over the honest tree
    std::vector<Query> stack{r};
    while (!stack.empty()) {
      Query cur = stack.back();
      stack.pop_back();
      if (cur.is_leaf()) {
        const auto& subset = base_subset(cur);
        const Bits content = subset_bits(world.proof(x), subset);
        const int oracle_ans = world.oracle.lookup(oracle_key(x, subset, content));
        require(truth(x, cur) == oracle_ans, "leaf inconsistency at " + cur.encode());
        continue;
      }
      auto ys = children(x, cur, cur.level);
      std::vector<int> zs(ys.size());
      for (std::size_t i = 0; i < ys.size(); ++i) {
        require(ys[i].level == cur.level - 1, "child level mismatch");
        zs[i] = truth(x, ys[i]);
        stack.push_back(ys[i]);
      }
      require(eval_aggregator(x, ys, zs) == truth(x, cur),
              "recursion inconsistency at " + cur.encode());
    }
  }
}

ProblemWorld make_transcript_world(const std::vector<Bits>& inputs,
                                   const std::vector<Bits>& supplied,
                                   const std::vector<Bits>& reference,
                                   const std::vector<double>& mu) {
  require(inputs.size() == supplied.size() && inputs.size() == reference.size() &&
              inputs.size() == mu.size(),
          "make_transcript_world: mismatched fixture arrays");
  ProblemWorld w;
  w.inputs = inputs;
  int width = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    require(is_bits(supplied[i]) && is_bits(reference[i]), "transcripts must be bit-strings");
    require(supplied[i].size() == reference[i].size(), "transcript length mismatch");
    w.implicit_proofs[inputs[i]] = supplied[i];
    w.distribution[inputs[i]] = mu[i];
    int label = 1;
    for (std::size_t j = 0; j < supplied[i].size(); ++j)
      if (supplied[i][j] != reference[i][j]) label = 0;
    w.labels[inputs[i]] = label;
    width = std::max(width, static_cast<int>(inputs[i].size()) + 64);
  }
  w.oracle = OracleTable(width);
  // Step j is correct iff the supplied bit matches the reference bit. Both
  // claimed contents are registered; the judge checks the claim against the
  // reference, so a lie about u_j flips the oracle answer.
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (std::size_t j = 0; j < reference[i].size(); ++j) {
      const std::vector<int> subset{static_cast<int>(j) + 1};
      for (int b = 0; b <= 1; ++b) {
        const Bits claimed(1, b ? '1' : '0');
        const int ans = (claimed[0] == reference[i][j]) ? 1 : 0;
        w.oracle.register_entry(oracle_key(inputs[i], subset, claimed), ans);
      }
    }
  }
  w.validate();
  return w;
}

Decomposition build_and_tree(const ProblemWorld& world, int transcript_len) {
  require(transcript_len >= 2 && (transcript_len & (transcript_len - 1)) == 0,
          "transcript length must be a power of two >= 2");
  int depth = 0;
  for (int t = transcript_len; t > 1; t >>= 1) ++depth;

  DecompositionSchedule sched;
  sched.depth = depth;
  sched.width = 2;
  sched.poly_exponent = 1;

  // payload: "a:b" = steps [a, b) asserted correct (1-based a, exclusive b)
  auto span_payload = [](int a, int b) { return std::to_string(a) + ":" + std::to_string(b); };
  auto parse_payload = [](const std::string& p) {
    auto colon = p.find(':');
    require(colon != std::string::npos, "bad and-tree payload " + p);
    return std::pair<int, int>{std::stoi(p.substr(0, colon)), std::stoi(p.substr(colon + 1))};
  };

  // enumerate leaves to register base subsets
  for (int i = 0; i < transcript_len; ++i) {
    std::vector<int> path;
    int lo = 0, hi = transcript_len;
    for (int k = depth; k > 0; --k) {
      int mid = (lo + hi) / 2;
      if (i < mid) {
        path.push_back(0);
        hi = mid;
      } else {
        path.push_back(1);
        lo = mid;
      }
    }
    Query leaf{0, path, span_payload(i + 1, i + 2)};
    sched.base_subsets[leaf.encode()] = {i + 1};
  }

  auto query_gen = [span_payload, parse_payload, transcript_len, depth](
                       const Bits& x, const Query& parent, int level) {
    (void)x;
    auto [a, b] = parent.level == depth ? std::pair<int, int>{1, transcript_len + 1}
                                        : parse_payload(parent.payload);
    require(level == parent.level, "query_gen called off-level");
    const int mid = (a + b) / 2;
    std::vector<Query> out;
    Query left{parent.level - 1, parent.path, span_payload(a, mid)};
    left.path.push_back(0);
    Query right{parent.level - 1, parent.path, span_payload(mid, b)};
    right.path.push_back(1);
    out.push_back(std::move(left));
    out.push_back(std::move(right));
    return out;
  };

  auto aggregator = [](const Bits&, const std::vector<Query>&, std::span<const int> z) {
    int acc = 1;
    for (int v : z) acc &= v;
    return acc;
  };

  auto truth = [&world, parse_payload, transcript_len, depth](const Bits& x, const Query& q) {
    auto [a, b] = q.level == depth ? std::pair<int, int>{1, transcript_len + 1}
                                   : parse_payload(q.payload);
    const Bits& u = world.proof(x);
    int acc = 1;
    for (int j = a; j < b; ++j) {
      const std::vector<int> subset{j};
      const Bits content(1, u[static_cast<std::size_t>(j - 1)]);
      acc &= world.oracle.lookup(oracle_key(x, subset, content));
    }
    return acc;
  };

  AggregatorSpec spec;
  spec.logic = AggregatorSpec::Gate::And;
  spec.group_count = 2;
  spec.group_size = 1;

  return Decomposition("and_tree", std::move(sched), aggregator, query_gen, truth, spec);
}

ProvabilityReport check_a_provable(const Decomposition& dec, const ProverStrategy& A,
                                   const ProblemWorld& world) {
  ProvabilityReport report;
  std::vector<double> failing;
  for (const Bits& x : world.inputs) {
    bool ok = true;
    std::string witness;
    if (A.claim(x) != world.label(x)) {
      ok = false;
      witness = "claim";
    }
    std::vector<Query> stack{dec.root(x)};
    while (ok && !stack.empty()) {
      Query cur = stack.back();
      stack.pop_back();
      if (A.answer(x, cur) != dec.truth(x, cur)) {
        ok = false;
        witness = cur.encode();
        break;
      }
      if (cur.is_leaf()) {
        const auto& subset = dec.base_subset(cur);
        const Bits claimed = A.proof_bits(x, cur);
        require(claimed.size() == subset.size(), "proof_bits width mismatch");
        const Bits truth_bits = [&] {
          Bits out;
          for (int j : subset) out += world.proof(x)[static_cast<std::size_t>(j - 1)];
          return out;
        }();
        if (claimed != truth_bits) {
          ok = false;
          witness = cur.encode() + " (proof bits)";
        }
        continue;
      }
      for (auto& c : dec.children(x, cur, cur.level)) stack.push_back(std::move(c));
    }
    if (!ok) {
      failing.push_back(world.mu(x));
      if (report.witnesses.size() < 16) report.witnesses.emplace_back(x, witness);
    }
  }
  report.failure_prob = failing.empty() ? 0.0 : pairwise_sum(failing);
  report.holds = failing.empty();
  return report;
}

}  // namespace pedebate
