#include "pedebate/indistinguishability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace pedebate {

namespace {

std::string hexf(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

}  // namespace

std::string RoundContext::key() const {
  std::string k = is_init ? "I|" : "R|";
  k += x;
  k += '|';
  k += parent.encode();
  k += '|';
  for (const auto& c : children) {
    k += c.encode();
    k += ';';
  }
  k += "|p=";
  k += hexf(parent_p);
  k += "|pi=";
  k += hexf(p_initial);
  k += "|k=";
  k += std::to_string(level);
  return k;
}

void RoundDistribution::validate() const {
  require(support.size() == weight.size(), "round distribution shape mismatch");
  double total = pairwise_sum(weight);
  require(std::fabs(total - 1.0) <= 1e-12,
          "round distribution sums to " + format_double(total));
}

const std::vector<double>* OutcomeModel::find(const std::string& key) const {
  auto it = index.find(key);
  if (it == index.end()) return nullptr;
  return &rows[static_cast<std::size_t>(it->second)];
}

OutcomeModel OutcomeModel::uniform(const RoundDistribution& mu, int q) {
  OutcomeModel m;
  m.outcome_width = q;
  const std::size_t zs = m.z_size();
  m.rows.assign(mu.support.size(), std::vector<double>(zs, 1.0 / static_cast<double>(zs)));
  for (std::size_t i = 0; i < mu.support.size(); ++i)
    m.index[mu.support[i].key()] = static_cast<int>(i);
  return m;
}

double conditional_from_row(std::span<const double> row, int q, int zidx, int i,
                            std::atomic<std::uint64_t>* fallbacks) {
  const int mask = (1 << i) - 1;
  const int prefix = zidx & mask;
  double num = 0.0, den = 0.0;
  const int zs = 1 << q;
  for (int z = 0; z < zs; ++z) {
    if ((z & mask) != prefix) continue;
    den += row[static_cast<std::size_t>(z)];
    if ((z >> i) & 1) num += row[static_cast<std::size_t>(z)];
  }
  if (den <= 0.0) {
    if (fallbacks) fallbacks->fetch_add(1, std::memory_order_relaxed);
    return 0.5;  // off-support prefix; never reached by the sampler
  }
  return num / den;
}

double advantage(const TestFunction& f, const OutcomeModel& h, const OutcomeModel& g,
                 const RoundDistribution& mu) {
  require(h.rows.size() == mu.support.size() && g.rows.size() == mu.support.size(),
          "advantage: model support mismatch");
  const std::size_t zs = h.z_size();
  std::vector<double> values(zs, 0.0);
  std::vector<double> terms;
  terms.reserve(mu.support.size());
  for (std::size_t i = 0; i < mu.support.size(); ++i) {
    f.fill(mu.support[i], h.rows[i], values);
    double local = 0.0;
    for (std::size_t z = 0; z < zs; ++z) local += (g.rows[i][z] - h.rows[i][z]) * values[z];
    terms.push_back(mu.weight[i] * local);
  }
  return pairwise_sum(terms);
}

double OGDConfig::resolved_grad_bound(std::size_t z_size) const {
  return grad_bound > 0.0 ? grad_bound : 2.0 * std::sqrt(static_cast<double>(z_size));
}

std::uint64_t OGDConfig::resolved_max_iters(std::size_t z_size) const {
  if (max_iters > 0) return max_iters;
  const double cap = std::ceil(36.0 * static_cast<double>(z_size) / (delta * delta));
  return static_cast<std::uint64_t>(cap);
}

double OgdResult::average_loss() const {
  if (iterations == 0) return 0.0;
  return sum_abs_adv / static_cast<double>(iterations);
}

std::vector<double> project_to_simplex(std::span<const double> v) {
  require(!v.empty(), "project_to_simplex: empty vector");
  std::vector<double> out(v.begin(), v.end());
  std::vector<double> scratch(v.size());
  project_to_simplex_inplace(out, scratch);
  return out;
}

void project_to_simplex_inplace(std::span<double> v, std::span<double> scratch) {
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) scratch[i] = v[i];
  std::sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(n),
            std::greater<double>());
  double cumulative = 0.0;
  double theta = 0.0;
  std::size_t rho = 0;
  bool found = false;
  for (std::size_t j = 0; j < n; ++j) {
    cumulative += scratch[j];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (scratch[j] - candidate > 0.0) {
      rho = j;
      theta = candidate;
      found = true;
    }
  }
  (void)rho;
  if (!found) theta = (cumulative - 1.0) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = std::max(v[i] - theta, 0.0);
}

OgdResult ogd_build(const RoundDistribution& mu, const OutcomeModel& g,
                    const std::vector<TestFunction>& family, const OGDConfig& cfg) {
  mu.validate();
  const std::size_t n = mu.support.size();
  const int q = g.outcome_width;
  const std::size_t zs = static_cast<std::size_t>(1) << q;
  require(g.rows.size() == n, "ogd_build: truth model support mismatch");
  require(cfg.delta > 0.0, "ogd_build: delta must be positive");

  OgdResult res;
  res.h.outcome_width = q;
  res.h.rows.assign(n, std::vector<double>(zs, 1.0 / static_cast<double>(zs)));
  for (std::size_t i = 0; i < n; ++i) res.h.index[mu.support[i].key()] = static_cast<int>(i);
  if (family.empty() || n == 0) return res;

  // Flat copies for the hot loop.
  std::vector<double> h(n * zs, 1.0 / static_cast<double>(zs));
  std::vector<double> gflat(n * zs);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t z = 0; z < zs; ++z) gflat[i * zs + z] = g.rows[i][z];

  const std::size_t nf = family.size();
  // Per-test, per-row value cache. Static tests fill once; dist-dependent
  // rows refill only after their distribution actually changed. Per-row
  // contributions to the advantage are cached the same way.
  std::vector<std::vector<double>> fvalues(nf, std::vector<double>(n * zs, 0.0));
  std::vector<std::vector<double>> contrib(nf, std::vector<double>(n, 0.0));
  std::vector<std::vector<std::uint64_t>> stamp(nf, std::vector<std::uint64_t>(n, 0));
  std::vector<std::uint64_t> row_version(n, 1);

  auto refresh = [&](std::size_t fi, std::size_t i) {
    const std::uint64_t want = row_version[i];
    if (stamp[fi][i] == want) return;
    family[fi].fill(mu.support[i], std::span<const double>(&h[i * zs], zs),
                    std::span<double>(&fvalues[fi][i * zs], zs));
    res.test_evaluations += zs;
    const double* gi = &gflat[i * zs];
    const double* hi = &h[i * zs];
    const double* Fi = &fvalues[fi][i * zs];
    double local = 0.0;
    for (std::size_t z = 0; z < zs; ++z) local += (gi[z] - hi[z]) * Fi[z];
    contrib[fi][i] = mu.weight[i] * local;
    stamp[fi][i] = want;
  };

  const double D = cfg.diameter;
  const double G = cfg.resolved_grad_bound(zs);
  const std::uint64_t cap = cfg.resolved_max_iters(zs);
  std::vector<double> scratch(zs);

  std::uint64_t log_every = 0;
  if (const char* env = std::getenv("PEDEBATE_OGD_LOG")) log_every = std::strtoull(env, nullptr, 10);

  for (std::uint64_t t = 1; t <= cap; ++t) {
    int chosen = -1;
    double adv = 0.0;
    for (std::size_t fi = 0; fi < nf; ++fi) {
      double a = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        refresh(fi, i);
        a += contrib[fi][i];
      }
      if (std::fabs(a) >= cfg.delta) {
        chosen = static_cast<int>(fi);
        adv = a;
        break;
      }
    }
    if (chosen < 0) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t z = 0; z < zs; ++z) res.h.rows[i][z] = h[i * zs + z];
      return res;
    }

    const double eta = D / (G * std::sqrt(static_cast<double>(t)));
    const double step = eta * (adv > 0.0 ? 1.0 : -1.0);
    const double* F = fvalues[static_cast<std::size_t>(chosen)].data();
    for (std::size_t i = 0; i < n; ++i) {
      double* hi = &h[i * zs];
      const double* Fi = &F[i * zs];
      bool touched = false;
      for (std::size_t z = 0; z < zs; ++z) {
        if (Fi[z] != 0.0) {
          hi[z] += step * Fi[z];
          touched = true;
        }
      }
      if (touched) {
        project_to_simplex_inplace(std::span<double>(hi, zs), scratch);
        ++row_version[i];
#ifndef NDEBUG
        double total = 0.0;
        for (std::size_t z = 0; z < zs; ++z) {
          total += hi[z];
          require(hi[z] >= 0.0, "ogd: negative mass after projection");
        }
        require(std::fabs(total - 1.0) <= 1e-9, "ogd: row left the simplex");
#endif
      }
    }

    res.iterations = t;
    res.sum_abs_adv += std::fabs(adv);
    if (log_every && t % log_every == 0)
      std::fprintf(stderr, "[ogd] t=%llu test=%s adv=%.3e eta=%.3e\n",
                   static_cast<unsigned long long>(t),
                   family[static_cast<std::size_t>(chosen)].label.c_str(), adv, eta);
    if (cfg.record_trace) {
      if (res.trace.size() < cfg.trace_cap)
        res.trace.push_back(TraceStep{t, chosen, adv, eta});
      else
        res.trace_complete = false;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t z = 0; z < zs; ++z) res.h.rows[i][z] = h[i * zs + z];
  throw ogd_bound_error("ogd_build: iteration bound exhausted (" + std::to_string(cap) +
                            "); regret guarantee violated",
                        std::move(res));
}

// ---------------------------------------------------------------------------
// Canonical soundness family

namespace {

// Lazily cached per-row prover claim.
struct ClaimCache {
  const ProverStrategy* prover;
  std::vector<int> cache;
  int get(const RoundContext& ctx) {
    const std::size_t id = static_cast<std::size_t>(ctx.row_id);
    if (cache.size() <= id) cache.resize(id + 1, -1);
    if (cache[id] < 0) cache[id] = prover->claim(ctx.x);
    return cache[id];
  }
};

}  // namespace

std::vector<TestFunction> canonical_family(const ProverStrategy& A, const Decomposition& dec,
                                           const ProblemWorld& world,
                                           const ProtocolParams& params, int level) {
  const ProverStrategy* prover = &A;
  const Decomposition* decp = &dec;
  const ProblemWorld* worldp = &world;
  const int d = params.depth;
  std::vector<TestFunction> fam;

  if (level == d + 1) {
    // r_init(x, z-hat) = r^{d+1} * 1(z-hat = A(x))
    {
      TestFunction f;
      f.label = "r_init";
      f.depends_on_dist = false;
      const double rpow = params.reward_pow(d + 1);
      auto claims = std::make_shared<ClaimCache>(ClaimCache{prover, {}});
      f.fill = [claims, rpow](const RoundContext& ctx, std::span<const double>,
                              std::span<double> out) {
        const int c = claims->get(ctx);
        out[0] = (c == 0) ? rpow : 0.0;
        out[1] = (c == 1) ? rpow : 0.0;
      };
      fam.push_back(std::move(f));
    }
    // consistency at the top: r^d * A^d(x, x, p_d) * z-hat
    {
      TestFunction f;
      f.label = "f_consistency_init";
      f.depends_on_dist = true;
      const double rpow = params.reward_pow(d);
      const double eps = params.epsilon;
      auto claims = std::make_shared<ClaimCache>(ClaimCache{prover, {}});
      f.fill = [claims, prover, rpow, eps, d](const RoundContext& ctx,
                                              std::span<const double> dist,
                                              std::span<double> out) {
        RoundView view;
        view.x = ctx.x;
        view.parent = ctx.parent;
        view.level = d;
        view.p = dist[1];
        view.p_initial = dist[1];
        view.initial_claim = claims->get(ctx);
        view.epsilon = eps;
        const double c = rpow * static_cast<double>(prover->direction(view));
        out[0] = 0.0;
        out[1] = c;
      };
      fam.push_back(std::move(f));
    }
    return fam;
  }

  require(level >= 1 && level <= d, "canonical_family: level out of range");
  const int q = params.width;
  const std::size_t zs = static_cast<std::size_t>(1) << q;

  // r_k(x-vec, z) = r^k * A^k(x, y-hat, p_k) * (M_D(x, y, z) - p_k)
  {
    TestFunction f;
    f.label = "r_" + std::to_string(level);
    f.depends_on_dist = false;
    const double rpow = params.reward_pow(level);
    const double eps = params.epsilon;
    auto claims = std::make_shared<ClaimCache>(ClaimCache{prover, {}});
    f.fill = [claims, prover, decp, rpow, eps, level, zs, q](const RoundContext& ctx,
                                                             std::span<const double>,
                                                             std::span<double> out) {
      RoundView view;
      view.x = ctx.x;
      view.parent = ctx.parent;
      view.level = level;
      view.p = ctx.parent_p;
      view.p_initial = ctx.p_initial;
      view.initial_claim = claims->get(ctx);
      view.epsilon = eps;
      const double dir = static_cast<double>(prover->direction(view));
      std::vector<int> z(static_cast<std::size_t>(q));
      for (std::size_t zi = 0; zi < zs; ++zi) {
        for (int i = 0; i < q; ++i) z[static_cast<std::size_t>(i)] = z_bit(static_cast<int>(zi), i);
        const int m = decp->eval_aggregator(ctx.x, ctx.children, z);
        out[zi] = rpow * dir * (static_cast<double>(m) - ctx.parent_p);
      }
    };
    fam.push_back(std::move(f));
  }

  // f_k(x-vec, z, h) = r^{k-1} * A^{k-1}(x, y_j, p_{k-1}) * z_j with j and
  // p_{k-1} reconstructed from the prover's recursion choice and h's
  // conditionals.
  {
    TestFunction f;
    f.label = "f_consistency_" + std::to_string(level);
    f.depends_on_dist = true;
    const double rpow = params.reward_pow(level - 1);
    const double eps = params.epsilon;
    auto claims = std::make_shared<ClaimCache>(ClaimCache{prover, {}});
    f.fill = [claims, prover, rpow, eps, level, zs, q](const RoundContext& ctx,
                                                       std::span<const double> dist,
                                                       std::span<double> out) {
      std::vector<int> z(static_cast<std::size_t>(q));
      std::vector<double> conds(static_cast<std::size_t>(q));
      for (std::size_t zi = 0; zi < zs; ++zi) {
        for (int i = 0; i < q; ++i) z[static_cast<std::size_t>(i)] = z_bit(static_cast<int>(zi), i);
        for (int i = 0; i < q; ++i)
          conds[static_cast<std::size_t>(i)] =
              conditional_from_row(dist, q, static_cast<int>(zi), i, nullptr);
        const int j = prover->choose_recursion(ctx.x, ctx.children, conds, z);
        RoundView view;
        view.x = ctx.x;
        view.parent = ctx.children[static_cast<std::size_t>(j)];
        view.level = level - 1;
        view.p = conds[static_cast<std::size_t>(j)];
        view.p_initial = ctx.p_initial;
        view.initial_claim = claims->get(ctx);
        view.epsilon = eps;
        const double dir = static_cast<double>(prover->direction(view));
        out[zi] = rpow * dir * static_cast<double>(z[static_cast<std::size_t>(j)]);
      }
    };
    fam.push_back(std::move(f));
  }

  // The terminal reward is a function of the last sampled round: the prover
  // recurses to a leaf, produces its proof bits with no context, and the
  // judge answers. Testing it here is what bounds r_0 in the proof.
  if (level == 1) {
    TestFunction f;
    f.label = "r_0";
    f.depends_on_dist = true;
    const double eps = params.epsilon;
    auto claims = std::make_shared<ClaimCache>(ClaimCache{prover, {}});
    f.fill = [claims, prover, decp, worldp, eps, zs, q](const RoundContext& ctx,
                                                        std::span<const double> dist,
                                                        std::span<double> out) {
      std::vector<int> z(static_cast<std::size_t>(q));
      std::vector<double> conds(static_cast<std::size_t>(q));
      for (std::size_t zi = 0; zi < zs; ++zi) {
        for (int i = 0; i < q; ++i) z[static_cast<std::size_t>(i)] = z_bit(static_cast<int>(zi), i);
        for (int i = 0; i < q; ++i)
          conds[static_cast<std::size_t>(i)] =
              conditional_from_row(dist, q, static_cast<int>(zi), i, nullptr);
        const int j = prover->choose_recursion(ctx.x, ctx.children, conds, z);
        const Query& leaf = ctx.children[static_cast<std::size_t>(j)];
        RoundView view;
        view.x = ctx.x;
        view.parent = leaf;
        view.level = 0;
        view.p = conds[static_cast<std::size_t>(j)];
        view.p_initial = ctx.p_initial;
        view.initial_claim = claims->get(ctx);
        view.epsilon = eps;
        const double dir = static_cast<double>(prover->direction(view));
        const Bits claimed = prover->proof_bits(ctx.x, leaf);
        const int ans =
            worldp->oracle.lookup(oracle_key(ctx.x, decp->base_subset(leaf), claimed));
        out[zi] = dir * (static_cast<double>(ans) - conds[static_cast<std::size_t>(j)]);
      }
    };
    fam.push_back(std::move(f));
  }

  // Scan order: the gate-structured consistency members reach exact zero
  // advantage in finitely many steps (direction gates close, vertices
  // saturate); the reward members then grind their small-scale residuals
  // without being kicked. The reverse order stalls: the reward member
  // hovers at the threshold and starves the consistency pushes.
  std::stable_sort(fam.begin(), fam.end(), [](const TestFunction& a, const TestFunction& b) {
    auto rank = [](const TestFunction& f) {
      if (f.label.rfind("f_consistency", 0) == 0) return 0;
      if (f.label == "r_0") return 1;
      return 2;
    };
    return rank(a) < rank(b);
  });
  return fam;
}

std::vector<TestFunction> enriched_round_family(const ProverStrategy& A, const Decomposition& dec,
                                                const ProblemWorld& world,
                                                const ProtocolParams& params, int level,
                                                std::size_t rows) {
  auto fam = canonical_family(A, dec, world, params, level);
  // Per-context restrictions of the consistency members (a hardwired
  // context indicator is a trivial circuit, so these stay inside the
  // proof's test class). They remove the cross-context cancellation that
  // mu-averaged advantages allow, and their direction gates make every
  // advantage vanish exactly once the context's conditionals sit within
  // epsilon of the prover's story, so the loop terminates at coarse
  // resolution. The round-reward members stay mu-averaged only, exactly
  // as the soundness accounting consumes them.
  std::vector<TestFunction> ordered;
  for (const auto& member : fam) {
    // Refined copies come before their base: once every context settles
    // (gates closed or vertices saturated, advantage exactly zero), the
    // mu-average is zero as well instead of creeping at the threshold.
    if (member.label.rfind("f_consistency", 0) == 0 || member.label == "r_0") {
      for (std::size_t row = 0; row < rows; ++row) {
        TestFunction f;
        f.label = member.label + "@" + std::to_string(row);
        f.depends_on_dist = member.depends_on_dist;
        auto inner = member.fill;
        f.fill = [inner, row](const RoundContext& ctx, std::span<const double> dist,
                              std::span<double> out) {
          if (ctx.row_id != static_cast<int>(row)) {
            std::fill(out.begin(), out.end(), 0.0);
            return;
          }
          inner(ctx, dist, out);
        };
        ordered.push_back(std::move(f));
      }
    }
    ordered.push_back(member);
  }
  return ordered;
}

// ---------------------------------------------------------------------------
// Lemma A.2 estimator construction

namespace {

class OgdEstimator final : public EstimatorStrategy {
 public:
  OgdEstimator(std::string name, int depth, int width, OutcomeModel init_model,
               std::vector<OutcomeModel> round_models, std::shared_ptr<OgdEstimatorAudit> audit)
      : name_(std::move(name)),
        depth_(depth),
        width_(width),
        init_model_(std::move(init_model)),
        round_models_(std::move(round_models)),
        audit_(std::move(audit)) {}

  std::string name() const override { return name_; }

  double initial(const Bits& x) const override {
    RoundContext ctx;
    ctx.x = x;
    ctx.parent = Query{depth_, {}, x};
    ctx.level = depth_ + 1;
    ctx.is_init = true;
    const auto* row = init_model_.find(ctx.key());
    if (!row) {
      audit_->context_misses++;
      return 0.5;
    }
    return (*row)[1];
  }

  double conditional(const EstimatorView& v) const override {
    require(v.level >= 1 && v.level <= depth_, "ogd estimator: level out of range");
    RoundContext ctx;
    ctx.x = v.x;
    ctx.parent = v.parent;
    ctx.children = v.children;
    ctx.parent_p = v.parent_p;
    ctx.p_initial = v.p_initial;
    ctx.level = v.level;
    const OutcomeModel& model = round_models_[static_cast<std::size_t>(depth_ - v.level)];
    const auto* row = model.find(ctx.key());
    if (!row) {
      audit_->context_misses++;
      return 0.5;  // uniform row's conditional
    }
    int zidx = 0;
    for (std::size_t i = 0; i < v.z_prefix.size(); ++i)
      if (v.z_prefix[i]) zidx |= 1 << i;
    return conditional_from_row(*row, width_, zidx, v.index, &fallbacks_);
  }

  std::uint64_t fallbacks() const { return fallbacks_.load(); }

 private:
  std::string name_;
  int depth_;
  int width_;
  OutcomeModel init_model_;
  std::vector<OutcomeModel> round_models_;  // index 0 = level d, ..., back = level 1
  std::shared_ptr<OgdEstimatorAudit> audit_;
  mutable std::atomic<std::uint64_t> fallbacks_{0};
};

}  // namespace

BuiltEstimator build_ogd_estimator(const ProblemWorld& world, const Decomposition& dec,
                                   const ProverPtr& A, const ProtocolParams& params, double delta,
                                   const OGDConfig& base_cfg, FamilyMode mode) {
  OGDConfig cfg = base_cfg;
  cfg.delta = delta;
  cfg.trace_cap = std::min<std::size_t>(cfg.trace_cap, 4096);  // window only
  const int d = params.depth;
  const int q = params.width;
  auto audit = std::make_shared<OgdEstimatorAudit>();
  BuiltEstimator out;

  // Init level: contexts are the inputs themselves, Z = {0,1}.
  RoundDistribution mu_init;
  for (const Bits& x : world.inputs) {
    RoundContext ctx;
    ctx.x = x;
    ctx.parent = dec.root(x);
    ctx.level = d + 1;
    ctx.is_init = true;
    ctx.row_id = static_cast<int>(mu_init.support.size());
    mu_init.support.push_back(std::move(ctx));
    mu_init.weight.push_back(world.mu(x));
  }
  OutcomeModel g_init;
  g_init.outcome_width = 1;
  for (std::size_t i = 0; i < mu_init.support.size(); ++i) {
    std::vector<double> row(2, 0.0);
    row[static_cast<std::size_t>(world.label(mu_init.support[i].x))] = 1.0;
    g_init.rows.push_back(std::move(row));
    g_init.index[mu_init.support[i].key()] = static_cast<int>(i);
  }
  auto fam_init = canonical_family(*A, dec, world, params, d + 1);
  OgdResult init_res = ogd_build(mu_init, g_init, fam_init, cfg);
  audit->iterations_per_level.push_back(init_res.iterations);
  audit->total_test_evaluations += init_res.test_evaluations;

  // Frontier of weighted contexts for the next level down.
  struct Carried {
    RoundContext ctx;
    double weight;
  };
  std::vector<Carried> frontier;
  for (std::size_t i = 0; i < mu_init.support.size(); ++i) {
    const Bits& x = mu_init.support[i].x;
    const double p_init = init_res.h.rows[i][1];
    RoundContext ctx;
    ctx.x = x;
    ctx.parent = dec.root(x);
    ctx.children = A->decompose(x, ctx.parent, d);
    ctx.parent_p = p_init;
    ctx.p_initial = p_init;
    ctx.level = d;
    frontier.push_back(Carried{std::move(ctx), world.mu(x)});
  }

  std::vector<OutcomeModel> round_models;
  std::vector<OgdResult> level_results;
  level_results.push_back(std::move(init_res));

  for (int k = d; k >= 1; --k) {
    // Merge the frontier into an exact round distribution.
    RoundDistribution mu_k;
    std::unordered_map<std::string, int> seen;
    for (auto& c : frontier) {
      const std::string key = c.ctx.key();
      auto it = seen.find(key);
      if (it == seen.end()) {
        c.ctx.row_id = static_cast<int>(mu_k.support.size());
        seen.emplace(key, c.ctx.row_id);
        mu_k.support.push_back(c.ctx);
        mu_k.weight.push_back(c.weight);
      } else {
        mu_k.weight[static_cast<std::size_t>(it->second)] += c.weight;
      }
    }

    OutcomeModel g_k;
    g_k.outcome_width = q;
    const std::size_t zs = static_cast<std::size_t>(1) << q;
    for (std::size_t i = 0; i < mu_k.support.size(); ++i) {
      const auto& ctx = mu_k.support[i];
      int zstar = 0;
      for (int c = 0; c < q; ++c)
        if (dec.truth(ctx.x, ctx.children[static_cast<std::size_t>(c)])) zstar |= 1 << c;
      std::vector<double> row(zs, 0.0);
      row[static_cast<std::size_t>(zstar)] = 1.0;
      g_k.rows.push_back(std::move(row));
      g_k.index[ctx.key()] = static_cast<int>(i);
    }

    auto fam = mode == FamilyMode::enriched
                   ? enriched_round_family(*A, dec, world, params, k, mu_k.support.size())
                   : canonical_family(*A, dec, world, params, k);
    OgdResult res = ogd_build(mu_k, g_k, fam, cfg);
    audit->iterations_per_level.push_back(res.iterations);
    audit->total_test_evaluations += res.test_evaluations;

    // Expand to level k-1 by pushing every positive-probability outcome
    // through the prover's recursion choice.
    if (k > 1) {
      std::vector<Carried> next;
      std::vector<double> conds(static_cast<std::size_t>(q));
      std::vector<int> z(static_cast<std::size_t>(q));
      for (std::size_t i = 0; i < mu_k.support.size(); ++i) {
        const auto& ctx = mu_k.support[i];
        const auto& row = res.h.rows[i];
        for (std::size_t zi = 0; zi < zs; ++zi) {
          double prob = 1.0;
          for (int c = 0; c < q; ++c) {
            z[static_cast<std::size_t>(c)] = z_bit(static_cast<int>(zi), c);
            conds[static_cast<std::size_t>(c)] =
                conditional_from_row(row, q, static_cast<int>(zi), c, nullptr);
            prob *= z[static_cast<std::size_t>(c)] ? conds[static_cast<std::size_t>(c)]
                                                   : 1.0 - conds[static_cast<std::size_t>(c)];
          }
          if (prob <= 0.0) continue;
          const int j = A->choose_recursion(ctx.x, ctx.children, conds, z);
          RoundContext down;
          down.x = ctx.x;
          down.parent = ctx.children[static_cast<std::size_t>(j)];
          down.children = A->decompose(ctx.x, down.parent, k - 1);
          down.parent_p = conds[static_cast<std::size_t>(j)];
          down.p_initial = ctx.p_initial;
          down.level = k - 1;
          next.push_back(Carried{std::move(down), mu_k.weight[i] * prob});
        }
      }
      frontier = std::move(next);
    }

    round_models.push_back(res.h);
    level_results.push_back(std::move(res));
  }

  std::string name = "ogd(" + A->name() + ",delta=" + format_double(delta) + ")";
  out.estimator = std::make_shared<OgdEstimator>(std::move(name), d, q,
                                                 level_results.front().h, round_models, audit);
  out.audit = audit;
  out.levels = std::move(level_results);
  return out;
}

std::vector<BuiltEstimator> build_ogd_estimators(const ProblemWorld& world,
                                                 const Decomposition& dec,
                                                 const std::vector<ProverPtr>& provers,
                                                 const ProtocolParams& params, double delta,
                                                 const OGDConfig& base_cfg, FamilyMode mode) {
  std::vector<BuiltEstimator> out(provers.size());
  std::atomic<std::size_t> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  auto run = [&]() {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= provers.size()) return;
      try {
        out[i] = build_ogd_estimator(world, dec, provers[i], params, delta, base_cfg, mode);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_lock);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned workers = worker_count(provers.size());
  if (workers <= 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace pedebate
