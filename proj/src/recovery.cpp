#include "edgecorr/recovery.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "edgecorr/errors.hpp"
#include "edgecorr/inference.hpp"
#include "edgecorr/rng.hpp"

namespace edgecorr {
namespace {

RecoveryRanking make_ranking(std::string name, std::vector<std::pair<std::size_t, double>> scores) {
  std::sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return RecoveryRanking{std::move(name), std::move(scores), std::nullopt};
}

struct Components {
  explicit Components(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
  std::vector<std::size_t> parent;
};

}  // namespace

std::vector<std::size_t> RecoveryRanking::edges() const {
  std::vector<std::size_t> out;
  out.reserve(scores.size());
  for (const auto& s : scores) out.push_back(s.first);
  return out;
}

std::vector<std::size_t> spanning_tree_cuts(const ExtendedModel& model, std::uint64_t seed) {
  const FactorNetwork& net = model.net;
  const std::size_t nv = net.num_variables();
  Components comps(nv + net.num_factors());
  for (std::size_t f = 0; f < net.num_factors(); ++f)
    for (VarId v : net.factor(f).scope()) comps.unite(nv + f, static_cast<std::size_t>(v));

  // Contract the forced incidences; equivalence edges become a multigraph.
  std::map<std::size_t, std::size_t> node_of;
  auto node = [&](VarId v) {
    const std::size_t root = comps.find(static_cast<std::size_t>(v));
    return node_of.emplace(root, node_of.size()).first->second;
  };
  const auto& edges = model.equiv_edges;
  std::vector<std::pair<std::size_t, std::size_t>> ends(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) ends[e] = {node(edges[e].i), node(edges[e].j)};
  const std::size_t n = node_of.size();
  std::vector<std::vector<std::size_t>> incident(n);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (ends[e].first == ends[e].second) continue;  // self loop: always deleted
    incident[ends[e].first].push_back(e);
    incident[ends[e].second].push_back(e);
  }

  // Wilson's algorithm, one root per connected component.
  std::vector<char> in_tree(n, 0), seen(n, 0);
  for (std::size_t r = 0; r < n; ++r) {
    if (seen[r]) continue;
    in_tree[r] = 1;
    std::vector<std::size_t> stack{r};
    seen[r] = 1;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t e : incident[u]) {
        const std::size_t w = ends[e].first == u ? ends[e].second : ends[e].first;
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
  }
  SplitMix64 rng(seed);
  std::vector<std::size_t> next(n, 0);
  std::vector<char> kept(edges.size(), 0);
  auto other = [&](std::size_t e, std::size_t u) { return ends[e].first == u ? ends[e].second : ends[e].first; };
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t cur = u; !in_tree[cur];) {
      const auto& inc = incident[cur];
      next[cur] = inc[rng.below(inc.size())];
      cur = other(next[cur], cur);
    }
    for (std::size_t cur = u; !in_tree[cur];) {
      in_tree[cur] = 1;
      kept[next[cur]] = 1;
      cur = other(next[cur], cur);
    }
  }
  std::vector<std::size_t> deleted;
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (!kept[e]) deleted.push_back(e);
  return deleted;
}

RecoveryRanking rank_random(const ParametrizedModel& model, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<std::pair<std::size_t, double>> scores;
  for (std::size_t e : model.deleted()) scores.emplace_back(e, rng.uniform());
  RecoveryRanking r = make_ranking("random", std::move(scores));
  r.seed = seed;
  return r;
}

RecoveryRanking rank_mi(const ParametrizedModel& model) {
  std::vector<std::pair<std::size_t, double>> scores;
  for (std::size_t e : model.deleted()) {
    const EquivalenceEdge& ee = model.edge(e);
    const VarId keep[] = {ee.i, ee.j};
    const JointTable joint = marginal(model.net_prime(), keep, &model.order_for(keep));
    scores.emplace_back(e, mutual_information(joint, 1));
  }
  return make_ranking("mi", std::move(scores));
}

RecoveryRanking rank_mi2(const ParametrizedModel& model, const Mi2Config& config) {
  const auto& del = model.deleted();
  const std::size_t n = del.size();
  std::map<std::pair<std::size_t, std::size_t>, double> pair_mi;
  auto mi_of = [&](std::size_t a, std::size_t b) {
    const auto key = std::minmax(a, b);
    auto it = pair_mi.find(key);
    if (it != pair_mi.end()) return it->second;
    const EquivalenceEdge& ea = model.edge(del[a]);
    const EquivalenceEdge& eb = model.edge(del[b]);
    const VarId va[] = {ea.i, ea.j};
    const VarId vb[] = {eb.i, eb.j};
    std::vector<VarId> both(std::begin(va), std::end(va));
    for (VarId v : vb)
      if (std::find(both.begin(), both.end(), v) == both.end()) both.push_back(v);
    const JointTable joint = marginal(model.net_prime(), both, &model.order_for(both));
    const double mi = set_mutual_information(joint, va, vb);
    pair_mi.emplace(key, mi);
    return mi;
  };

  std::vector<std::pair<std::size_t, double>> scores;
  if (n <= config.exact_limit) {
    for (std::size_t a = 0; a < n; ++a) {
      double s = 0.0;
      for (std::size_t b = 0; b < n; ++b)
        if (b != a) s += mi_of(a, b);
      scores.emplace_back(del[a], s);
    }
  } else {
    SplitMix64 rng(config.seed);
    const std::size_t m = std::min(config.sampled_partners, n - 1);
    for (std::size_t a = 0; a < n; ++a) {
      std::vector<std::size_t> others;
      for (std::size_t b = 0; b < n; ++b)
        if (b != a) others.push_back(b);
      rng.shuffle(others);
      double s = 0.0;
      for (std::size_t k = 0; k < m; ++k) s += mi_of(a, others[k]);
      scores.emplace_back(del[a], s * static_cast<double>(n - 1) / static_cast<double>(m));
    }
  }
  RecoveryRanking r = make_ranking("mi2", std::move(scores));
  if (n > config.exact_limit) r.seed = config.seed;
  return r;
}

RecoveryRanking rank_correction_magnitude(const CorrectionReport& report) {
  std::vector<std::pair<std::size_t, double>> scores;
  for (const auto& t : report.terms) scores.emplace_back(t.edge, std::abs(t.log_y));
  return make_ranking("magnitude", std::move(scores));
}

ParametrizedModel recover(const ParametrizedModel& model, std::span<const std::size_t> edges) {
  return model.with_recovered(edges);
}

const HeuristicRegistry& HeuristicRegistry::builtin() {
  static const HeuristicRegistry registry = [] {
    HeuristicRegistry r;
    r.add("random", [](const RankContext& c) { return rank_random(c.model, c.seed); });
    r.add("mi", [](const RankContext& c) { return rank_mi(c.model); });
    r.add("mi2", [](const RankContext& c) { return rank_mi2(c.model, c.mi2); });
    const RankFunction magnitude = [](const RankContext& c) {
      if (!c.report) throw std::invalid_argument("magnitude ranking needs a correction report");
      return rank_correction_magnitude(*c.report);
    };
    r.add("magnitude", magnitude);
    r.add("correction_magnitude", magnitude);
    return r;
  }();
  return registry;
}

void HeuristicRegistry::add(const std::string& name, RankFunction fn) { table_[name] = std::move(fn); }

std::vector<std::string> HeuristicRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, fn] : table_) out.push_back(name);
  return out;
}

RecoveryRanking HeuristicRegistry::rank(const std::string& name, const RankContext& ctx) const {
  auto it = table_.find(name);
  if (it == table_.end()) throw std::invalid_argument("unknown recovery heuristic '" + name + "'");
  return it->second(ctx);
}

namespace {

SweepStep evaluate(ParametrizedModel& model, std::size_t k, const EdbpConfig& cfg,
                   std::chrono::steady_clock::time_point start) {
  SweepStep step;
  step.k = k;
  auto [fixed, conv] = edbp_iterate(std::move(model), cfg);
  model = std::move(fixed);
  step.convergence = conv;
  step.n_deleted = model.deleted().size();
  try {
    step.report = correct(model);
  } catch (const Error&) {
    if (conv.converged) throw;
  }
  step.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return step;
}

}  // namespace

std::vector<SweepStep> recovery_sweep(const FactorNetwork& net, const SweepConfig& config,
                                      const HeuristicRegistry& registry) {
  if (config.k_step < 1) throw std::invalid_argument("k_step must be at least 1");
  if (!registry.contains(config.heuristic))
    throw std::invalid_argument("unknown recovery heuristic '" + config.heuristic + "'");
  using clock = std::chrono::steady_clock;
  auto start = clock::now();
  ExtendedModel ext = extend_for_deletion(net, full_cut_set(net));
  std::vector<std::size_t> deleted = spanning_tree_cuts(ext, config.seed);
  ParametrizedModel model = init_parameters(ext, std::move(deleted));

  std::vector<SweepStep> steps;
  steps.push_back(evaluate(model, 0, config.edbp, start));
  std::size_t k = 0;
  for (std::size_t round = 1; !model.deleted().empty(); ++round) {
    if (config.max_steps && round > *config.max_steps) break;
    start = clock::now();
    const RankContext ctx{model, steps.back().report ? &*steps.back().report : nullptr,
                          mix_seed(config.seed, round), config.mi2};
    const RecoveryRanking ranking = registry.rank(config.heuristic, ctx);
    std::vector<std::size_t> top = ranking.edges();
    top.resize(std::min(top.size(), config.k_step));
    model = recover(model, top);
    k += top.size();
    steps.push_back(evaluate(model, k, config.edbp, start));
  }
  return steps;
}

}  // namespace edgecorr
