#include "doctest.h"

#include <cmath>
#include <set>
#include <sstream>

#include "edgecorr/bench.hpp"
#include "edgecorr/errors.hpp"
#include "edgecorr/inference.hpp"
#include "edgecorr/model.hpp"
#include "edgecorr/recovery.hpp"
#include "support/fixtures.hpp"

using namespace edgecorr;

TEST_CASE("spanning tree cuts leave a tree-structured model") {
  SplitMix64 rng(2);
  for (int t = 0; t < 10; ++t) {
    const FactorNetwork net = testing::random_pairwise(rng, 8, 6);
    const ExtendedModel ext = extend_for_deletion(net, full_cut_set(net));
    const auto del = spanning_tree_cuts(ext, static_cast<std::uint64_t>(t));
    const ParametrizedModel m = init_parameters(ext, del);
    CHECK(is_forest(m.net_prime()));
    // connected input: one extra edge beyond a tree means one deletion
    const std::size_t pairwise = net.num_factors() - net.num_variables();
    CHECK(del.size() == pairwise - (net.num_variables() - 1));
    CHECK(spanning_tree_cuts(ext, static_cast<std::uint64_t>(t)) == del);
  }
}

TEST_CASE("spanning trees vary with the seed") {
  GridSpec g;
  const FactorNetwork net = gen_grid(g);
  const ExtendedModel ext = extend_for_deletion(net, full_cut_set(net));
  std::set<std::vector<std::size_t>> trees;
  for (std::uint64_t s = 0; s < 20; ++s) trees.insert(spanning_tree_cuts(ext, s));
  CHECK(trees.size() > 10);
}

TEST_CASE("rankings") {
  SplitMix64 rng(4);
  const FactorNetwork net = testing::random_pairwise(rng, 7, 5);
  const ExtendedModel ext = extend_for_deletion(net, full_cut_set(net));
  auto [m, conv] = edbp_iterate(init_parameters(ext, spanning_tree_cuts(ext, 0)));
  REQUIRE(conv.converged);
  const CorrectionReport r = correct(m);
  for (const RecoveryRanking& rk : {rank_random(m, 1), rank_mi(m), rank_mi2(m), rank_correction_magnitude(r)}) {
    CHECK(rk.scores.size() == m.deleted().size());
    for (std::size_t k = 1; k < rk.scores.size(); ++k) CHECK(rk.scores[k - 1].second >= rk.scores[k].second);
    const auto edges = rk.edges();
    std::set<std::size_t> es(edges.begin(), edges.end());
    CHECK(es == std::set<std::size_t>(m.deleted().begin(), m.deleted().end()));
  }
  CHECK(rank_random(m, 1).scores == rank_random(m, 1).scores);
  const auto mi = rank_mi(m);
  CHECK(mi.scores.front().second == doctest::Approx(r.term(mi.scores.front().first).mi).epsilon(1e-9));
  Mi2Config sampled;
  sampled.exact_limit = 1;
  sampled.sampled_partners = 1;
  CHECK(rank_mi2(m, sampled).seed.has_value());
  CHECK_THROWS_AS(HeuristicRegistry::builtin().rank("nope", {m}), std::invalid_argument);
  RankContext no_report{m};
  CHECK_THROWS_AS(HeuristicRegistry::builtin().rank("magnitude", no_report), std::invalid_argument);
}

TEST_CASE("custom heuristics plug into the sweep") {
  HeuristicRegistry reg = HeuristicRegistry::builtin();
  reg.add("lowest", [](const RankContext& c) {
    RecoveryRanking r{"lowest", {}, std::nullopt};
    for (std::size_t e : c.model.deleted()) r.scores.emplace_back(e, -static_cast<double>(e));
    return r;
  });
  SweepConfig cfg;
  cfg.heuristic = "lowest";
  const auto steps = recovery_sweep(testing::clique3(true), cfg, reg);
  CHECK(steps.size() == 2);
}

TEST_CASE("recovery sweep ends exact") {
  SplitMix64 rng(6);
  const FactorNetwork net = testing::random_pairwise(rng, 6, 4);
  const double exact = log_partition(net);
  for (const char* h : {"random", "mi", "mi2", "magnitude"}) {
    SweepConfig cfg;
    cfg.heuristic = h;
    cfg.k_step = 2;
    const auto steps = recovery_sweep(net, cfg);
    REQUIRE(steps.back().report);
    CHECK(steps.back().n_deleted == 0);
    CHECK(steps.back().report->log_Z_ecz == doctest::Approx(exact).epsilon(1e-10));
    CHECK(steps.front().k == 0);
    CHECK(steps.size() == 1 + (steps.front().n_deleted + 1) / 2);
  }
  SweepConfig capped;
  capped.max_steps = 1;
  CHECK(recovery_sweep(net, capped).size() == 2);
  capped.k_step = 0;
  CHECK_THROWS_AS(recovery_sweep(net, capped), std::invalid_argument);
}

TEST_CASE("grid generator") {
  GridSpec g;
  g.rows = 1;
  g.cols = 2;
  CHECK(gen_grid(g).num_factors() == 3);
  g.rows = g.cols = 6;
  const FactorNetwork net = gen_grid(g);
  CHECK(net.num_variables() == 36);
  std::size_t edges = 0;
  for (const Factor& f : net.factors()) {
    if (f.arity() != 2) continue;
    ++edges;
    const double p = f.table()[0] * std::exp(f.log_scale());
    CHECK(((p >= 0.0 && p <= 0.1) || (p > 0.9 && p <= 1.0)));
  }
  CHECK(edges == 60);
  CHECK(save_uai(gen_grid(g)) == save_uai(net));
  CHECK(min_fill_order(net).induced_width <= 6);
}

TEST_CASE("noisy-or generator") {
  NoisyOrSpec s{1, 1, 1, 0, 0};
  const NoisyOrInstance tiny = gen_noisyor(s);
  CHECK(tiny.net.num_variables() == 2);
  CHECK(tiny.evidence == Evidence{{1, 0}});
  NoisyOrSpec spec;
  spec.positive_findings = 3;
  const NoisyOrInstance inst = gen_noisyor(spec);
  CHECK(inst.net.num_variables() == 16);
  CHECK(inst.net.num_factors() == 16);
  int cpts = 0, positives = 0;
  for (const Factor& f : inst.net.factors()) cpts += f.arity() == 5;
  for (const auto& [v, x] : inst.evidence) positives += x;
  CHECK(cpts == 8);
  CHECK(positives == 3);
  CHECK(inst.evidence.size() == 8);
  // CPTs are normalized: the prior network sums to one.
  CHECK(log_partition(inst.net) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(save_uai(gen_noisyor(spec).net) == save_uai(inst.net));
  spec.parents_per_sink = 9;
  CHECK_THROWS_AS(gen_noisyor(spec), InfeasibleSpec);
}

TEST_CASE("experiments, summaries and CSV") {
  CHECK(run_experiment({GridSpec{}}, {}, 0).empty());
  NoisyOrSpec spec;
  spec.roots = spec.sinks = 4;
  spec.parents_per_sink = 2;
  ExperimentConfig cfg;
  cfg.heuristics = {"random", "mi"};
  const auto rows = run_experiment({spec}, cfg, 3);
  REQUIRE(!rows.empty());
  for (const auto& r : rows) {
    CHECK(r.converged);
    CHECK(r.rel_error_ecz <= 1e-6);
    CHECK(r.rel_error_ecg >= 0.0);
  }
  CHECK(dropped_instances(rows).empty());
  const auto summary = summarize(rows);
  CHECK(summary.at({"noisyor", "random", 0}).instances == 3);
  std::ostringstream a, b;
  write_bench_csv(a, rows, false);
  write_bench_csv(b, run_experiment({spec}, cfg, 3), false);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind(kBenchCsvHeader, 0) == 0);
  CHECK(relative_error(std::log(1.1), 0.0) == doctest::Approx(0.1));
}
