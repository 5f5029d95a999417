#include "doctest.h"

#include <cmath>

#include "edgecorr/correction.hpp"
#include "edgecorr/edbp.hpp"
#include "edgecorr/errors.hpp"
#include "edgecorr/inference.hpp"
#include "edgecorr/model.hpp"
#include "edgecorr/oracle.hpp"
#include "edgecorr/recovery.hpp"
#include "support/fixtures.hpp"

using namespace edgecorr;

namespace {

ParametrizedModel clique_fixed_point(bool flipped, EdbpConfig cfg = {}) {
  const ExtendedModel ext = extend_for_deletion(testing::clique3(flipped), {{0, 0}});
  auto [model, conv] = edbp_iterate(init_parameters(ext, {0}), cfg);
  REQUIRE(conv.converged);
  return model;
}

}  // namespace

TEST_CASE("clique example with a zero-MI edge") {
  const ParametrizedModel m = clique_fixed_point(false);
  const EdgeParameters& p = m.parameters(0);
  CHECK(p.theta_i[0] == doctest::Approx(0.478947).epsilon(1e-5));
  CHECK(p.theta_i[1] == doctest::Approx(0.521053).epsilon(1e-5));
  CHECK(p.theta_j[0] == doctest::Approx(0.827273).epsilon(1e-5));
  CHECK(p.theta_j[1] == doctest::Approx(0.172727).epsilon(1e-5));
  const CorrectionReport r = correct(m);
  CHECK(std::exp(r.log_Z_prime) == doctest::Approx(0.444687).epsilon(1e-5));
  CHECK(std::exp(r.terms[0].log_z) == doctest::Approx(0.486220).epsilon(1e-5));
  CHECK(r.terms[0].mi < 1e-12);
  CHECK(std::exp(r.log_Z_ecz) == doctest::Approx(0.91458).epsilon(1e-10));
  CHECK(r.log_Z_ecg == doctest::Approx(r.log_Z_ecz).epsilon(1e-12));
}

TEST_CASE("clique example with a correlated edge") {
  const ParametrizedModel m = clique_fixed_point(true);
  const EdgeParameters& p = m.parameters(0);
  CHECK(p.theta_i[0] == doctest::Approx(0.519615).epsilon(1e-5));
  CHECK(p.theta_j[0] == doctest::Approx(0.195075).epsilon(1e-5));
  const CorrectionReport r = correct(m);
  CHECK(std::exp(r.log_Z_prime) == doctest::Approx(0.505290).epsilon(1e-5));
  CHECK(std::exp(r.terms[0].log_z) == doctest::Approx(0.488038).epsilon(1e-5));
  CHECK(std::exp(r.terms[0].log_y) == doctest::Approx(1.048360).epsilon(1e-5));
  CHECK(std::exp(r.log_Z_ecz) == doctest::Approx(1.035350).epsilon(1e-5));
  CHECK(std::exp(r.log_Z_ecg) == doctest::Approx(1.08542).epsilon(1e-10));
  CHECK(fixed_point_check(m) < 1e-8);
}

TEST_CASE("schedules and damping reach the same fixed point") {
  EdbpConfig sync;
  sync.schedule = Schedule::synchronous;
  EdbpConfig damped;
  damped.damping = 0.6;
  const ParametrizedModel a = clique_fixed_point(true);
  const ParametrizedModel b = clique_fixed_point(true, sync);
  const ParametrizedModel c = clique_fixed_point(true, damped);
  for (std::size_t x = 0; x < 2; ++x) {
    CHECK(b.parameters(0).theta_i[x] == doctest::Approx(a.parameters(0).theta_i[x]).epsilon(1e-8));
    CHECK(c.parameters(0).theta_j[x] == doctest::Approx(a.parameters(0).theta_j[x]).epsilon(1e-8));
  }
}

TEST_CASE("iteration bookkeeping") {
  const ExtendedModel ext = extend_for_deletion(testing::clique3(true), {{0, 0}});
  auto [none, conv0] = edbp_iterate(init_parameters(ext, {}));
  CHECK(conv0.converged);
  CHECK(conv0.iterations == 0);
  EdbpConfig one;
  one.max_iters = 1;
  auto [m, conv1] = edbp_iterate(init_parameters(ext, {0}), one);
  CHECK_FALSE(conv1.converged);
  CHECK(conv1.iterations == 1);
  EdbpConfig bad;
  bad.damping = 1.0;
  CHECK_THROWS_AS(edbp_iterate(init_parameters(ext, {0}), bad), std::invalid_argument);
}

TEST_CASE("update_edge is pure and normalized") {
  const ExtendedModel ext = extend_for_deletion(testing::clique3(true), {{0, 0}});
  const ParametrizedModel m = init_parameters(ext, {0});
  const EdgeParameters p = update_edge(m, 0);
  CHECK(p.theta_i[0] + p.theta_i[1] == doctest::Approx(1.0));
  CHECK(m.parameters(0).theta_i[0] == 0.5);
}

TEST_CASE("degenerate update on unreachable mass") {
  FactorNetwork net({2, 2});
  net.add_factor(Factor({0, 1}, {2, 2}, {1, 0, 0, 0}));
  net.add_factor(Factor::unary(0, {1, 1}));
  const ExtendedModel ext = extend_for_deletion(net, {{0, 0}});
  ParametrizedModel m = init_parameters(ext, {0});
  m.set_parameters(0, {1, 1}, {0, 1});
  CHECK_THROWS_AS(update_edge(m, 0), DegenerateUpdate);
}

TEST_CASE("scaling parameters leaves EC-G unchanged") {
  ParametrizedModel m = clique_fixed_point(true);
  const double before = correct(m).log_Z_ecg;
  const EdgeParameters p = m.parameters(0);
  std::vector<double> ti = p.theta_i, tj = p.theta_j;
  for (double& x : ti) x *= 7.5;
  for (double& x : tj) x *= 0.2;
  m.set_parameters(0, ti, tj);
  CHECK(correct(m).log_Z_ecg == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("partial corrections and single-edge recovery") {
  SplitMix64 rng(21);
  const FactorNetwork net = testing::random_pairwise(rng, 6, 5);
  ExtendedModel ext = extend_for_deletion(net, full_cut_set(net));
  auto [m, conv] = edbp_iterate(init_parameters(ext, spanning_tree_cuts(ext, 1)));
  REQUIRE(conv.converged);
  const CorrectionReport r = correct(m);
  REQUIRE(r.n_deleted >= 2);
  CHECK(r.partial_curve.front() == doctest::Approx(r.log_Z_ecz));
  CHECK(r.partial_curve.back() == doctest::Approx(r.log_Z_ecg));
  const auto order = rank_correction_magnitude(r).edges();
  const auto curve = partial_curve(r, order);
  CHECK(curve.size() == r.n_deleted + 1);
  CHECK(partial_ec_g(r, order, 1) == doctest::Approx(curve[1]));
  CHECK_THROWS_AS(partial_ec_g(r, order, r.n_deleted + 1), std::invalid_argument);

  // Holding the other parameters fixed, restoring an edge gives log Z' + log y - log z.
  const std::size_t e = m.deleted()[0];
  const std::size_t one[] = {e};
  const ParametrizedModel restored = m.with_recovered(one);
  CHECK(log_partition(restored.net_prime()) == doctest::Approx(single_edge_recovered_logZ(r, e)).epsilon(1e-10));
  // After re-iteration the value generally moves.
  auto [again, c2] = edbp_iterate(restored);
  CHECK(c2.converged);
  CHECK(correct(again).n_deleted == r.n_deleted - 1);
}

TEST_CASE("Bethe free energy matches an independent loopy BP") {
  SplitMix64 rng(8);
  int compared = 0;
  for (int t = 0; t < 6; ++t) {
    const FactorNetwork net = testing::random_pairwise(rng, 7, 4, 0.7);
    const auto bp = testing::loopy_bp_bethe(net);
    ExtendedModel ext = extend_for_deletion(net, full_cut_set(net));
    auto [m, conv] = edbp_iterate(init_parameters(ext, spanning_tree_cuts(ext, 4)));
    if (!conv.converged || !bp.converged) continue;
    ++compared;
    const double f = bethe_free_energy(net, collect_beliefs(m));
    CHECK(f == doctest::Approx(bp.free_energy).epsilon(1e-8));
    CHECK(-f == doctest::Approx(correct(m).log_Z_ecz).epsilon(1e-8));
  }
  CHECK(compared >= 4);
}

TEST_CASE("Bethe free energy errors") {
  FactorNetwork net({2, 2, 2});
  net.add_factor(Factor({0, 1, 2}, {2, 2, 2}, std::vector<double>(8, 1.0)));
  BetheBeliefs b;
  b.node.assign(3, {0.5, 0.5});
  b.edge.resize(1);
  CHECK_THROWS_AS(bethe_free_energy(net, b), ShapeError);

  FactorNetwork z({2});
  z.add_factor(Factor::unary(0, {1.0, 0.0}));
  BetheBeliefs bz;
  bz.node = {{0.5, 0.5}};
  bz.edge.resize(1);
  CHECK_THROWS_AS(bethe_free_energy(z, bz), SupportError);
}
