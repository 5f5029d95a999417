#ifndef EDGECORR_TESTS_FIXTURES_HPP
#define EDGECORR_TESTS_FIXTURES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "edgecorr/factor.hpp"
#include "edgecorr/model.hpp"
#include "edgecorr/rng.hpp"

namespace edgecorr::testing {

/// Three binary nodes in a clique with couplings on (0,1), (0,2), (1,2), in
/// that factor order. flipped replaces the (1,2) table by 1 - table.
FactorNetwork clique3(bool flipped = false);
std::string clique3_uai(bool flipped = false);

/// Random binary network: a unary factor per variable plus `extra` factors
/// of arity 2 or 3 over random variables. Entries uniform on (lo, 1).
FactorNetwork random_network(SplitMix64& rng, int num_vars, int extra, double lo = 0.05);

/// Random connected pairwise network: a random spanning tree plus `extra`
/// non-duplicate edges, unary factors on every node. Couplings are
/// exp(s * u) with u uniform in (-1, 1).
FactorNetwork random_pairwise(SplitMix64& rng, int num_vars, int extra, double strength = 1.0);

/// Appends b's variables and factors to a (variable ids shifted).
FactorNetwork disjoint_union(const FactorNetwork& a, const FactorNetwork& b);

/// A random cut on a factor of arity >= 2.
Cut random_cut(SplitMix64& rng, const FactorNetwork& net);

/// Flooding loopy BP on a pairwise network, then the Bethe free energy of
/// its beliefs. Written without the library's inference or correction code.
struct LoopyBpResult {
  bool converged = false;
  double free_energy = 0.0;
  std::vector<std::vector<double>> node_beliefs;
};
LoopyBpResult loopy_bp_bethe(const FactorNetwork& net, int max_iters = 5000, double tol = 1e-13, double damping = 0.3);

}  // namespace edgecorr::testing

#endif  // EDGECORR_TESTS_FIXTURES_HPP
