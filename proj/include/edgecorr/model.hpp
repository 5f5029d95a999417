#ifndef EDGECORR_MODEL_HPP
#define EDGECORR_MODEL_HPP

#include <cstddef>
#include <map>
#include <vector>

#include "edgecorr/factor.hpp"
#include "edgecorr/uai.hpp"

namespace edgecorr {

/// Slices every factor at the observed values. Observed variables keep their
/// ids but drop to cardinality 1, so Z of the result is the unnormalized
/// probability of the evidence. Throws IndexError on out-of-range values.
FactorNetwork condition(const FactorNetwork& net, const Evidence& evidence);

/// An identity constraint between variable i and its clone j.
struct EquivalenceEdge {
  VarId i = 0;
  VarId j = 0;
  int card = 2;
  /// Factor whose scope had i replaced by j.
  std::size_t factor = 0;

  friend bool operator==(const EquivalenceEdge&, const EquivalenceEdge&) = default;
};

/// Replace `var` by a fresh clone inside factor `factor`.
struct Cut {
  std::size_t factor = 0;
  VarId var = 0;
};

/// A network whose deletable adjacencies are all equivalence edges.
///
/// `net` holds the clone variables but NOT the equivalence factors; those
/// belong to whichever simplified model is built on top (recovered edges as
/// identity factors, deleted ones as edge parameters).
struct ExtendedModel {
  FactorNetwork net;
  std::vector<EquivalenceEdge> equiv_edges;
  /// clone id -> id of the variable it was cloned from
  std::map<VarId, VarId> clone_of;
  std::size_t num_original_variables = 0;

  /// Follows clone_of back to a variable of the unextended network.
  VarId original_of(VarId var) const;
  /// Scope of factor f with clones mapped back to originals.
  std::vector<VarId> original_scope(std::size_t f) const;
};

/// Applies the cuts in order. Throws ScopeError if a cut names a variable
/// outside the factor's scope, or the same (factor, variable) twice.
ExtendedModel extend_for_deletion(const FactorNetwork& net, const std::vector<Cut>& cuts);

/// Default cut for an edge factor: its lowest-indexed variable.
Cut default_cut(const FactorNetwork& net, std::size_t factor);

/// Cuts every scope variable of every factor of arity >= 2 except the
/// highest-indexed one. After this, factor/variable incidences alone form a
/// forest, so any cycle runs through an equivalence edge.
std::vector<Cut> full_cut_set(const FactorNetwork& net);

/// The extended network with every equivalence factor installed. Has the
/// same partition function as the unextended network.
FactorNetwork with_equivalence_factors(const ExtendedModel& model);

}  // namespace edgecorr

#endif  // EDGECORR_MODEL_HPP
