#ifndef EDGECORR_INFERENCE_HPP
#define EDGECORR_INFERENCE_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "edgecorr/factor.hpp"

namespace edgecorr {

struct EliminationOrder {
  std::vector<VarId> order;
  int induced_width = 0;
};

/// Normalized joint distribution over a small query scope.
struct JointTable {
  std::vector<VarId> scope;
  std::vector<int> cards;
  std::vector<double> probs;
  /// log Z of the network the table was computed from.
  double log_norm = 0.0;

  /// Marginal over `vars` (each must be in scope), in the given order.
  JointTable project(std::span<const VarId> vars) const;
  /// Shannon entropy in nats, 0 log 0 = 0.
  double entropy() const;
};

/// Greedy min-fill order over the variables not in `keep`; ties go to the
/// lowest id. `excluded` factors do not contribute adjacency.
EliminationOrder min_fill_order(const FactorNetwork& net, std::span<const VarId> keep = {},
                                std::optional<std::size_t> excluded = std::nullopt);

/// Sums every variable outside `keep` out of the product of all factors
/// (minus `excluded`), returning a scaled table over `keep` in that order.
/// `order`, when given, must list exactly the variables outside `keep`.
Factor eliminate(const FactorNetwork& net, std::span<const VarId> keep,
                 std::optional<std::size_t> excluded = std::nullopt, const EliminationOrder* order = nullptr);

/// Exact log Z. Throws ZeroPartition if all mass is zero.
double log_partition(const FactorNetwork& net, const EliminationOrder* order = nullptr);

/// Exact joint marginal of `query`; log_norm is log Z.
JointTable marginal(const FactorNetwork& net, std::span<const VarId> query, const EliminationOrder* order = nullptr);

/// d(x) = dZ/dtheta(x) where theta is the unary factor `excluded` over `var`:
/// the product of every other factor summed over configurations with var=x.
/// Returned as a scaled unary factor. Throws ScopeError unless `excluded`
/// is unary over `var`.
Factor marginal_excluding_factor(const FactorNetwork& net, std::size_t excluded, VarId var,
                                 const EliminationOrder* order = nullptr);

/// MI(A; B) in nats. A and B must be disjoint. Clamped at 0 from below.
double mutual_information(const FactorNetwork& net, std::span<const VarId> a, std::span<const VarId> b);

/// MI between the first `split` scope variables of `joint` and the rest.
double mutual_information(const JointTable& joint, std::size_t split);

/// H(A) + H(B) - H(A u B) from a joint whose scope covers A u B. Equals
/// MI(A; B) when the sets are disjoint; overlapping sets are allowed.
double set_mutual_information(const JointTable& joint, std::span<const VarId> a, std::span<const VarId> b);

}  // namespace edgecorr

#endif  // EDGECORR_INFERENCE_HPP
