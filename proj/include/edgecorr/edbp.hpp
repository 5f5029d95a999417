#ifndef EDGECORR_EDBP_HPP
#define EDGECORR_EDBP_HPP

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "edgecorr/factor.hpp"
#include "edgecorr/inference.hpp"
#include "edgecorr/model.hpp"

namespace edgecorr {

/// The two unary potentials standing in for a deleted equivalence edge.
struct EdgeParameters {
  EquivalenceEdge edge;
  std::vector<double> theta_i;
  std::vector<double> theta_j;
};

/// The simplified model M'(theta): an extended model with some equivalence
/// edges deleted and replaced by edge parameters.
///
/// net_prime() holds the extended network's factors (same ids), followed by
/// one block per equivalence edge in index order: an identity factor when
/// the edge is present, or the unary pair theta_i, theta_j when deleted.
class ParametrizedModel {
 public:
  /// Uniform parameters on every deleted edge.
  ParametrizedModel(ExtendedModel base, std::vector<std::size_t> deleted);

  const ExtendedModel& base() const noexcept { return *base_; }
  /// Deleted equivalence-edge indices, ascending.
  const std::vector<std::size_t>& deleted() const noexcept { return deleted_; }
  bool is_deleted(std::size_t edge) const;
  const EquivalenceEdge& edge(std::size_t edge) const { return base_->equiv_edges.at(edge); }

  const EdgeParameters& parameters(std::size_t edge) const;
  /// Any positive vectors are accepted; only ED-BP output is sum-normalized.
  void set_parameters(std::size_t edge, std::vector<double> theta_i, std::vector<double> theta_j);

  const FactorNetwork& net_prime() const noexcept { return net_prime_; }
  std::size_t theta_i_factor(std::size_t edge) const { return theta_factor(edge).first; }
  std::size_t theta_j_factor(std::size_t edge) const { return theta_factor(edge).second; }

  /// Min-fill order for net_prime with `keep` retained. Depends only on the
  /// structure, so it is cached and shared between copies.
  const EliminationOrder& order_for(std::span<const VarId> keep) const;

  /// Restores identity factors for `edges`; other parameters carry over.
  ParametrizedModel with_recovered(std::span<const std::size_t> edges) const;

 private:
  struct OrderCache;

  std::pair<std::size_t, std::size_t> theta_factor(std::size_t edge) const;
  void build();

  std::shared_ptr<const ExtendedModel> base_;
  std::vector<std::size_t> deleted_;
  std::map<std::size_t, EdgeParameters> params_;
  std::map<std::size_t, std::pair<std::size_t, std::size_t>> theta_ids_;
  FactorNetwork net_prime_;
  std::shared_ptr<OrderCache> cache_;
};

enum class Schedule { sequential, synchronous };

struct EdbpConfig {
  double tolerance = 1e-10;
  int max_iters = 1000;
  /// new <- damping * old + (1 - damping) * new
  double damping = 0.0;
  Schedule schedule = Schedule::sequential;
};

struct ConvergenceReport {
  bool converged = false;
  int iterations = 0;
  double final_residual = 0.0;
};

ParametrizedModel init_parameters(const ExtendedModel& model, std::vector<std::size_t> deleted);

/// One application of theta_i ~ dZ'/dtheta_j and theta_j ~ dZ'/dtheta_i,
/// each normalized to sum 1. Does not modify the model. Throws
/// DegenerateUpdate if a derivative vector is all zero.
EdgeParameters update_edge(const ParametrizedModel& model, std::size_t edge);

/// Iterates update_edge until the largest parameter change drops below the
/// tolerance or max_iters is reached. Non-convergence is reported, not thrown.
std::pair<ParametrizedModel, ConvergenceReport> edbp_iterate(ParametrizedModel model, const EdbpConfig& config = {});

/// Largest violation over deleted edges of Pr'(x_i) = theta_i theta_j / z_ij
/// and Pr'(x_i) = Pr'(x_j).
double fixed_point_check(const ParametrizedModel& model);

}  // namespace edgecorr

#endif  // EDGECORR_EDBP_HPP
