#ifndef EDGECORR_CORRECTION_HPP
#define EDGECORR_CORRECTION_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "edgecorr/edbp.hpp"
#include "edgecorr/factor.hpp"

namespace edgecorr {

/// Per-edge correction factors, all in log space.
struct CorrectionTerms {
  std::size_t edge = 0;
  EquivalenceEdge equiv;
  double log_z = 0.0;
  double log_y = 0.0;
  /// MI(X_i; X_j) in the simplified model, nats.
  double mi = 0.0;
};

struct CorrectionReport {
  double log_Z_prime = 0.0;
  std::vector<CorrectionTerms> terms;
  /// log Z' - sum log z
  double log_Z_ecz = 0.0;
  /// log Z' - sum log z + sum log y
  double log_Z_ecg = 0.0;
  /// Edge order of partial_curve (ascending edge index by default).
  std::vector<std::size_t> partial_order;
  /// partial_curve[k] = EC-Z plus the log y terms of the first k edges.
  std::vector<double> partial_curve;
  std::size_t n_deleted = 0;
  /// (n - 1) log Z' - sum log Z'_ij, with Z'_ij the single-edge-recovered Z'.
  /// Reported for inspection only.
  double dual_energy = 0.0;

  const CorrectionTerms& term(std::size_t edge) const;
};

/// sum_x theta_i(x) theta_j(x)
double z_term(const EdgeParameters& params);

/// sum_x Pr'(x_i = x | x_j = x) from the exact joint over both endpoints.
/// Throws ZeroConditional if some Pr'(x_j) is zero.
double y_term(const ParametrizedModel& model, std::size_t edge);

/// Assembles log Z', the per-edge terms, and the EC-Z / EC-G estimates.
CorrectionReport correct(const ParametrizedModel& model);

/// EC-Z plus the log y terms of the first k edges of `order`.
double partial_ec_g(const CorrectionReport& report, std::span<const std::size_t> order, std::size_t k);

/// Prefix curve of partial_ec_g over k = 0..n.
std::vector<double> partial_curve(const CorrectionReport& report, std::span<const std::size_t> order);

/// log Z' + log y_ij - log z_ij: exact log Z' of the model with `edge`
/// restored and every other parameter held fixed.
double single_edge_recovered_logZ(const CorrectionReport& report, std::size_t edge);

/// Node and edge beliefs over an unextended pairwise network.
struct BetheBeliefs {
  /// Indexed by original variable id.
  std::vector<std::vector<double>> node;
  /// Indexed by original factor id; set for factors of arity 2, laid out
  /// like that factor's table.
  std::vector<std::optional<std::vector<double>>> edge;
};

/// Beliefs read off net_prime: Pr'(X_i) per original variable, and per
/// pairwise factor the joint over that factor's (possibly cloned) scope.
BetheBeliefs collect_beliefs(const ParametrizedModel& model);

/// F = U - H with
///   U = -sum_edges E[log psi_ij] - sum_nodes E[log psi_i]
///   H =  sum_edges H(X_i, X_j) - sum_i (n_i - 1) H(X_i)
/// where n_i counts pairwise factors touching i in `original`.
/// Throws ShapeError for factors of arity > 2 and SupportError when a belief
/// puts mass where the potential is zero.
double bethe_free_energy(const FactorNetwork& original, const BetheBeliefs& beliefs);

}  // namespace edgecorr

#endif  // EDGECORR_CORRECTION_HPP
