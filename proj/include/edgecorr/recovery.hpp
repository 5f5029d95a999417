#ifndef EDGECORR_RECOVERY_HPP
#define EDGECORR_RECOVERY_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "edgecorr/correction.hpp"
#include "edgecorr/edbp.hpp"
#include "edgecorr/model.hpp"

namespace edgecorr {

struct RecoveryRanking {
  std::string heuristic;
  /// (edge, score), highest score first; ties by ascending edge index.
  std::vector<std::pair<std::size_t, double>> scores;
  std::optional<std::uint64_t> seed;

  std::vector<std::size_t> edges() const;
};

/// Deletes the equivalence edges left out of a uniformly random spanning
/// tree (Wilson's algorithm) of the factor/variable incidence graph. Factor
/// incidences are never cut, so net_prime is a forest whenever they alone
/// form one (true after full_cut_set). Returns ascending edge indices.
std::vector<std::size_t> spanning_tree_cuts(const ExtendedModel& model, std::uint64_t seed);

struct Mi2Config {
  /// Score exactly while |deleted| is at most this.
  std::size_t exact_limit = 64;
  /// Above the limit, partners sampled per edge; the sum is rescaled.
  std::size_t sampled_partners = 64;
  std::uint64_t seed = 0;
};

RecoveryRanking rank_random(const ParametrizedModel& model, std::uint64_t seed);
/// score = MI(X_i; X_j) in net_prime
RecoveryRanking rank_mi(const ParametrizedModel& model);
/// score = sum over other deleted (s,t) of MI(X_i X_j; X_s X_t) in net_prime
RecoveryRanking rank_mi2(const ParametrizedModel& model, const Mi2Config& config = {});
/// score = |log y_ij|
RecoveryRanking rank_correction_magnitude(const CorrectionReport& report);

/// Restores the identity factors of `edges`. The result must be re-iterated
/// before corrections mean anything.
ParametrizedModel recover(const ParametrizedModel& model, std::span<const std::size_t> edges);

struct RankContext {
  const ParametrizedModel& model;
  /// Corrections at the current fixed point, when available.
  const CorrectionReport* report = nullptr;
  std::uint64_t seed = 0;
  Mi2Config mi2 = {};
};

using RankFunction = std::function<RecoveryRanking(const RankContext&)>;

/// Named recovery heuristics. builtin() holds random, mi, mi2 and magnitude
/// (alias correction_magnitude).
class HeuristicRegistry {
 public:
  static const HeuristicRegistry& builtin();

  void add(const std::string& name, RankFunction fn);
  bool contains(const std::string& name) const { return table_.count(name) != 0; }
  std::vector<std::string> names() const;
  /// Throws std::invalid_argument for unknown names.
  RecoveryRanking rank(const std::string& name, const RankContext& ctx) const;

 private:
  std::map<std::string, RankFunction> table_;
};

struct SweepConfig {
  std::string heuristic = "random";
  std::size_t k_step = 1;
  std::uint64_t seed = 0;
  /// Cap on recovery steps after the initial tree.
  std::optional<std::size_t> max_steps;
  EdbpConfig edbp;
  Mi2Config mi2;
};

struct SweepStep {
  /// Edges recovered so far.
  std::size_t k = 0;
  std::size_t n_deleted = 0;
  ConvergenceReport convergence;
  /// Missing only if corrections could not be evaluated at a
  /// non-converged point.
  std::optional<CorrectionReport> report;
  double wall_ms = 0.0;
};

/// Starts from a random spanning tree of the fully cut network, then
/// repeatedly ranks, recovers the top k_step edges, re-runs ED-BP from the
/// previous parameters and re-corrects, until nothing is deleted.
std::vector<SweepStep> recovery_sweep(const FactorNetwork& net, const SweepConfig& config,
                                      const HeuristicRegistry& registry = HeuristicRegistry::builtin());

}  // namespace edgecorr

#endif  // EDGECORR_RECOVERY_HPP
