#ifndef EDGECORR_BENCH_HPP
#define EDGECORR_BENCH_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "edgecorr/factor.hpp"
#include "edgecorr/recovery.hpp"
#include "edgecorr/uai.hpp"

namespace edgecorr {

/// Binary lattice with symmetric couplings [p, 1-p; 1-p, p]. A fair coin
/// picks the low interval [low_min, low_max] or the high one
/// (high_min, high_max], then p is uniform inside it. Unary entries are
/// uniform on (0, 1).
struct GridSpec {
  int rows = 4;
  int cols = 4;
  double low_min = 0.0;
  double low_max = 0.1;
  double high_min = 0.9;
  double high_max = 1.0;
  std::uint64_t seed = 0;
};

/// Two-layer noisy-or: roots 0..roots-1, sinks after them.
struct NoisyOrSpec {
  int roots = 8;
  int sinks = 8;
  int parents_per_sink = 4;
  int positive_findings = 0;
  std::uint64_t seed = 0;
};

/// Variable r*cols + c. Factors: one unary per node in id order, then per
/// node its right and down couplings. Draws come from SplitMix64(seed) in
/// that same order.
FactorNetwork gen_grid(const GridSpec& spec);

struct NoisyOrInstance {
  FactorNetwork net;
  Evidence evidence;
};

/// Root priors Pr(root = 1) ~ U(0,1); each sink gets a random parent set,
/// inhibitors ~ U(0,1) and leak ~ U(0, 0.1), with
/// Pr(sink = 0 | parents) = (1 - leak) * prod_{active parents} inhibitor.
/// Value 1 is "true". Evidence marks positive_findings random sinks true and
/// the rest false. Throws InfeasibleSpec on impossible counts.
NoisyOrInstance gen_noisyor(const NoisyOrSpec& spec);

using FamilySpec = std::variant<GridSpec, NoisyOrSpec>;

struct ExperimentConfig {
  std::vector<std::string> heuristics{"random"};
  /// heuristic and seed are overridden per instance.
  SweepConfig sweep;
};

struct ExperimentRow {
  int instance = 0;
  std::string family;
  std::string heuristic;
  std::size_t k = 0;
  bool converged = false;
  double rel_error_ecz = 0.0;
  double rel_error_ecg = 0.0;
  double wall_ms = 0.0;
  double log_Z_exact = 0.0;
  double log_Z_ecz = 0.0;
  double log_Z_ecg = 0.0;
};

/// |exp(log_estimate - log_exact) - 1|
double relative_error(double log_estimate, double log_exact);

/// For each spec and repetition r, generates the instance with seed
/// spec.seed + r, computes its exact log Z, then sweeps once per heuristic
/// (all heuristics share the instance's starting tree). Rows of
/// non-converged steps are kept and flagged.
std::vector<ExperimentRow> run_experiment(const std::vector<FamilySpec>& specs, const ExperimentConfig& config,
                                          int repetitions);

struct RowSummary {
  double mean_rel_error_ecz = 0.0;
  double mean_rel_error_ecg = 0.0;
  std::size_t instances = 0;
};

/// Means keyed by (family, heuristic, k). Instances with any non-converged
/// row are dropped entirely so every heuristic averages the same set.
std::map<std::tuple<std::string, std::string, std::size_t>, RowSummary> summarize(
    const std::vector<ExperimentRow>& rows);

/// Instance ids dropped by summarize().
std::vector<int> dropped_instances(const std::vector<ExperimentRow>& rows);

inline constexpr const char* kBenchCsvHeader = "instance,family,heuristic,k,converged,rel_err_ecz,rel_err_ecg,wall_ms";

/// CSV with kBenchCsvHeader. With wall_time = false the wall_ms column is
/// written as 0 so output is byte-reproducible.
void write_bench_csv(std::ostream& out, const std::vector<ExperimentRow>& rows, bool wall_time = true);

}  // namespace edgecorr

#endif  // EDGECORR_BENCH_HPP
