#include "edgecorr/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "edgecorr/errors.hpp"
#include "edgecorr/inference.hpp"
#include "edgecorr/model.hpp"
#include "edgecorr/rng.hpp"

namespace edgecorr {

FactorNetwork gen_grid(const GridSpec& spec) {
  if (spec.rows < 1 || spec.cols < 1) throw InfeasibleSpec("grid needs at least one row and column");
  if (!(spec.low_min >= 0.0 && spec.low_min <= spec.low_max && spec.high_min <= spec.high_max && spec.high_max <= 1.0))
    throw InfeasibleSpec("coupling intervals must lie in [0, 1]");
  SplitMix64 rng(spec.seed);
  const int n = spec.rows * spec.cols;
  FactorNetwork net(std::vector<int>(static_cast<std::size_t>(n), 2));
  for (VarId v = 0; v < n; ++v) net.add_factor(Factor::unary(v, {rng.uniform_open(), rng.uniform_open()}));
  auto coupling = [&](VarId a, VarId b) {
    const double p = rng.coin() ? spec.low_min + (spec.low_max - spec.low_min) * rng.uniform()
                                : spec.high_max - (spec.high_max - spec.high_min) * rng.uniform();
    net.add_factor(Factor({a, b}, {2, 2}, {p, 1.0 - p, 1.0 - p, p}));
  };
  for (int r = 0; r < spec.rows; ++r)
    for (int c = 0; c < spec.cols; ++c) {
      const VarId v = r * spec.cols + c;
      if (c + 1 < spec.cols) coupling(v, v + 1);
      if (r + 1 < spec.rows) coupling(v, v + spec.cols);
    }
  return net;
}

NoisyOrInstance gen_noisyor(const NoisyOrSpec& spec) {
  if (spec.roots < 0 || spec.sinks < 0 || spec.parents_per_sink < 0 || spec.positive_findings < 0)
    throw InfeasibleSpec("noisy-or counts must be nonnegative");
  if (spec.parents_per_sink > spec.roots) throw InfeasibleSpec("more parents per sink than roots");
  if (spec.positive_findings > spec.sinks) throw InfeasibleSpec("more positive findings than sinks");
  SplitMix64 rng(spec.seed);
  NoisyOrInstance inst;
  inst.net = FactorNetwork(std::vector<int>(static_cast<std::size_t>(spec.roots + spec.sinks), 2));
  for (VarId r = 0; r < spec.roots; ++r) {
    const double prior = rng.uniform_open();
    inst.net.add_factor(Factor::unary(r, {1.0 - prior, prior}));
  }
  std::vector<VarId> roots(static_cast<std::size_t>(spec.roots));
  std::iota(roots.begin(), roots.end(), 0);
  const auto k = static_cast<std::size_t>(spec.parents_per_sink);
  for (int s = 0; s < spec.sinks; ++s) {
    const VarId sink = spec.roots + s;
    rng.shuffle(roots);
    std::vector<VarId> scope(roots.begin(), roots.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(scope.begin(), scope.end());
    std::vector<double> inhibit(k);
    for (double& q : inhibit) q = rng.uniform_open();
    const double leak = 0.1 * rng.uniform_open();
    std::vector<double> table;
    table.reserve(std::size_t{2} << k);
    for (std::size_t cfg = 0; cfg < (std::size_t{1} << k); ++cfg) {
      double off = 1.0 - leak;
      // Parent p is the p-th most significant bit of cfg.
      for (std::size_t p = 0; p < k; ++p)
        if ((cfg >> (k - 1 - p)) & 1U) off *= inhibit[p];
      table.push_back(off);
      table.push_back(1.0 - off);
    }
    scope.push_back(sink);
    inst.net.add_factor(Factor(std::move(scope), std::vector<int>(k + 1, 2), std::move(table)));
  }
  std::vector<VarId> sinks(static_cast<std::size_t>(spec.sinks));
  std::iota(sinks.begin(), sinks.end(), spec.roots);
  rng.shuffle(sinks);
  for (std::size_t s = 0; s < sinks.size(); ++s)
    inst.evidence[sinks[s]] = s < static_cast<std::size_t>(spec.positive_findings) ? 1 : 0;
  return inst;
}

double relative_error(double log_estimate, double log_exact) { return std::abs(std::expm1(log_estimate - log_exact)); }

std::vector<ExperimentRow> run_experiment(const std::vector<FamilySpec>& specs, const ExperimentConfig& config,
                                          int repetitions) {
  std::vector<ExperimentRow> rows;
  int instance = 0;
  for (const FamilySpec& spec : specs) {
    for (int rep = 0; rep < repetitions; ++rep, ++instance) {
      FactorNetwork net;
      std::string family;
      std::uint64_t seed = 0;
      if (const auto* g = std::get_if<GridSpec>(&spec)) {
        GridSpec s = *g;
        s.seed = g->seed + static_cast<std::uint64_t>(rep);
        seed = s.seed;
        net = gen_grid(s);
        family = "grid";
      } else {
        NoisyOrSpec s = std::get<NoisyOrSpec>(spec);
        s.seed += static_cast<std::uint64_t>(rep);
        seed = s.seed;
        NoisyOrInstance inst = gen_noisyor(s);
        net = condition(inst.net, inst.evidence);
        family = "noisyor";
      }
      const double exact = log_partition(net);
      for (const std::string& h : config.heuristics) {
        SweepConfig sc = config.sweep;
        sc.heuristic = h;
        sc.seed = seed;
        for (const SweepStep& step : recovery_sweep(net, sc)) {
          ExperimentRow row;
          row.instance = instance;
          row.family = family;
          row.heuristic = h;
          row.k = step.k;
          row.converged = step.convergence.converged && step.report.has_value();
          row.wall_ms = step.wall_ms;
          row.log_Z_exact = exact;
          if (step.report) {
            row.log_Z_ecz = step.report->log_Z_ecz;
            row.log_Z_ecg = step.report->log_Z_ecg;
            row.rel_error_ecz = relative_error(row.log_Z_ecz, exact);
            row.rel_error_ecg = relative_error(row.log_Z_ecg, exact);
          } else {
            row.log_Z_ecz = row.log_Z_ecg = row.rel_error_ecz = row.rel_error_ecg = std::nan("");
          }
          rows.push_back(row);
        }
      }
    }
  }
  return rows;
}

std::vector<int> dropped_instances(const std::vector<ExperimentRow>& rows) {
  std::set<int> bad;
  for (const auto& r : rows)
    if (!r.converged) bad.insert(r.instance);
  return {bad.begin(), bad.end()};
}

std::map<std::tuple<std::string, std::string, std::size_t>, RowSummary> summarize(
    const std::vector<ExperimentRow>& rows) {
  const auto dropped = dropped_instances(rows);
  const std::set<int> bad(dropped.begin(), dropped.end());
  std::map<std::tuple<std::string, std::string, std::size_t>, RowSummary> out;
  for (const auto& r : rows) {
    if (bad.count(r.instance)) continue;
    RowSummary& s = out[{r.family, r.heuristic, r.k}];
    s.mean_rel_error_ecz += r.rel_error_ecz;
    s.mean_rel_error_ecg += r.rel_error_ecg;
    ++s.instances;
  }
  for (auto& [key, s] : out) {
    s.mean_rel_error_ecz /= static_cast<double>(s.instances);
    s.mean_rel_error_ecg /= static_cast<double>(s.instances);
  }
  return out;
}

void write_bench_csv(std::ostream& out, const std::vector<ExperimentRow>& rows, bool wall_time) {
  out << kBenchCsvHeader << '\n';
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%s,%s,%zu,%d,%.6g,%.6g,%.3f", r.instance, r.family.c_str(),
                  r.heuristic.c_str(), r.k, r.converged ? 1 : 0, r.rel_error_ecz, r.rel_error_ecg,
                  wall_time ? r.wall_ms : 0.0);
    out << buf << '\n';
  }
}

}  // namespace edgecorr
