#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "edgecorr/bench.hpp"
#include "edgecorr/correction.hpp"
#include "edgecorr/edbp.hpp"
#include "edgecorr/errors.hpp"
#include "edgecorr/inference.hpp"
#include "edgecorr/model.hpp"
#include "edgecorr/oracle.hpp"
#include "edgecorr/recovery.hpp"
#include "edgecorr/uai.hpp"

namespace edgecorr::cli {
namespace {

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string rel(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

void print_log_value(std::ostream& out, const std::string& key, double log_value) {
  out << key << '=' << num(log_value) << '\n';
  const std::string base = key.substr(0, 3) == "log" ? key.substr(3) : "_" + key;
  out << "log10" << base << '=' << num(log_value / std::log(10.0)) << '\n';
}

struct InputOptions {
  std::string model;
  std::string evidence;
};

FactorNetwork load_input(const InputOptions& in) {
  FactorNetwork net = load_uai_file(in.model);
  if (!in.evidence.empty()) net = condition(net, load_evidence_file(in.evidence));
  return net;
}

void add_input(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("model", in.model, "UAI model file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--evid", in.evidence, "UAI evidence file")->check(CLI::ExistingFile);
}

struct EdbpOptions {
  double tolerance = 1e-10;
  int max_iters = 1000;
  double damping = 0.0;
  std::string schedule = "seq";
};

void add_edbp(CLI::App* cmd, EdbpOptions& o) {
  cmd->add_option("--tolerance", o.tolerance, "Convergence threshold on parameter change")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--max-iters", o.max_iters, "Iteration cap")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--damping", o.damping, "Damping factor in [0, 1)")
      ->check(CLI::Range(0.0, 1.0))
      ->check([](const std::string& s) { return std::stod(s) < 1.0 ? std::string() : "damping must be below 1"; })
      ->capture_default_str();
  cmd->add_option("--schedule", o.schedule, "seq or sync")
      ->check(CLI::IsMember({"seq", "sync"}))
      ->capture_default_str();
}

EdbpConfig to_config(const EdbpOptions& o) {
  EdbpConfig c;
  c.tolerance = o.tolerance;
  c.max_iters = o.max_iters;
  c.damping = o.damping;
  c.schedule = o.schedule == "sync" ? Schedule::synchronous : Schedule::sequential;
  return c;
}

std::vector<Cut> read_cuts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::vector<Cut> cuts;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    long long f = 0, v = 0;
    if (!(ls >> f)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw ParseError("expected factor id", lineno, 1);
    }
    std::string rest;
    if (!(ls >> v) || (ls >> rest) || f < 0) throw ParseError("expected 'factor_id variable_id'", lineno, 1);
    cuts.push_back({static_cast<std::size_t>(f), static_cast<VarId>(v)});
  }
  return cuts;
}

// ---- exact ----

struct ExactOptions {
  InputOptions in;
  bool brute = false;
  bool marginals = false;
};

int run_exact(const ExactOptions& o, std::ostream& out) {
  const FactorNetwork net = load_input(o.in);
  double log_z = 0.0;
  if (o.brute) {
    log_z = oracle::brute_log_partition(net);
    out << "method=brute\n";
  } else {
    const EliminationOrder order = min_fill_order(net);
    log_z = log_partition(net, &order);
    out << "method=elimination\ninduced_width=" << order.induced_width << '\n';
  }
  print_log_value(out, "log_Z", log_z);
  if (std::abs(log_z) < 700.0) out << "Z=" << num(std::exp(log_z)) << '\n';
  if (o.marginals) {
    for (VarId v = 0; v < static_cast<VarId>(net.num_variables()); ++v) {
      const VarId q[] = {v};
      const JointTable t = o.brute ? oracle::brute_marginal(net, q) : marginal(net, q);
      out << "marginal " << v;
      for (double p : t.probs) out << ' ' << num(p);
      out << '\n';
    }
  }
  return kOk;
}

// ---- approx ----

struct ApproxOptions {
  InputOptions in;
  std::string cuts;
  bool spanning_tree = false;
  std::uint64_t seed = 0;
  EdbpOptions edbp;
  bool strict = false;
  bool exact = false;
};

int run_approx(const ApproxOptions& o, std::ostream& out, std::ostream& err) {
  const FactorNetwork net = load_input(o.in);
  ParametrizedModel model = [&] {
    if (o.spanning_tree) {
      ExtendedModel ext = extend_for_deletion(net, full_cut_set(net));
      std::vector<std::size_t> deleted = spanning_tree_cuts(ext, o.seed);
      return init_parameters(ext, std::move(deleted));
    }
    ExtendedModel ext = extend_for_deletion(net, read_cuts(o.cuts));
    std::vector<std::size_t> all(ext.equiv_edges.size());
    for (std::size_t e = 0; e < all.size(); ++e) all[e] = e;
    return init_parameters(ext, std::move(all));
  }();
  auto [fixed, conv] = edbp_iterate(std::move(model), to_config(o.edbp));
  if (!conv.converged) {
    err << "warning: ED-BP did not converge after " << conv.iterations << " iterations (residual "
        << num(conv.final_residual) << ")\n";
    if (o.strict) return kComputation;
  }
  const CorrectionReport rep = correct(fixed);
  print_log_value(out, "log_Z_prime", rep.log_Z_prime);
  print_log_value(out, "log_Z_ecz", rep.log_Z_ecz);
  print_log_value(out, "log_Z_ecg", rep.log_Z_ecg);
  if (o.exact) {
    const double exact = log_partition(net);
    print_log_value(out, "log_Z_exact", exact);
    out << "rel_err_ecz=" << rel(relative_error(rep.log_Z_ecz, exact)) << '\n';
    out << "rel_err_ecg=" << rel(relative_error(rep.log_Z_ecg, exact)) << '\n';
  }
  out << "n_deleted=" << rep.n_deleted << '\n';
  out << "converged=" << (conv.converged ? 1 : 0) << '\n';
  out << "iterations=" << conv.iterations << '\n';
  out << "final_residual=" << num(conv.final_residual) << '\n';
  const ExtendedModel& ext = fixed.base();
  for (const CorrectionTerms& t : rep.terms) {
    out << "edge=" << t.edge << " factor=" << t.equiv.factor << " var=" << t.equiv.i << " clone=" << t.equiv.j
        << " original=";
    const auto scope = ext.original_scope(t.equiv.factor);
    for (std::size_t k = 0; k < scope.size(); ++k) out << (k ? "," : "") << scope[k];
    out << " log_z=" << num(t.log_z) << " log_y=" << num(t.log_y) << " mi=" << num(t.mi) << '\n';
  }
  return kOk;
}

// ---- sweep ----

struct SweepOptions {
  InputOptions in;
  std::string heuristic = "random";
  std::size_t k_step = 1;
  std::uint64_t seed = 0;
  std::optional<std::size_t> max_steps;
  EdbpOptions edbp;
  bool no_exact = false;
  bool no_wall_time = false;
  std::string out;
};

std::ostream& open_out(const std::string& path, std::ostream& fallback, std::unique_ptr<std::ofstream>& file) {
  if (path.empty() || path == "-") return fallback;
  file = std::make_unique<std::ofstream>(path);
  if (!*file) throw Error("cannot write " + path);
  return *file;
}

int run_sweep(const SweepOptions& o, std::ostream& stdout_, std::ostream& err) {
  const FactorNetwork net = load_input(o.in);
  SweepConfig cfg;
  cfg.heuristic = o.heuristic;
  cfg.k_step = o.k_step;
  cfg.seed = o.seed;
  cfg.max_steps = o.max_steps;
  cfg.edbp = to_config(o.edbp);
  std::optional<double> exact;
  if (!o.no_exact) exact = log_partition(net);
  const auto steps = recovery_sweep(net, cfg);

  std::unique_ptr<std::ofstream> file;
  std::ostream& out = open_out(o.out, stdout_, file);
  out << "instance,heuristic,k,converged,log_Z_exact,log_Z_ecz,log_Z_ecg,rel_err_ecz,rel_err_ecg,wall_ms\n";
  std::size_t unconverged = 0;
  for (const SweepStep& s : steps) {
    const bool ok = s.convergence.converged && s.report;
    unconverged += ok ? 0 : 1;
    out << 0 << ',' << o.heuristic << ',' << s.k << ',' << (ok ? 1 : 0) << ',';
    out << (exact ? num(*exact) : "") << ',';
    if (s.report) {
      out << num(s.report->log_Z_ecz) << ',' << num(s.report->log_Z_ecg) << ',';
      if (exact)
        out << rel(relative_error(s.report->log_Z_ecz, *exact)) << ',' << rel(relative_error(s.report->log_Z_ecg, *exact));
      else
        out << ',';
    } else {
      out << ",,,";
    }
    char wall[32];
    std::snprintf(wall, sizeof wall, "%.3f", o.no_wall_time ? 0.0 : s.wall_ms);
    out << ',' << wall << '\n';
  }
  if (unconverged) err << "warning: " << unconverged << " sweep step(s) did not converge\n";
  return kOk;
}

// ---- bench ----

struct BenchOptions {
  std::string family = "grid";
  int rows = 4, cols = 4;
  int roots = 8, sinks = 8, parents = 4, positive = 0;
  int instances = 25;
  std::uint64_t seed = 0;
  std::vector<std::string> heuristics{"random"};
  std::size_t k_step = 1;
  std::optional<std::size_t> max_steps;
  EdbpOptions edbp;
  bool no_wall_time = false;
  std::string out;
};

int run_bench(const BenchOptions& o, std::ostream& stdout_, std::ostream& err) {
  FamilySpec spec;
  if (o.family == "grid") {
    GridSpec g;
    g.rows = o.rows;
    g.cols = o.cols;
    g.seed = o.seed;
    spec = g;
  } else {
    NoisyOrSpec n;
    n.roots = o.roots;
    n.sinks = o.sinks;
    n.parents_per_sink = o.parents;
    n.positive_findings = o.positive;
    n.seed = o.seed;
    spec = n;
  }
  ExperimentConfig cfg;
  cfg.heuristics = o.heuristics;
  cfg.sweep.k_step = o.k_step;
  cfg.sweep.max_steps = o.max_steps;
  cfg.sweep.edbp = to_config(o.edbp);
  const auto rows = run_experiment({spec}, cfg, o.instances);
  std::unique_ptr<std::ofstream> file;
  write_bench_csv(open_out(o.out, stdout_, file), rows, !o.no_wall_time);
  const auto dropped = dropped_instances(rows);
  if (!dropped.empty()) {
    err << "warning: instances with non-converged steps (excluded from summaries):";
    for (int i : dropped) err << ' ' << i;
    err << '\n';
  }
  return kOk;
}

// ---- convert ----

struct ConvertOptions {
  InputOptions in;
  std::string out;
};

int run_convert(const ConvertOptions& o, std::ostream& stdout_) {
  const FactorNetwork net = load_input(o.in);
  std::unique_ptr<std::ofstream> file;
  open_out(o.out, stdout_, file) << save_uai(net);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Partition function approximation by edge deletion and correction", "edgecorr"};
  app.require_subcommand(1);

  ExactOptions exact;
  auto* exact_cmd = app.add_subcommand("exact", "Exact log Z by variable elimination or enumeration");
  add_input(exact_cmd, exact.in);
  exact_cmd->add_flag("--brute", exact.brute, "Enumerate every configuration instead");
  exact_cmd->add_flag("--marginals", exact.marginals, "Also print single-variable marginals");

  ApproxOptions approx;
  auto* approx_cmd = app.add_subcommand("approx", "Delete edges, run ED-BP and print the correction report");
  add_input(approx_cmd, approx.in);
  auto* cuts_opt = approx_cmd->add_option("--cuts", approx.cuts, "File of 'factor_id variable_id' lines")
                       ->check(CLI::ExistingFile);
  auto* tree_opt =
      approx_cmd->add_flag("--spanning-tree", approx.spanning_tree, "Keep a random spanning tree, delete the rest");
  cuts_opt->excludes(tree_opt);
  approx_cmd->add_option("--seed", approx.seed, "Spanning-tree seed")->capture_default_str();
  add_edbp(approx_cmd, approx.edbp);
  approx_cmd->add_flag("--strict", approx.strict, "Exit 2 when ED-BP does not converge");
  approx_cmd->add_flag("--exact", approx.exact, "Also compute exact log Z and relative errors");

  SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Recovery sweep from a random spanning tree, as CSV");
  add_input(sweep_cmd, sweep.in);
  sweep_cmd->add_option("--heuristic", sweep.heuristic, "random, mi, mi2 or magnitude")
      ->check(CLI::IsMember({"random", "mi", "mi2", "magnitude"}))
      ->capture_default_str();
  sweep_cmd->add_option("--k-step", sweep.k_step, "Edges recovered per step")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sweep_cmd->add_option("--seed", sweep.seed)->capture_default_str();
  sweep_cmd->add_option("--max-steps", sweep.max_steps, "Stop after this many recovery steps");
  add_edbp(sweep_cmd, sweep.edbp);
  sweep_cmd->add_flag("--no-exact", sweep.no_exact, "Skip exact log Z (leaves error columns empty)");
  sweep_cmd->add_flag("--no-wall-time", sweep.no_wall_time, "Print wall_ms as 0 for reproducible output");
  sweep_cmd->add_option("--out", sweep.out, "Output CSV path (default stdout)");

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Generate instances and sweep each, as CSV");
  bench_cmd->add_option("--family", bench.family, "grid or noisyor")
      ->check(CLI::IsMember({"grid", "noisyor"}))
      ->capture_default_str();
  bench_cmd->add_option("--rows", bench.rows)->check(CLI::PositiveNumber)->capture_default_str();
  bench_cmd->add_option("--cols", bench.cols)->check(CLI::PositiveNumber)->capture_default_str();
  bench_cmd->add_option("--roots", bench.roots)->check(CLI::NonNegativeNumber)->capture_default_str();
  bench_cmd->add_option("--sinks", bench.sinks)->check(CLI::NonNegativeNumber)->capture_default_str();
  bench_cmd->add_option("--parents", bench.parents, "Parents per sink")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  bench_cmd->add_option("--positive", bench.positive, "Positive findings")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  bench_cmd->add_option("--instances", bench.instances)->check(CLI::PositiveNumber)->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed)->capture_default_str();
  bench_cmd->add_option("--heuristic", bench.heuristics, "Comma-separated list")
      ->delimiter(',')
      ->check(CLI::IsMember({"random", "mi", "mi2", "magnitude"}));
  bench_cmd->add_option("--k-step", bench.k_step)->check(CLI::PositiveNumber)->capture_default_str();
  bench_cmd->add_option("--max-steps", bench.max_steps);
  add_edbp(bench_cmd, bench.edbp);
  bench_cmd->add_flag("--no-wall-time", bench.no_wall_time, "Print wall_ms as 0 for reproducible output");
  bench_cmd->add_option("--out", bench.out, "Output CSV path (default stdout)");

  ConvertOptions convert;
  auto* convert_cmd = app.add_subcommand("convert", "Rewrite a model (BAYES or MARKOV) as MARKOV factors");
  add_input(convert_cmd, convert.in);
  convert_cmd->add_option("-o,--out", convert.out, "Output path (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    if (app.got_subcommand(approx_cmd) && approx.cuts.empty() && !approx.spanning_tree)
      throw CLI::ValidationError("approx needs --cuts FILE or --spanning-tree");
    if (app.got_subcommand(bench_cmd) && bench.family == "noisyor" &&
        (bench.parents > bench.roots || bench.positive > bench.sinks))
      throw CLI::ValidationError("noisy-or needs parents <= roots and positive <= sinks");
  } catch (const CLI::ParseError& e) {
    CLI::App* sub = nullptr;
    for (CLI::App* s : app.get_subcommands()) sub = s;
    const std::string usage = sub ? sub->help() : app.help();
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      out << usage;
      return kOk;
    }
    err << "error: " << e.what() << '\n' << usage;
    return kUsage;
  }

  try {
    if (app.got_subcommand(exact_cmd)) return run_exact(exact, out);
    if (app.got_subcommand(approx_cmd)) return run_approx(approx, out, err);
    if (app.got_subcommand(sweep_cmd)) return run_sweep(sweep, out, err);
    if (app.got_subcommand(bench_cmd)) return run_bench(bench, out, err);
    return run_convert(convert, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kComputation;
  }
}

}  // namespace edgecorr::cli
