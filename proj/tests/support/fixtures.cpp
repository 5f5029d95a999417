#include "fixtures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

namespace edgecorr::testing {

namespace {

const double kPsi12[] = {0.9, 0.1, 0.1, 0.9};
const double kPsi13[] = {0.1, 0.9, 0.9, 0.1};
const double kPsi23[] = {0.081, 0.810, 0.090, 0.900};

std::vector<double> psi23(bool flipped) {
  std::vector<double> t(std::begin(kPsi23), std::end(kPsi23));
  if (flipped)
    for (double& x : t) x = 1.0 - x;
  return t;
}

}  // namespace

FactorNetwork clique3(bool flipped) {
  FactorNetwork net({2, 2, 2});
  net.add_factor(Factor({0, 1}, {2, 2}, {std::begin(kPsi12), std::end(kPsi12)}));
  net.add_factor(Factor({0, 2}, {2, 2}, {std::begin(kPsi13), std::end(kPsi13)}));
  net.add_factor(Factor({1, 2}, {2, 2}, psi23(flipped)));
  return net;
}

std::string clique3_uai(bool flipped) {
  std::ostringstream s;
  s << "MARKOV\n3\n2 2 2\n3\n2 0 1\n2 0 2\n2 1 2\n\n4\n 0.9 0.1 0.1 0.9\n4\n 0.1 0.9 0.9 0.1\n4\n";
  for (double x : psi23(flipped)) s << ' ' << x;
  s << '\n';
  return s.str();
}

FactorNetwork random_network(SplitMix64& rng, int num_vars, int extra, double lo) {
  FactorNetwork net(std::vector<int>(static_cast<std::size_t>(num_vars), 2));
  auto entry = [&] { return lo + (1.0 - lo) * rng.uniform_open(); };
  for (VarId v = 0; v < num_vars; ++v) net.add_factor(Factor::unary(v, {entry(), entry()}));
  std::vector<VarId> ids(static_cast<std::size_t>(num_vars));
  std::iota(ids.begin(), ids.end(), 0);
  for (int f = 0; f < extra; ++f) {
    const std::size_t arity = (num_vars >= 3 && rng.below(3) == 0) ? 3 : 2;
    rng.shuffle(ids);
    std::vector<VarId> scope(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(arity));
    std::vector<double> table(std::size_t{1} << arity);
    for (double& x : table) x = entry();
    net.add_factor(Factor(scope, std::vector<int>(arity, 2), table));
  }
  return net;
}

FactorNetwork random_pairwise(SplitMix64& rng, int num_vars, int extra, double strength) {
  FactorNetwork net(std::vector<int>(static_cast<std::size_t>(num_vars), 2));
  auto pot = [&] { return std::exp(strength * (2.0 * rng.uniform_open() - 1.0)); };
  for (VarId v = 0; v < num_vars; ++v) net.add_factor(Factor::unary(v, {pot(), pot()}));
  std::set<std::pair<VarId, VarId>> used;
  auto add_edge = [&](VarId a, VarId b) {
    if (a > b) std::swap(a, b);
    if (a == b || !used.insert({a, b}).second) return false;
    net.add_factor(Factor({a, b}, {2, 2}, {pot(), pot(), pot(), pot()}));
    return true;
  };
  for (VarId v = 1; v < num_vars; ++v) add_edge(static_cast<VarId>(rng.below(static_cast<std::uint64_t>(v))), v);
  const std::size_t max_edges = static_cast<std::size_t>(num_vars) * static_cast<std::size_t>(num_vars - 1) / 2;
  for (int added = 0; added < extra && used.size() < max_edges;) {
    const auto a = static_cast<VarId>(rng.below(static_cast<std::uint64_t>(num_vars)));
    const auto b = static_cast<VarId>(rng.below(static_cast<std::uint64_t>(num_vars)));
    if (add_edge(a, b)) ++added;
  }
  return net;
}

FactorNetwork disjoint_union(const FactorNetwork& a, const FactorNetwork& b) {
  std::vector<int> cards = a.cardinalities();
  const auto shift = static_cast<VarId>(cards.size());
  for (int c : b.cardinalities()) cards.push_back(c);
  FactorNetwork net(cards);
  for (const Factor& f : a.factors()) net.add_factor(f);
  for (const Factor& f : b.factors()) {
    std::vector<VarId> scope = f.scope();
    for (VarId& v : scope) v += shift;
    net.add_factor(Factor(scope, f.cards(), f.table(), f.log_scale()));
  }
  return net;
}

Cut random_cut(SplitMix64& rng, const FactorNetwork& net) {
  std::vector<std::size_t> candidates;
  for (std::size_t f = 0; f < net.num_factors(); ++f)
    if (net.factor(f).arity() >= 2) candidates.push_back(f);
  const std::size_t f = candidates.at(rng.below(candidates.size()));
  const auto& scope = net.factor(f).scope();
  return Cut{f, scope[rng.below(scope.size())]};
}

LoopyBpResult loopy_bp_bethe(const FactorNetwork& net, int max_iters, double tol, double damping) {
  const std::size_t n = net.num_variables();
  struct Edge {
    VarId a, b;
    double psi[2][2];
  };
  std::vector<Edge> edges;
  std::vector<std::array<double, 2>> unary(n, {1.0, 1.0});
  std::vector<std::vector<std::pair<double, double>>> unary_tables(n);
  for (const Factor& f : net.factors()) {
    const double scale = std::exp(f.log_scale());
    if (f.arity() == 1) {
      const VarId v = f.scope()[0];
      unary[v][0] *= f.table()[0] * scale;
      unary[v][1] *= f.table()[1] * scale;
      unary_tables[v].push_back({f.table()[0] * scale, f.table()[1] * scale});
    } else {
      Edge e{f.scope()[0], f.scope()[1], {}};
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) e.psi[x][y] = f.table()[static_cast<std::size_t>(2 * x + y)] * scale;
      edges.push_back(e);
    }
  }
  // msg[2e] : edge e -> a, msg[2e+1] : edge e -> b
  std::vector<std::array<double, 2>> msg(2 * edges.size(), {0.5, 0.5});
  auto cavity = [&](VarId v, std::size_t skip) {
    std::array<double, 2> c = unary[v];
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (e == skip) continue;
      if (edges[e].a == v)
        for (int x = 0; x < 2; ++x) c[x] *= msg[2 * e][x];
      if (edges[e].b == v)
        for (int x = 0; x < 2; ++x) c[x] *= msg[2 * e + 1][x];
    }
    return c;
  };
  LoopyBpResult res;
  for (int it = 0; it < max_iters && !res.converged; ++it) {
    double delta = 0.0;
    std::vector<std::array<double, 2>> next(msg.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const auto ca = cavity(edges[e].a, e);
      const auto cb = cavity(edges[e].b, e);
      std::array<double, 2> to_a{0, 0}, to_b{0, 0};
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
          to_a[x] += edges[e].psi[x][y] * cb[y];
          to_b[y] += edges[e].psi[x][y] * ca[x];
        }
      for (auto* m : {&to_a, &to_b}) {
        const double s = (*m)[0] + (*m)[1];
        (*m)[0] /= s;
        (*m)[1] /= s;
      }
      next[2 * e] = to_a;
      next[2 * e + 1] = to_b;
    }
    for (std::size_t k = 0; k < msg.size(); ++k)
      for (int x = 0; x < 2; ++x) {
        const double v = damping * msg[k][x] + (1.0 - damping) * next[k][x];
        delta = std::max(delta, std::abs(v - msg[k][x]));
        msg[k][x] = v;
      }
    res.converged = delta < tol;
  }

  double energy = 0.0, entropy = 0.0;
  auto xlogx = [](double p) { return p > 0 ? p * std::log(p) : 0.0; };
  std::vector<int> degree(n, 0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    ++degree[edges[e].a];
    ++degree[edges[e].b];
    const auto ca = cavity(edges[e].a, e);
    const auto cb = cavity(edges[e].b, e);
    double b[2][2], s = 0.0;
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) s += b[x][y] = edges[e].psi[x][y] * ca[x] * cb[y];
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        b[x][y] /= s;
        energy -= b[x][y] * std::log(edges[e].psi[x][y]);
        entropy -= xlogx(b[x][y]);
      }
  }
  res.node_beliefs.resize(n);
  for (VarId v = 0; v < static_cast<VarId>(n); ++v) {
    auto c = cavity(v, edges.size());
    const double s = c[0] + c[1];
    res.node_beliefs[v] = {c[0] / s, c[1] / s};
    for (const auto& [t0, t1] : unary_tables[v])
      energy -= res.node_beliefs[v][0] * std::log(t0) + res.node_beliefs[v][1] * std::log(t1);
    const double h = -xlogx(res.node_beliefs[v][0]) - xlogx(res.node_beliefs[v][1]);
    entropy -= (degree[v] - 1) * h;
  }
  res.free_energy = energy - entropy;
  return res;
}

}  // namespace edgecorr::testing
