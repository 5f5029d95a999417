#include "edgecorr/inference.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>

#include "edgecorr/errors.hpp"

namespace edgecorr {
namespace {

// Product of `factors` over out_scope + sum_scope, with sum_scope summed out.
// Every factor variable must appear in one of the two scopes.
Factor combine(std::span<const Factor* const> factors, const std::vector<VarId>& out_scope,
               const std::vector<int>& out_cards, const std::vector<VarId>& sum_scope,
               const std::vector<int>& sum_cards) {
  std::vector<VarId> all(out_scope);
  all.insert(all.end(), sum_scope.begin(), sum_scope.end());
  std::vector<int> all_cards(out_cards);
  all_cards.insert(all_cards.end(), sum_cards.begin(), sum_cards.end());

  const std::size_t nf = factors.size();
  const std::size_t nv = all.size();
  // stride[q * nf + f]: step of factor f's index when variable all[q] advances
  std::vector<std::size_t> stride(nv * nf, 0);
  std::vector<const double*> tables(nf);
  double log_scale = 0.0;
  for (std::size_t f = 0; f < nf; ++f) {
    const Factor& fac = *factors[f];
    tables[f] = fac.table().data();
    log_scale += fac.log_scale();
    const auto s = fac.strides();
    for (std::size_t p = 0; p < fac.arity(); ++p) {
      auto it = std::find(all.begin(), all.end(), fac.scope()[p]);
      if (it == all.end()) throw std::logic_error("combine: factor variable outside target scope");
      stride[static_cast<std::size_t>(it - all.begin()) * nf + f] = s[p];
    }
  }

  const std::size_t out_size = table_size(out_cards);
  const std::size_t sum_size = table_size(sum_cards);
  std::vector<double> acc(out_size, 0.0);
  std::vector<std::size_t> idx(nf, 0);
  std::vector<int> ctr(nv, 0);
  for (std::size_t o = 0; o < out_size; ++o) {
    double s = 0.0;
    for (std::size_t t = 0; t < sum_size; ++t) {
      double prod = 1.0;
      for (std::size_t f = 0; f < nf && prod != 0.0; ++f) prod *= tables[f][idx[f]];
      s += prod;
      for (std::size_t q = nv; q-- > 0;) {
        const std::size_t* sq = &stride[q * nf];
        if (++ctr[q] < all_cards[q]) {
          for (std::size_t f = 0; f < nf; ++f) idx[f] += sq[f];
          break;
        }
        const auto back = static_cast<std::size_t>(ctr[q] - 1);
        for (std::size_t f = 0; f < nf; ++f) idx[f] -= back * sq[f];
        ctr[q] = 0;
      }
    }
    acc[o] = s;
  }
  Factor out(out_scope, out_cards, std::move(acc), log_scale);
  out.rescale();
  return out;
}

void check_vars(const FactorNetwork& net, std::span<const VarId> vars) {
  for (std::size_t a = 0; a < vars.size(); ++a) {
    if (vars[a] < 0 || static_cast<std::size_t>(vars[a]) >= net.num_variables())
      throw ScopeError("unknown variable " + std::to_string(vars[a]));
    for (std::size_t b = a + 1; b < vars.size(); ++b)
      if (vars[a] == vars[b]) throw ScopeError("variable " + std::to_string(vars[a]) + " listed twice");
  }
}

double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

}  // namespace

EliminationOrder min_fill_order(const FactorNetwork& net, std::span<const VarId> keep,
                                std::optional<std::size_t> excluded) {
  check_vars(net, keep);
  const std::size_t n = net.num_variables();
  std::vector<char> adj(n * n, 0);
  std::vector<std::vector<VarId>> nbrs(n);
  auto connect = [&](VarId a, VarId b) {
    const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
    if (a == b || adj[ua * n + ub]) return;
    adj[ua * n + ub] = adj[ub * n + ua] = 1;
    nbrs[ua].push_back(b);
    nbrs[ub].push_back(a);
  };
  for (std::size_t f = 0; f < net.num_factors(); ++f) {
    if (excluded && *excluded == f) continue;
    const auto& s = net.factor(f).scope();
    for (std::size_t a = 0; a < s.size(); ++a)
      for (std::size_t b = a + 1; b < s.size(); ++b) connect(s[a], s[b]);
  }

  std::vector<char> kept(n, 0), gone(n, 0), dirty(n, 1);
  for (VarId v : keep) kept[static_cast<std::size_t>(v)] = 1;
  std::vector<std::size_t> fill(n, 0);
  auto fill_of = [&](std::size_t v) {
    std::size_t count = 0;
    const auto& nb = nbrs[v];
    for (std::size_t a = 0; a < nb.size(); ++a)
      for (std::size_t b = a + 1; b < nb.size(); ++b)
        if (!adj[static_cast<std::size_t>(nb[a]) * n + static_cast<std::size_t>(nb[b])]) ++count;
    return count;
  };

  EliminationOrder result;
  const std::size_t to_eliminate = n - keep.size();
  result.order.reserve(to_eliminate);
  while (result.order.size() < to_eliminate) {
    std::size_t best = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (kept[v] || gone[v]) continue;
      if (dirty[v]) {
        fill[v] = fill_of(v);
        dirty[v] = 0;
      }
      if (best == n || fill[v] < fill[best]) best = v;
    }
    const std::vector<VarId> nb = nbrs[best];
    result.induced_width = std::max(result.induced_width, static_cast<int>(nb.size()));
    for (std::size_t a = 0; a < nb.size(); ++a)
      for (std::size_t b = a + 1; b < nb.size(); ++b) connect(nb[a], nb[b]);
    for (VarId u : nb) {
      auto& l = nbrs[static_cast<std::size_t>(u)];
      l.erase(std::find(l.begin(), l.end(), static_cast<VarId>(best)));
    }
    for (VarId u : nb) {
      dirty[static_cast<std::size_t>(u)] = 1;
      for (VarId w : nbrs[static_cast<std::size_t>(u)]) dirty[static_cast<std::size_t>(w)] = 1;
    }
    nbrs[best].clear();
    gone[best] = 1;
    result.order.push_back(static_cast<VarId>(best));
  }
  return result;
}

Factor eliminate(const FactorNetwork& net, std::span<const VarId> keep, std::optional<std::size_t> excluded,
                 const EliminationOrder* order) {
  check_vars(net, keep);
  EliminationOrder local;
  if (!order) {
    local = min_fill_order(net, keep, excluded);
    order = &local;
  }
  if (order->order.size() + keep.size() != net.num_variables())
    throw std::invalid_argument("elimination order does not cover the non-kept variables");

  std::vector<const Factor*> active;
  active.reserve(net.num_factors());
  for (std::size_t f = 0; f < net.num_factors(); ++f)
    if (!excluded || *excluded != f) active.push_back(&net.factor(f));
  std::deque<Factor> owned;
  double extra_log = 0.0;

  std::vector<const Factor*> bucket, rest;
  for (VarId v : order->order) {
    bucket.clear();
    rest.clear();
    for (const Factor* f : active) (f->contains(v) ? bucket : rest).push_back(f);
    if (bucket.empty()) {
      // Unconstrained variable: summing it out multiplies by its cardinality.
      extra_log += std::log(static_cast<double>(net.cardinality(v)));
      continue;
    }
    std::vector<VarId> scope;
    for (const Factor* f : bucket)
      for (VarId u : f->scope())
        if (u != v) scope.push_back(u);
    std::sort(scope.begin(), scope.end());
    scope.erase(std::unique(scope.begin(), scope.end()), scope.end());
    std::vector<int> cards;
    for (VarId u : scope) cards.push_back(net.cardinality(u));
    owned.push_back(combine(bucket, scope, cards, {v}, {net.cardinality(v)}));
    rest.push_back(&owned.back());
    active.swap(rest);
  }

  std::vector<VarId> out_scope(keep.begin(), keep.end());
  std::vector<int> out_cards;
  for (VarId u : out_scope) out_cards.push_back(net.cardinality(u));
  Factor out = combine(active, out_scope, out_cards, {}, {});
  return Factor(out.scope(), out.cards(), out.table(), out.log_scale() + extra_log);
}

double log_partition(const FactorNetwork& net, const EliminationOrder* order) {
  const Factor f = eliminate(net, {}, std::nullopt, order);
  if (f.table()[0] <= 0.0) throw ZeroPartition("partition function is zero");
  return std::log(f.table()[0]) + f.log_scale();
}

JointTable marginal(const FactorNetwork& net, std::span<const VarId> query, const EliminationOrder* order) {
  const Factor f = eliminate(net, query, std::nullopt, order);
  double total = 0.0;
  for (double v : f.table()) total += v;
  if (total <= 0.0) throw ZeroPartition("partition function is zero");
  JointTable jt;
  jt.scope = f.scope();
  jt.cards = f.cards();
  jt.probs.reserve(f.size());
  for (double v : f.table()) jt.probs.push_back(v / total);
  jt.log_norm = std::log(total) + f.log_scale();
  return jt;
}

Factor marginal_excluding_factor(const FactorNetwork& net, std::size_t excluded, VarId var,
                                 const EliminationOrder* order) {
  if (excluded >= net.num_factors()) throw ScopeError("unknown factor " + std::to_string(excluded));
  const Factor& theta = net.factor(excluded);
  if (theta.arity() != 1 || theta.scope()[0] != var)
    throw ScopeError("factor " + std::to_string(excluded) + " is not unary over variable " + std::to_string(var));
  const VarId keep[] = {var};
  return eliminate(net, keep, excluded, order);
}

JointTable JointTable::project(std::span<const VarId> vars) const {
  std::vector<std::size_t> pos;
  std::vector<int> out_cards;
  for (VarId v : vars) {
    auto it = std::find(scope.begin(), scope.end(), v);
    if (it == scope.end()) throw ScopeError("variable " + std::to_string(v) + " not in joint table");
    pos.push_back(static_cast<std::size_t>(it - scope.begin()));
    out_cards.push_back(cards[pos.back()]);
  }
  std::vector<std::size_t> out_stride(pos.size());
  std::size_t s = 1;
  for (std::size_t k = pos.size(); k-- > 0;) {
    out_stride[k] = s;
    s *= static_cast<std::size_t>(out_cards[k]);
  }
  JointTable out;
  out.scope.assign(vars.begin(), vars.end());
  out.cards = out_cards;
  out.probs.assign(s, 0.0);
  out.log_norm = log_norm;
  std::vector<int> ctr(scope.size(), 0);
  for (double p : probs) {
    std::size_t o = 0;
    for (std::size_t k = 0; k < pos.size(); ++k) o += static_cast<std::size_t>(ctr[pos[k]]) * out_stride[k];
    out.probs[o] += p;
    for (std::size_t q = scope.size(); q-- > 0;) {
      if (++ctr[q] < cards[q]) break;
      ctr[q] = 0;
    }
  }
  return out;
}

double JointTable::entropy() const {
  double h = 0.0;
  for (double p : probs) h -= xlogx(p);
  return h;
}

double mutual_information(const JointTable& joint, std::size_t split) {
  const std::span<const VarId> all(joint.scope);
  const JointTable pa = joint.project(all.first(split));
  const JointTable pb = joint.project(all.subspan(split));
  const std::size_t nb = pb.probs.size();
  double mi = 0.0;
  for (std::size_t a = 0; a < pa.probs.size(); ++a)
    for (std::size_t b = 0; b < nb; ++b) {
      const double p = joint.probs[a * nb + b];
      if (p > 0.0) mi += p * std::log(p / (pa.probs[a] * pb.probs[b]));
    }
  return std::max(0.0, mi);
}

double mutual_information(const FactorNetwork& net, std::span<const VarId> a, std::span<const VarId> b) {
  std::vector<VarId> both(a.begin(), a.end());
  for (VarId v : b) {
    if (std::find(a.begin(), a.end(), v) != a.end())
      throw ScopeError("mutual information sets share variable " + std::to_string(v));
    both.push_back(v);
  }
  return mutual_information(marginal(net, both), a.size());
}

double set_mutual_information(const JointTable& joint, std::span<const VarId> a, std::span<const VarId> b) {
  std::vector<VarId> u(a.begin(), a.end());
  for (VarId v : b)
    if (std::find(u.begin(), u.end(), v) == u.end()) u.push_back(v);
  const double mi = joint.project(a).entropy() + joint.project(b).entropy() - joint.project(u).entropy();
  return std::max(0.0, mi);
}

}  // namespace edgecorr
