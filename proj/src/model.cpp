#include "edgecorr/model.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <utility>

#include "edgecorr/errors.hpp"

namespace edgecorr {

FactorNetwork condition(const FactorNetwork& net, const Evidence& evidence) {
  std::vector<int> cards = net.cardinalities();
  for (const auto& [v, x] : evidence) {
    if (v < 0 || static_cast<std::size_t>(v) >= cards.size())
      throw IndexError("evidence on unknown variable " + std::to_string(v));
    if (x < 0 || x >= cards[static_cast<std::size_t>(v)])
      throw IndexError("evidence value " + std::to_string(x) + " out of range for variable " + std::to_string(v));
    cards[static_cast<std::size_t>(v)] = 1;
  }
  if (evidence.empty()) return net;

  FactorNetwork out(cards);
  for (const Factor& f : net.factors()) {
    const auto strides = f.strides();
    std::vector<int> new_cards(f.cards());
    std::size_t base = 0;
    for (std::size_t p = 0; p < f.arity(); ++p) {
      auto it = evidence.find(f.scope()[p]);
      if (it == evidence.end()) continue;
      base += static_cast<std::size_t>(it->second) * strides[p];
      new_cards[p] = 1;
    }
    // Walk the sliced configurations in row-major order of the new scope.
    const std::size_t n = table_size(new_cards);
    std::vector<double> table(n);
    std::vector<int> ctr(f.arity(), 0);
    std::size_t idx = base;
    for (std::size_t t = 0; t < n; ++t) {
      table[t] = f.table()[idx];
      for (std::size_t p = f.arity(); p-- > 0;) {
        if (++ctr[p] < new_cards[p]) {
          idx += strides[p];
          break;
        }
        idx -= static_cast<std::size_t>(ctr[p] - 1) * strides[p];
        ctr[p] = 0;
      }
    }
    out.add_factor(Factor(f.scope(), std::move(new_cards), std::move(table), f.log_scale()));
  }
  return out;
}

VarId ExtendedModel::original_of(VarId var) const {
  for (auto it = clone_of.find(var); it != clone_of.end(); it = clone_of.find(var)) var = it->second;
  return var;
}

std::vector<VarId> ExtendedModel::original_scope(std::size_t f) const {
  std::vector<VarId> scope = net.factor(f).scope();
  for (VarId& v : scope) v = original_of(v);
  return scope;
}

ExtendedModel extend_for_deletion(const FactorNetwork& net, const std::vector<Cut>& cuts) {
  ExtendedModel model;
  model.num_original_variables = net.num_variables();
  std::set<std::pair<std::size_t, VarId>> seen;
  for (const Cut& c : cuts) {
    if (c.factor >= net.num_factors()) throw ScopeError("cut names unknown factor " + std::to_string(c.factor));
    if (!net.factor(c.factor).contains(c.var))
      throw ScopeError("variable " + std::to_string(c.var) + " is not in the scope of factor " +
                       std::to_string(c.factor));
    if (!seen.emplace(c.factor, c.var).second)
      throw ScopeError("duplicate cut (" + std::to_string(c.factor) + ", " + std::to_string(c.var) + ")");
  }

  std::vector<Factor> factors = net.factors();
  FactorNetwork ext(net.cardinalities());
  for (const Cut& c : cuts) {
    const int card = net.cardinality(c.var);
    const VarId clone = ext.add_variable(card);
    Factor& f = factors[c.factor];
    std::vector<VarId> scope = f.scope();
    scope[static_cast<std::size_t>(f.position(c.var))] = clone;
    f = Factor(std::move(scope), f.cards(), f.table(), f.log_scale());
    model.equiv_edges.push_back({c.var, clone, card, c.factor});
    model.clone_of[clone] = c.var;
  }
  for (Factor& f : factors) ext.add_factor(std::move(f));
  model.net = std::move(ext);
  return model;
}

Cut default_cut(const FactorNetwork& net, std::size_t factor) {
  const Factor& f = net.factor(factor);
  if (f.arity() < 2) throw ScopeError("factor " + std::to_string(factor) + " is not an edge");
  return {factor, *std::min_element(f.scope().begin(), f.scope().end())};
}

std::vector<Cut> full_cut_set(const FactorNetwork& net) {
  std::vector<Cut> cuts;
  for (std::size_t f = 0; f < net.num_factors(); ++f) {
    const Factor& fac = net.factor(f);
    if (fac.arity() < 2) continue;
    const VarId keep = *std::max_element(fac.scope().begin(), fac.scope().end());
    for (VarId v : fac.scope())
      if (v != keep) cuts.push_back({f, v});
  }
  return cuts;
}

FactorNetwork with_equivalence_factors(const ExtendedModel& model) {
  FactorNetwork out = model.net;
  for (const EquivalenceEdge& e : model.equiv_edges) out.add_factor(Factor::equivalence(e.i, e.j, e.card));
  return out;
}

}  // namespace edgecorr
