#include "edgecorr/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "edgecorr/errors.hpp"

namespace edgecorr::oracle {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Running sum of exp(terms) kept as exp(max) * scaled.
struct LogAccumulator {
  double max = kNegInf;
  double scaled = 0.0;

  void add(double lw) {
    if (lw == kNegInf) return;
    if (lw > max) {
      scaled = scaled * std::exp(max - lw) + 1.0;
      max = lw;
    } else {
      scaled += std::exp(lw - max);
    }
  }
  double log() const { return max == kNegInf ? kNegInf : max + std::log(scaled); }
};

void check_budget(const FactorNetwork& net, EnumerationBudget budget) {
  if (net.state_count() > budget.max_states)
    throw BudgetExceeded("network has more than " + std::to_string(budget.max_states) + " joint states");
}

double log_weight(const FactorNetwork& net, const std::vector<int>& x) {
  double lw = 0.0;
  for (const Factor& f : net.factors()) {
    std::size_t idx = 0;
    for (std::size_t p = 0; p < f.arity(); ++p)
      idx = idx * static_cast<std::size_t>(f.cards()[p]) + static_cast<std::size_t>(x[static_cast<std::size_t>(f.scope()[p])]);
    const double v = f.table()[idx];
    if (v == 0.0) return kNegInf;
    lw += std::log(v) + f.log_scale();
  }
  return lw;
}

bool advance(std::vector<int>& x, const std::vector<int>& cards) {
  for (std::size_t v = x.size(); v-- > 0;) {
    if (++x[v] < cards[v]) return true;
    x[v] = 0;
  }
  return false;
}

}  // namespace

double brute_log_partition(const FactorNetwork& net, EnumerationBudget budget) {
  check_budget(net, budget);
  std::vector<int> x(net.num_variables(), 0);
  LogAccumulator acc;
  do {
    acc.add(log_weight(net, x));
  } while (advance(x, net.cardinalities()));
  if (acc.max == kNegInf) throw ZeroPartition("partition function is zero");
  return acc.log();
}

JointTable brute_marginal(const FactorNetwork& net, std::span<const VarId> query, EnumerationBudget budget) {
  check_budget(net, budget);
  JointTable jt;
  jt.scope.assign(query.begin(), query.end());
  for (VarId v : query) {
    if (v < 0 || static_cast<std::size_t>(v) >= net.num_variables())
      throw ScopeError("unknown variable " + std::to_string(v));
    jt.cards.push_back(net.cardinality(v));
  }
  std::vector<LogAccumulator> cells(table_size(jt.cards));
  LogAccumulator total;
  std::vector<int> x(net.num_variables(), 0);
  do {
    const double lw = log_weight(net, x);
    std::size_t q = 0;
    for (std::size_t k = 0; k < query.size(); ++k)
      q = q * static_cast<std::size_t>(jt.cards[k]) + static_cast<std::size_t>(x[static_cast<std::size_t>(query[k])]);
    cells[q].add(lw);
    total.add(lw);
  } while (advance(x, net.cardinalities()));
  if (total.max == kNegInf) throw ZeroPartition("partition function is zero");
  jt.log_norm = total.log();
  for (const auto& c : cells) jt.probs.push_back(c.max == kNegInf ? 0.0 : std::exp(c.log() - jt.log_norm));
  return jt;
}

double brute_mi(const FactorNetwork& net, std::span<const VarId> a, std::span<const VarId> b,
                EnumerationBudget budget) {
  std::vector<VarId> both(a.begin(), a.end());
  both.insert(both.end(), b.begin(), b.end());
  const JointTable joint = brute_marginal(net, both, budget);
  std::size_t na = 1, nb = 1;
  for (std::size_t k = 0; k < a.size(); ++k) na *= static_cast<std::size_t>(joint.cards[k]);
  for (std::size_t k = a.size(); k < both.size(); ++k) nb *= static_cast<std::size_t>(joint.cards[k]);
  std::vector<double> pa(na, 0.0), pb(nb, 0.0);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j) {
      pa[i] += joint.probs[i * nb + j];
      pb[j] += joint.probs[i * nb + j];
    }
  double mi = 0.0;
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j) {
      const double p = joint.probs[i * nb + j];
      if (p > 0.0) mi += p * std::log(p / (pa[i] * pb[j]));
    }
  return std::max(0.0, mi);
}

}  // namespace edgecorr::oracle
