#include "edgecorr/factor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "edgecorr/errors.hpp"

namespace edgecorr {

std::size_t table_size(std::span<const int> cards) {
  std::size_t n = 1;
  for (int c : cards) n *= static_cast<std::size_t>(c);
  return n;
}

Factor::Factor() : table_{1.0} {}

Factor::Factor(std::vector<VarId> scope, std::vector<int> cards, std::vector<double> table,
               double log_scale)
    : scope_(std::move(scope)), cards_(std::move(cards)), table_(std::move(table)), log_scale_(log_scale) {
  if (scope_.size() != cards_.size()) throw ShapeError("factor scope and cardinality lists differ in length");
  for (std::size_t a = 0; a < scope_.size(); ++a) {
    if (cards_[a] < 1) throw ShapeError("cardinality must be positive");
    for (std::size_t b = a + 1; b < scope_.size(); ++b)
      if (scope_[a] == scope_[b]) throw ScopeError("duplicate variable " + std::to_string(scope_[a]) + " in scope");
  }
  if (table_.size() != table_size(cards_))
    throw ShapeError("table has " + std::to_string(table_.size()) + " entries, scope needs " +
                     std::to_string(table_size(cards_)));
  for (double v : table_)
    if (!(v >= 0.0) || !std::isfinite(v)) throw ShapeError("factor entries must be finite and nonnegative");
  if (!std::isfinite(log_scale_)) throw ShapeError("factor log_scale must be finite");
}

Factor Factor::constant(double value) { return Factor({}, {}, {value}); }

Factor Factor::equivalence(VarId a, VarId b, int card) {
  std::vector<double> t(static_cast<std::size_t>(card * card), 0.0);
  for (int x = 0; x < card; ++x) t[static_cast<std::size_t>(x * card + x)] = 1.0;
  return Factor({a, b}, {card, card}, std::move(t));
}

Factor Factor::unary(VarId var, std::vector<double> table) {
  const int card = static_cast<int>(table.size());
  return Factor({var}, {card}, std::move(table));
}

int Factor::position(VarId var) const noexcept {
  for (std::size_t p = 0; p < scope_.size(); ++p)
    if (scope_[p] == var) return static_cast<int>(p);
  return -1;
}

double Factor::value(std::size_t idx) const { return table_.at(idx) * std::exp(log_scale_); }

std::vector<double> Factor::values() const {
  const double s = std::exp(log_scale_);
  std::vector<double> out(table_);
  for (double& v : out) v *= s;
  return out;
}

std::vector<std::size_t> Factor::strides() const {
  std::vector<std::size_t> s(scope_.size());
  std::size_t stride = 1;
  for (std::size_t p = scope_.size(); p-- > 0;) {
    s[p] = stride;
    stride *= static_cast<std::size_t>(cards_[p]);
  }
  return s;
}

void Factor::rescale() {
  const double m = *std::max_element(table_.begin(), table_.end());
  if (m <= 0.0 || m == 1.0) return;
  for (double& v : table_) v /= m;
  log_scale_ += std::log(m);
}

void Factor::set_table(std::vector<double> table) {
  *this = Factor(scope_, cards_, std::move(table));
}

FactorNetwork::FactorNetwork(std::vector<int> cardinalities) : cards_(std::move(cardinalities)) {
  for (int c : cards_)
    if (c < 1) throw ShapeError("cardinality must be positive");
}

VarId FactorNetwork::add_variable(int cardinality) {
  if (cardinality < 1) throw ShapeError("cardinality must be positive");
  cards_.push_back(cardinality);
  return static_cast<VarId>(cards_.size() - 1);
}

void FactorNetwork::check_factor(const Factor& factor) const {
  for (std::size_t p = 0; p < factor.arity(); ++p) {
    const VarId v = factor.scope()[p];
    if (v < 0 || static_cast<std::size_t>(v) >= cards_.size())
      throw ScopeError("factor references unknown variable " + std::to_string(v));
    if (factor.cards()[p] != cards_[static_cast<std::size_t>(v)])
      throw ShapeError("factor cardinality for variable " + std::to_string(v) + " disagrees with the network");
  }
}

std::size_t FactorNetwork::add_factor(Factor factor) {
  check_factor(factor);
  factors_.push_back(std::move(factor));
  return factors_.size() - 1;
}

void FactorNetwork::replace_factor(std::size_t id, Factor factor) {
  if (factors_.at(id).scope() != factor.scope()) throw ScopeError("replacement factor has a different scope");
  check_factor(factor);
  factors_[id] = std::move(factor);
}

std::size_t FactorNetwork::state_count() const noexcept {
  std::size_t n = 1;
  for (int c : cards_) {
    const auto uc = static_cast<std::size_t>(c);
    if (n > std::numeric_limits<std::size_t>::max() / uc) return std::numeric_limits<std::size_t>::max();
    n *= uc;
  }
  return n;
}

bool approx_equal(const FactorNetwork& a, const FactorNetwork& b, double tol) {
  if (a.cardinalities() != b.cardinalities() || a.num_factors() != b.num_factors()) return false;
  for (std::size_t f = 0; f < a.num_factors(); ++f) {
    const Factor& fa = a.factor(f);
    const Factor& fb = b.factor(f);
    if (fa.scope() != fb.scope()) return false;
    const auto va = fa.values();
    const auto vb = fb.values();
    for (std::size_t i = 0; i < va.size(); ++i)
      if (std::abs(va[i] - vb[i]) > tol) return false;
  }
  return true;
}

namespace {

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
  std::vector<std::size_t> parent;
};

}  // namespace

bool is_forest(const FactorNetwork& net) {
  const std::size_t n = net.num_variables();
  DisjointSets sets(n + net.num_factors());
  for (std::size_t f = 0; f < net.num_factors(); ++f)
    for (VarId v : net.factor(f).scope())
      if (!sets.unite(n + f, static_cast<std::size_t>(v))) return false;
  return true;
}

}  // namespace edgecorr
