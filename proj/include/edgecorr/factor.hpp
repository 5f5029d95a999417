#ifndef EDGECORR_FACTOR_HPP
#define EDGECORR_FACTOR_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace edgecorr {

using VarId = int;

struct Variable {
  VarId id = 0;
  int cardinality = 2;
};

/// A nonnegative table over an ordered scope.
///
/// Entries are stored row-major in scope order (the last scope variable
/// varies fastest) and are implicitly multiplied by exp(log_scale). Keeping
/// the magnitude in log_scale lets long products survive without underflow
/// while exact zeros stay exact.
class Factor {
 public:
  /// The constant 1 over the empty scope.
  Factor();
  Factor(std::vector<VarId> scope, std::vector<int> cards, std::vector<double> table,
         double log_scale = 0.0);

  static Factor constant(double value);
  /// Identity table over two variables of equal cardinality: 1 iff equal.
  static Factor equivalence(VarId a, VarId b, int card);
  static Factor unary(VarId var, std::vector<double> table);

  const std::vector<VarId>& scope() const noexcept { return scope_; }
  const std::vector<int>& cards() const noexcept { return cards_; }
  const std::vector<double>& table() const noexcept { return table_; }
  double log_scale() const noexcept { return log_scale_; }

  std::size_t arity() const noexcept { return scope_.size(); }
  std::size_t size() const noexcept { return table_.size(); }

  /// Position of var in the scope, or -1.
  int position(VarId var) const noexcept;
  bool contains(VarId var) const noexcept { return position(var) >= 0; }

  /// Entry idx including the scale factor.
  double value(std::size_t idx) const;
  /// All entries including the scale factor.
  std::vector<double> values() const;
  /// Row-major strides of the scope positions.
  std::vector<std::size_t> strides() const;

  /// Divides the table by its largest entry and folds it into log_scale.
  /// All-zero tables are left alone.
  void rescale();

  /// Replaces the entries, keeping the scope. log_scale is reset to 0.
  void set_table(std::vector<double> table);

 private:
  std::vector<VarId> scope_;
  std::vector<int> cards_;
  std::vector<double> table_;
  double log_scale_ = 0.0;
};

/// Variables with finite domains plus factors over them.
class FactorNetwork {
 public:
  FactorNetwork() = default;
  explicit FactorNetwork(std::vector<int> cardinalities);

  VarId add_variable(int cardinality);
  /// Validates the scope against the network; returns the factor id.
  std::size_t add_factor(Factor factor);
  /// Swaps the factor at id for one over the same scope.
  void replace_factor(std::size_t id, Factor factor);

  std::size_t num_variables() const noexcept { return cards_.size(); }
  std::size_t num_factors() const noexcept { return factors_.size(); }
  int cardinality(VarId var) const { return cards_.at(static_cast<std::size_t>(var)); }
  Variable variable(VarId var) const { return {var, cardinality(var)}; }
  const std::vector<int>& cardinalities() const noexcept { return cards_; }
  const Factor& factor(std::size_t id) const { return factors_.at(id); }
  const std::vector<Factor>& factors() const noexcept { return factors_; }

  /// Number of joint configurations, saturating at SIZE_MAX.
  std::size_t state_count() const noexcept;

 private:
  void check_factor(const Factor& factor) const;

  std::vector<int> cards_;
  std::vector<Factor> factors_;
};

/// Structural equality with per-entry tolerance on scaled values.
bool approx_equal(const FactorNetwork& a, const FactorNetwork& b, double tol = 1e-12);

/// True when the factor/variable incidence graph has no cycle.
bool is_forest(const FactorNetwork& net);

/// Product of cardinalities.
std::size_t table_size(std::span<const int> cards);

}  // namespace edgecorr

#endif  // EDGECORR_FACTOR_HPP
