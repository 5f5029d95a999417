#ifndef EDGECORR_ORACLE_HPP
#define EDGECORR_ORACLE_HPP

#include <cstddef>
#include <span>

#include "edgecorr/factor.hpp"
#include "edgecorr/inference.hpp"

// Brute-force enumeration of the defining sums. Deliberately naive: every
// configuration is visited and every factor index recomputed from scratch.
namespace edgecorr::oracle {

struct EnumerationBudget {
  std::size_t max_states = std::size_t{1} << 24;
};

double brute_log_partition(const FactorNetwork& net, EnumerationBudget budget = {});
JointTable brute_marginal(const FactorNetwork& net, std::span<const VarId> query, EnumerationBudget budget = {});
double brute_mi(const FactorNetwork& net, std::span<const VarId> a, std::span<const VarId> b,
                EnumerationBudget budget = {});

}  // namespace edgecorr::oracle

#endif  // EDGECORR_ORACLE_HPP
