#ifndef EDGECORR_UAI_HPP
#define EDGECORR_UAI_HPP

#include <istream>
#include <map>
#include <string>
#include <string_view>

#include "edgecorr/factor.hpp"

namespace edgecorr {

using Evidence = std::map<VarId, int>;

enum class ModelKind { markov, bayes };

/// Reads a UAI MARKOV or BAYES model. BAYES CPTs become plain factors.
/// Throws ParseError on malformed text, ShapeError when a table length does
/// not match its scope.
FactorNetwork load_uai(std::string_view text, ModelKind* kind = nullptr);
FactorNetwork load_uai_file(const std::string& path, ModelKind* kind = nullptr);

/// Writes a MARKOV file; scaled entries are printed with round-trip precision.
std::string save_uai(const FactorNetwork& net);

/// Reads a .evid file: a count followed by variable/value pairs. The older
/// layout with a leading sample count of 1 is accepted too.
Evidence load_evidence(std::string_view text);
Evidence load_evidence_file(const std::string& path);
std::string save_evidence(const Evidence& evidence);

}  // namespace edgecorr

#endif  // EDGECORR_UAI_HPP
