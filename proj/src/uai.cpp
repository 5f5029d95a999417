#include "edgecorr/uai.hpp"

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "edgecorr/errors.hpp"

namespace edgecorr {
namespace {

struct Token {
  std::string text;
  std::size_t line = 0;
  std::size_t column = 0;
};

class Tokenizer {
 public:
  explicit Tokenizer(std::string_view text) {
    std::size_t line = 1, col = 1;
    std::size_t i = 0;
    while (i < text.size()) {
      const char c = text[i];
      if (c == '\n') {
        ++line;
        col = 1;
        ++i;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++col;
        ++i;
        continue;
      }
      Token t{{}, line, col};
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) {
        t.text.push_back(text[i]);
        ++i;
        ++col;
      }
      tokens_.push_back(std::move(t));
    }
    end_line_ = line;
    end_col_ = col;
  }

  bool done() const { return pos_ >= tokens_.size(); }
  std::size_t remaining() const { return tokens_.size() - pos_; }

  const Token& next(const char* expecting) {
    if (done()) throw ParseError(std::string("unexpected end of input, expected ") + expecting, end_line_, end_col_);
    return tokens_[pos_++];
  }

  long long next_int(const char* expecting) {
    const Token& t = next(expecting);
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(t.text.c_str(), &end, 10);
    if (errno != 0 || end != t.text.c_str() + t.text.size())
      throw ParseError("expected " + std::string(expecting) + ", got '" + t.text + "'", t.line, t.column);
    return v;
  }

  double next_real(const char* expecting) {
    const Token& t = next(expecting);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.text.c_str(), &end);
    if (errno == ERANGE && v != 0.0)
      throw ParseError("real out of range '" + t.text + "'", t.line, t.column);
    if (end != t.text.c_str() + t.text.size())
      throw ParseError("expected " + std::string(expecting) + ", got '" + t.text + "'", t.line, t.column);
    return v;
  }

  const Token& peek() const { return tokens_[pos_]; }
  const Token& last() const { return tokens_[pos_ - 1]; }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t end_line_ = 1, end_col_ = 1;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

FactorNetwork load_uai(std::string_view text, ModelKind* kind) {
  Tokenizer tok(text);
  const Token& head = tok.next("preamble");
  ModelKind k;
  if (head.text == "MARKOV")
    k = ModelKind::markov;
  else if (head.text == "BAYES")
    k = ModelKind::bayes;
  else
    throw ParseError("unknown model type '" + head.text + "' (expected MARKOV or BAYES)", head.line, head.column);
  if (kind) *kind = k;

  const long long n = tok.next_int("variable count");
  if (n < 0) throw ParseError("negative variable count", tok.last().line, tok.last().column);
  std::vector<int> cards;
  cards.reserve(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    const long long c = tok.next_int("cardinality");
    if (c < 1) throw ParseError("cardinality must be positive", tok.last().line, tok.last().column);
    cards.push_back(static_cast<int>(c));
  }

  const long long m = tok.next_int("factor count");
  if (m < 0) throw ParseError("negative factor count", tok.last().line, tok.last().column);
  std::vector<std::vector<VarId>> scopes(static_cast<std::size_t>(m));
  for (auto& scope : scopes) {
    const long long arity = tok.next_int("scope size");
    if (arity < 0) throw ParseError("negative scope size", tok.last().line, tok.last().column);
    for (long long a = 0; a < arity; ++a) {
      const long long v = tok.next_int("variable id");
      if (v < 0 || v >= n) throw ParseError("variable id out of range", tok.last().line, tok.last().column);
      scope.push_back(static_cast<VarId>(v));
    }
  }

  FactorNetwork net(cards);
  for (auto& scope : scopes) {
    const long long count = tok.next_int("table size");
    const Token& count_tok = tok.last();
    std::vector<int> fcards;
    for (VarId v : scope) fcards.push_back(cards[static_cast<std::size_t>(v)]);
    const std::size_t expect = table_size(fcards);
    if (count < 0 || static_cast<std::size_t>(count) != expect)
      throw ShapeError("line " + std::to_string(count_tok.line) + ": table declares " + std::to_string(count) +
                       " entries but its scope needs " + std::to_string(expect));
    std::vector<double> table;
    table.reserve(expect);
    bool positive = false;
    for (std::size_t e = 0; e < expect; ++e) {
      const double v = tok.next_real("table entry");
      if (v < 0.0) throw ParseError("negative table entry", tok.last().line, tok.last().column);
      positive = positive || v > 0.0;
      table.push_back(v);
    }
    if (!positive) throw ShapeError("line " + std::to_string(count_tok.line) + ": factor table is all zero");
    net.add_factor(Factor(std::move(scope), std::move(fcards), std::move(table)));
  }
  if (!tok.done()) {
    const Token& t = tok.peek();
    throw ParseError("trailing token '" + t.text + "'", t.line, t.column);
  }
  return net;
}

FactorNetwork load_uai_file(const std::string& path, ModelKind* kind) { return load_uai(read_file(path), kind); }

std::string save_uai(const FactorNetwork& net) {
  std::ostringstream out;
  out << "MARKOV\n" << net.num_variables() << "\n";
  for (std::size_t v = 0; v < net.num_variables(); ++v) out << (v ? " " : "") << net.cardinalities()[v];
  out << "\n" << net.num_factors() << "\n";
  for (const Factor& f : net.factors()) {
    out << f.arity();
    for (VarId v : f.scope()) out << ' ' << v;
    out << '\n';
  }
  char buf[32];
  for (const Factor& f : net.factors()) {
    out << '\n' << f.size() << '\n';
    const auto vals = f.values();
    for (std::size_t i = 0; i < vals.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", vals[i]);
      out << ' ' << buf;
    }
    out << '\n';
  }
  return out.str();
}

Evidence load_evidence(std::string_view text) {
  Tokenizer tok(text);
  Evidence ev;
  if (tok.done()) return ev;
  long long count = tok.next_int("evidence count");
  // UAI 2010+ files prefix a sample count of 1.
  if (count == 1 && tok.remaining() != 2) count = tok.next_int("evidence count");
  if (count < 0) throw ParseError("negative evidence count", tok.last().line, tok.last().column);
  for (long long e = 0; e < count; ++e) {
    const long long v = tok.next_int("variable id");
    const Token& var_tok = tok.last();
    const long long x = tok.next_int("value index");
    if (v < 0) throw ParseError("negative variable id", var_tok.line, var_tok.column);
    if (x < 0) throw ParseError("negative value index", tok.last().line, tok.last().column);
    if (ev.count(static_cast<VarId>(v))) throw ParseError("variable observed twice", var_tok.line, var_tok.column);
    ev[static_cast<VarId>(v)] = static_cast<int>(x);
  }
  if (!tok.done()) {
    const Token& t = tok.peek();
    throw ParseError("trailing token '" + t.text + "'", t.line, t.column);
  }
  return ev;
}

Evidence load_evidence_file(const std::string& path) { return load_evidence(read_file(path)); }

std::string save_evidence(const Evidence& evidence) {
  std::ostringstream out;
  out << evidence.size();
  for (const auto& [v, x] : evidence) out << ' ' << v << ' ' << x;
  out << '\n';
  return out.str();
}

}  // namespace edgecorr
