#pragma once

// Symbol counting for density expressions.
//
// Surface grammar (whitespace between tokens is optional):
//   number      digits [ '.' digits ], or '~' immediately followed by one
//               (a negative literal), or the constants `e` and `pi`
//   identifier  [a-z]+ ; the declared variable, a function name, `rt`, or a parameter
//   G           the gamma function
//   operators   ^ rt (tier 2), * / (tier 3), + - (tier 4); left-associative
//   ( )         grouping; each parenthesis is one symbol
// Every token weighs one symbol. A function application therefore costs its
// argument plus three (name and the two mandatory parentheses).

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "versatility/errors.hpp"

namespace versatility::symbols {

enum class TokenKind { Number, Variable, Parameter, Operator, LeftParen, RightParen, ElementaryFunction, GammaFunction };

inline std::string_view to_string(TokenKind k) {
  switch (k) {
    case TokenKind::Number: return "number";
    case TokenKind::Variable: return "variable";
    case TokenKind::Parameter: return "parameter";
    case TokenKind::Operator: return "operator";
    case TokenKind::LeftParen: return "lparen";
    case TokenKind::RightParen: return "rparen";
    case TokenKind::ElementaryFunction: return "function";
    case TokenKind::GammaFunction: return "gamma";
  }
  return "";
}

struct Token {
  TokenKind kind;
  std::string lexeme;
  std::size_t position = 0;

  bool operator==(const Token& o) const { return kind == o.kind && lexeme == o.lexeme; }
};

inline const std::set<std::string, std::less<>>& elementary_functions() {
  static const std::set<std::string, std::less<>> f = {
      "exp",  "ln",    "log",   "sin",   "cos",   "tan",    "sinh",   "cosh",   "tanh",
      "asin", "acos",  "atan",  "asinh", "acosh", "atanh",  "arcsin", "arccos", "arctan"};
  return f;
}

// Constructs the rules exclude: sums, products, integrals, limits, derivatives.
inline const std::set<std::string, std::less<>>& reserved_words() {
  static const std::set<std::string, std::less<>> r = {"sum", "prod", "int", "integral", "lim", "diff", "d", "deriv"};
  return r;
}

/// Splits text into tokens. `variable` names the outcome variable.
inline std::vector<Token> tokenize(std::string_view text, std::string_view variable = "y") {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  auto is_lower = [](char c) { return c >= 'a' && c <= 'z'; };
  auto read_number = [&](std::size_t start) {
    std::size_t j = start;
    while (j < n && is_digit(text[j])) ++j;
    if (j < n && text[j] == '.') {
      ++j;
      if (j >= n || !is_digit(text[j])) throw LexError("malformed number", j);
      while (j < n && is_digit(text[j])) ++j;
    }
    return j;
  };
  while (i < n) {
    const char c = text[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    const std::size_t pos = i;
    if (is_digit(c)) {
      const std::size_t j = read_number(i);
      out.push_back({TokenKind::Number, std::string(text.substr(i, j - i)), pos});
      i = j;
    } else if (c == '~') {
      if (i + 1 >= n || !is_digit(text[i + 1])) throw LexError("'~' must immediately prefix a numeral", i);
      const std::size_t j = read_number(i + 1);
      out.push_back({TokenKind::Number, std::string(text.substr(i, j - i)), pos});
      i = j;
    } else if (c == '(') {
      out.push_back({TokenKind::LeftParen, "(", pos});
      ++i;
    } else if (c == ')') {
      out.push_back({TokenKind::RightParen, ")", pos});
      ++i;
    } else if (c == '^' || c == '*' || c == '/' || c == '+' || c == '-') {
      out.push_back({TokenKind::Operator, std::string(1, c), pos});
      ++i;
    } else if (c == 'G') {
      out.push_back({TokenKind::GammaFunction, "G", pos});
      ++i;
    } else if (c >= 'A' && c <= 'Z') {
      throw UnsupportedNotationError(std::string("unsupported symbol '") + c + "'", i);
    } else if (is_lower(c)) {
      std::size_t j = i;
      while (j < n && is_lower(text[j])) ++j;
      std::string word(text.substr(i, j - i));
      if (reserved_words().count(word)) throw UnsupportedNotationError("'" + word + "' is not permitted", i);
      if (word == variable)
        out.push_back({TokenKind::Variable, word, pos});
      else if (word == "rt")
        out.push_back({TokenKind::Operator, word, pos});
      else if (word == "e" || word == "pi")
        out.push_back({TokenKind::Number, word, pos});
      else if (elementary_functions().count(word))
        out.push_back({TokenKind::ElementaryFunction, word, pos});
      else {
        std::size_t k = j;
        while (k < n && (text[k] == ' ' || text[k] == '\t')) ++k;
        if (k < n && text[k] == '(')
          throw UnsupportedNotationError("unknown function '" + word + "'", i);
        out.push_back({TokenKind::Parameter, word, pos});
      }
      i = j;
    } else {
      throw LexError(std::string("unexpected character '") + c + "'", i);
    }
  }
  return out;
}

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  enum class Kind { Number, Variable, Parameter, Binary, Call };
  Kind kind;
  std::string text;  // lexeme, operator, or function name
  NodePtr lhs, rhs;  // Binary: both; Call: lhs is the argument
  int parens = 0;    // extra parenthesis layers around this node

  static NodePtr leaf(Kind k, std::string t, int parens = 0) {
    return std::make_shared<Node>(Node{k, std::move(t), nullptr, nullptr, parens});
  }
  static NodePtr binary(std::string op, NodePtr l, NodePtr r, int parens = 0) {
    return std::make_shared<Node>(Node{Kind::Binary, std::move(op), std::move(l), std::move(r), parens});
  }
  static NodePtr call(std::string fn, NodePtr arg, int parens = 0) {
    return std::make_shared<Node>(Node{Kind::Call, std::move(fn), std::move(arg), nullptr, parens});
  }
};

/// Precedence tier of a binary operator: 2 binds tightest.
inline int tier(std::string_view op) {
  if (op == "^" || op == "rt") return 2;
  if (op == "*" || op == "/") return 3;
  return 4;
}

namespace detail {

class Parser {
 public:
  Parser(const std::vector<Token>& t, std::size_t end_pos) : toks_(t), end_pos_(end_pos) {}

  NodePtr parse() {
    if (toks_.empty()) throw ParseError("empty expression", 0);
    auto n = expr();
    if (i_ < toks_.size()) throw ParseError("unexpected '" + toks_[i_].lexeme + "'", toks_[i_].position);
    return n;
  }

 private:
  const std::vector<Token>& toks_;
  std::size_t end_pos_;
  std::size_t i_ = 0;

  std::size_t pos() const { return i_ < toks_.size() ? toks_[i_].position : end_pos_; }
  bool at_op(int t) const {
    return i_ < toks_.size() && toks_[i_].kind == TokenKind::Operator && tier(toks_[i_].lexeme) == t;
  }

  NodePtr level(int t) {
    if (t == 1) return primary();
    auto lhs = level(t - 1);
    while (at_op(t)) {
      std::string op = toks_[i_++].lexeme;
      if (i_ >= toks_.size()) throw ParseError("dangling operator '" + op + "'", pos());
      lhs = Node::binary(op, lhs, level(t - 1));
    }
    return lhs;
  }
  NodePtr expr() { return level(4); }

  NodePtr primary() {
    if (i_ >= toks_.size()) throw ParseError("expected an operand", pos());
    const Token& t = toks_[i_];
    switch (t.kind) {
      case TokenKind::Number: ++i_; return Node::leaf(Node::Kind::Number, t.lexeme);
      case TokenKind::Variable: ++i_; return Node::leaf(Node::Kind::Variable, t.lexeme);
      case TokenKind::Parameter: ++i_; return Node::leaf(Node::Kind::Parameter, t.lexeme);
      case TokenKind::LeftParen: {
        ++i_;
        auto inner = expr();
        expect_close(t.position);
        auto copy = std::make_shared<Node>(*inner);
        copy->parens += 1;
        return copy;
      }
      case TokenKind::ElementaryFunction:
      case TokenKind::GammaFunction: {
        ++i_;
        if (i_ >= toks_.size() || toks_[i_].kind != TokenKind::LeftParen)
          throw ParseError("function '" + t.lexeme + "' needs a parenthesized argument", pos());
        const std::size_t open = toks_[i_].position;
        ++i_;
        auto arg = expr();
        expect_close(open);
        return Node::call(t.lexeme, arg);
      }
      case TokenKind::RightParen: throw ParseError("unbalanced ')'", t.position);
      case TokenKind::Operator: throw ParseError("unexpected operator '" + t.lexeme + "'", t.position);
    }
    throw ParseError("unexpected token", t.position);
  }

  void expect_close(std::size_t open) {
    if (i_ >= toks_.size()) throw ParseError("unbalanced '(' opened at position " + std::to_string(open), pos());
    if (toks_[i_].kind != TokenKind::RightParen)
      throw ParseError("expected ')' but found '" + toks_[i_].lexeme + "'", toks_[i_].position);
    ++i_;
  }
};

}  // namespace detail

inline NodePtr parse(const std::vector<Token>& tokens) {
  const std::size_t end = tokens.empty() ? 0 : tokens.back().position + tokens.back().lexeme.size();
  return detail::Parser(tokens, end).parse();
}

inline NodePtr parse(std::string_view text, std::string_view variable = "y") {
  auto toks = tokenize(text, variable);
  if (toks.empty()) throw ParseError("empty expression", 0);
  return detail::Parser(toks, text.size()).parse();
}

/// Number of symbols in the expression.
inline std::size_t symbol_count(const Node& n) {
  std::size_t c = 0;
  switch (n.kind) {
    case Node::Kind::Number:
    case Node::Kind::Variable:
    case Node::Kind::Parameter: c = 1; break;
    case Node::Kind::Binary: c = symbol_count(*n.lhs) + symbol_count(*n.rhs) + 1; break;
    case Node::Kind::Call: c = symbol_count(*n.lhs) + 3; break;
  }
  return c + 2 * static_cast<std::size_t>(n.parens);
}

inline std::string render(const Node& n) {
  std::string core;
  switch (n.kind) {
    case Node::Kind::Number:
    case Node::Kind::Variable:
    case Node::Kind::Parameter: core = n.text; break;
    case Node::Kind::Binary: core = render(*n.lhs) + " " + n.text + " " + render(*n.rhs); break;
    case Node::Kind::Call: core = n.text + "(" + render(*n.lhs) + ")"; break;
  }
  return std::string(n.parens, '(') + core + std::string(n.parens, ')');
}

/// Adds the parenthesis layers precedence requires so that render() parses
/// back to the same tree. Operands of a tighter tier, or a same-tier right
/// operand, get one layer if they have none.
inline NodePtr with_required_parens(const NodePtr& n) {
  if (n->kind == Node::Kind::Call) return Node::call(n->text, with_required_parens(n->lhs), n->parens);
  if (n->kind != Node::Kind::Binary) return n;
  const int t = tier(n->text);
  auto fix = [&](const NodePtr& child, bool right) {
    auto c = with_required_parens(child);
    if (c->kind == Node::Kind::Binary && c->parens == 0) {
      const int ct = tier(c->text);
      if (ct > t || (right && ct == t)) {
        auto copy = std::make_shared<Node>(*c);
        copy->parens = 1;
        return NodePtr(copy);
      }
    }
    return c;
  };
  return Node::binary(n->text, fix(n->lhs, false), fix(n->rhs, true), n->parens);
}

inline bool same_tree(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.text != b.text || a.parens != b.parens) return false;
  if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs) || static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs))
    return false;
  if (a.lhs && !same_tree(*a.lhs, *b.lhs)) return false;
  if (a.rhs && !same_tree(*a.rhs, *b.rhs)) return false;
  return true;
}

/// Numeric value with the given bindings for the variable and parameters.
inline double evaluate(const Node& n, const std::map<std::string, double, std::less<>>& env) {
  switch (n.kind) {
    case Node::Kind::Number:
      if (n.text == "e") return std::exp(1.0);
      if (n.text == "pi") return 3.14159265358979323846;
      if (n.text[0] == '~') return -std::strtod(n.text.c_str() + 1, nullptr);
      return std::strtod(n.text.c_str(), nullptr);
    case Node::Kind::Variable:
    case Node::Kind::Parameter: {
      auto it = env.find(n.text);
      if (it == env.end()) throw DomainError("unbound symbol '" + n.text + "'");
      return it->second;
    }
    case Node::Kind::Binary: {
      const double l = evaluate(*n.lhs, env), r = evaluate(*n.rhs, env);
      if (n.text == "^") return std::pow(l, r);
      if (n.text == "rt") return std::pow(l, 1.0 / r);
      if (n.text == "*") return l * r;
      if (n.text == "/") return l / r;
      if (n.text == "+") return l + r;
      return l - r;
    }
    case Node::Kind::Call: {
      const double v = evaluate(*n.lhs, env);
      const std::string& f = n.text;
      if (f == "G") return std::tgamma(v);
      if (f == "exp") return std::exp(v);
      if (f == "ln" || f == "log") return std::log(v);
      if (f == "sin") return std::sin(v);
      if (f == "cos") return std::cos(v);
      if (f == "tan") return std::tan(v);
      if (f == "sinh") return std::sinh(v);
      if (f == "cosh") return std::cosh(v);
      if (f == "tanh") return std::tanh(v);
      if (f == "asin" || f == "arcsin") return std::asin(v);
      if (f == "acos" || f == "arccos") return std::acos(v);
      if (f == "atan" || f == "arctan") return std::atan(v);
      if (f == "asinh") return std::asinh(v);
      if (f == "acosh") return std::acosh(v);
      if (f == "atanh") return std::atanh(v);
      throw UnsupportedNotationError("unknown function '" + f + "'", 0);
    }
  }
  return 0.0;
}

/// Parameter names referenced by the expression, sorted.
inline std::set<std::string> parameters(const Node& n) {
  std::set<std::string> out;
  if (n.kind == Node::Kind::Parameter) out.insert(n.text);
  if (n.lhs) out.merge(parameters(*n.lhs));
  if (n.rhs) out.merge(parameters(*n.rhs));
  return out;
}

struct Ranked {
  std::string label;
  std::size_t count;
};

struct Ranking {
  std::vector<std::string> minimal;  // labels achieving the minimum, sorted
  std::vector<Ranked> counts;        // every entry, sorted by label
};

/// Parameterizations with the minimal symbol count; all of them on a tie.
inline Ranking rank_parameterizations(std::vector<Ranked> entries) {
  Ranking r;
  std::sort(entries.begin(), entries.end(), [](const Ranked& a, const Ranked& b) { return a.label < b.label; });
  r.counts = entries;
  if (entries.empty()) return r;
  std::size_t best = entries.front().count;
  for (const auto& e : entries) best = std::min(best, e.count);
  for (const auto& e : entries)
    if (e.count == best) r.minimal.push_back(e.label);
  return r;
}

}  // namespace versatility::symbols
