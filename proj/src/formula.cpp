// Copyright 2026 The cafm Authors
// SPDX-License-Identifier: Apache-2.0

#include "cafm/formula.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <optional>
#include <sstream>

#include "cafm/errors.hpp"

namespace cafm {

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column,
                       std::string token)
    : Error(message + " at line " + std::to_string(line) + ", column " +
            std::to_string(column) + " (token '" + token + "')"),
      line_(line),
      column_(column),
      token_(std::move(token)) {}

InvalidNameError::InvalidNameError(const std::string& name)
    : Error("invalid variable name '" + name + "'") {}

UnboundVariableError::UnboundVariableError(std::string name)
    : Error("variable '" + name + "' has no value in the assignment"), name_(std::move(name)) {}

bool is_valid_name(std::string_view text) {
  if (text.empty()) return false;
  auto head = static_cast<unsigned char>(text.front());
  if (!std::isalpha(head) && head != '_') return false;
  return std::all_of(text.begin() + 1, text.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || u == '_';
  });
}

// ---------------------------------------------------------------------------
// Formula

struct Formula::Node {
  Kind kind;
  std::string name;
  Formula left;
  Formula right;
  std::size_t size;
};

Formula::Formula() : Formula(constant(true)) {}

Formula Formula::constant(bool value) {
  static const auto t = std::make_shared<const Node>(Node{Kind::True, {}, Formula{nullptr}, Formula{nullptr}, 1});
  static const auto f = std::make_shared<const Node>(Node{Kind::False, {}, Formula{nullptr}, Formula{nullptr}, 1});
  return Formula(value ? t : f);
}

Formula Formula::variable(std::string name) {
  if (!is_valid_name(name)) throw InvalidNameError(name);
  return Formula(std::make_shared<const Node>(
      Node{Kind::Var, std::move(name), Formula{nullptr}, Formula{nullptr}, 1}));
}

Formula Formula::negation(Formula child) {
  std::size_t size = child.size() + 1;
  return Formula(std::make_shared<const Node>(
      Node{Kind::Not, {}, std::move(child), Formula{nullptr}, size}));
}

namespace {

std::size_t binary_size(const Formula& a, const Formula& b) { return a.size() + b.size() + 1; }

}  // namespace

Formula Formula::conjunction(Formula left, Formula right) {
  std::size_t size = binary_size(left, right);
  return Formula(std::make_shared<const Node>(Node{Kind::And, {}, std::move(left), std::move(right), size}));
}

Formula Formula::disjunction(Formula left, Formula right) {
  std::size_t size = binary_size(left, right);
  return Formula(std::make_shared<const Node>(Node{Kind::Or, {}, std::move(left), std::move(right), size}));
}

Formula Formula::implication(Formula left, Formula right) {
  std::size_t size = binary_size(left, right);
  return Formula(
      std::make_shared<const Node>(Node{Kind::Implies, {}, std::move(left), std::move(right), size}));
}

Formula::Kind Formula::kind() const noexcept { return node_->kind; }

const std::string& Formula::name() const {
  assert(kind() == Kind::Var);
  return node_->name;
}

const Formula& Formula::child() const {
  assert(kind() == Kind::Not);
  return node_->left;
}

const Formula& Formula::left() const {
  assert(kind() == Kind::And || kind() == Kind::Or || kind() == Kind::Implies);
  return node_->left;
}

const Formula& Formula::right() const {
  assert(kind() == Kind::And || kind() == Kind::Or || kind() == Kind::Implies);
  return node_->right;
}

std::size_t Formula::size() const { return node_ ? node_->size : 0; }

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.kind() != b.kind() || a.size() != b.size()) return false;
  switch (a.kind()) {
    case Formula::Kind::Var: return a.name() == b.name();
    case Formula::Kind::Not: return a.child() == b.child();
    case Formula::Kind::True:
    case Formula::Kind::False: return true;
    default: return a.left() == b.left() && a.right() == b.right();
  }
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok { Ident, Not, And, Or, Implies, LParen, RParen, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_space();
    std::size_t line = line_, column = column_;
    if (pos_ >= text_.size()) return {Tok::End, "<end of input>", line, column};
    char c = text_[pos_];
    auto single = [&](Tok kind) {
      advance();
      return Token{kind, std::string(1, c), line, column};
    };
    switch (c) {
      case '!': return single(Tok::Not);
      case '&': return single(Tok::And);
      case '|': return single(Tok::Or);
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      case '-':
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
          advance();
          advance();
          return {Tok::Implies, "->", line, column};
        }
        break;
      default: break;
    }
    auto u = static_cast<unsigned char>(c);
    if (std::isalpha(u) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        advance();
      return {Tok::Ident, std::string(text_.substr(start, pos_ - start)), line, column};
    }
    throw ParseError("unexpected character", line, column, std::string(1, c));
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) advance();
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text), current_(lexer_.next()) {}

  Formula parse_all() {
    Formula f = parse_implies();
    if (current_.kind != Tok::End) fail("unexpected token");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, current_.line, current_.column, current_.text);
  }

  void consume() { current_ = lexer_.next(); }

  Formula parse_implies() {
    Formula lhs = parse_or();
    if (current_.kind == Tok::Implies) {
      consume();
      return Formula::implication(std::move(lhs), parse_implies());
    }
    return lhs;
  }

  Formula parse_or() {
    Formula lhs = parse_and();
    while (current_.kind == Tok::Or) {
      consume();
      lhs = Formula::disjunction(std::move(lhs), parse_and());
    }
    return lhs;
  }

  Formula parse_and() {
    Formula lhs = parse_unary();
    while (current_.kind == Tok::And) {
      consume();
      lhs = Formula::conjunction(std::move(lhs), parse_unary());
    }
    return lhs;
  }

  Formula parse_unary() {
    switch (current_.kind) {
      case Tok::Not:
        consume();
        return Formula::negation(parse_unary());
      case Tok::LParen: {
        consume();
        Formula inner = parse_implies();
        if (current_.kind != Tok::RParen) fail("expected ')'");
        consume();
        return inner;
      }
      case Tok::Ident: {
        Formula v = Formula::variable(current_.text);
        consume();
        return v;
      }
      default: fail("expected a variable, '!' or '('");
    }
  }

  Lexer lexer_;
  Token current_;
};

}  // namespace

Formula parse(std::string_view text) { return Parser(text).parse_all(); }

// ---------------------------------------------------------------------------
// Printer

namespace {

int precedence(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Implies: return 1;
    case Formula::Kind::Or: return 2;
    case Formula::Kind::And: return 3;
    case Formula::Kind::Not: return 4;
    default: return 5;
  }
}

void print_into(const Formula& f, std::string& out);

void print_wrapped(const Formula& f, bool parens, std::string& out) {
  if (parens) out += '(';
  print_into(f, out);
  if (parens) out += ')';
}

void print_into(const Formula& f, std::string& out) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Var: out += f.name(); return;
    case K::True: out += "true"; return;
    case K::False: out += "false"; return;
    case K::Not:
      out += '!';
      print_wrapped(f.child(), precedence(f.child()) < 4, out);
      return;
    case K::And:
    case K::Or: {
      int p = precedence(f);
      print_wrapped(f.left(), precedence(f.left()) < p, out);
      out += f.kind() == K::And ? " & " : " | ";
      print_wrapped(f.right(), precedence(f.right()) <= p, out);
      return;
    }
    case K::Implies:
      print_wrapped(f.left(), precedence(f.left()) <= 1, out);
      out += " -> ";
      print_wrapped(f.right(), false, out);
      return;
  }
}

}  // namespace

std::string print(const Formula& f) {
  std::string out;
  out.reserve(f.size() * 4);
  print_into(f, out);
  return out;
}

// ---------------------------------------------------------------------------
// Semantics

bool evaluate(const Formula& f, const Assignment& a) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Var: {
      auto it = a.find(f.name());
      if (it == a.end()) throw UnboundVariableError(f.name());
      return it->second;
    }
    case K::True: return true;
    case K::False: return false;
    case K::Not: return !evaluate(f.child(), a);
    default: break;
  }
  // Both sides are evaluated so an unbound variable is always reported.
  bool l = evaluate(f.left(), a);
  bool r = evaluate(f.right(), a);
  switch (f.kind()) {
    case K::And: return l && r;
    case K::Or: return l || r;
    default: return !l || r;
  }
}

namespace {

void collect_vars(const Formula& f, std::set<std::string>& out) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Var: out.insert(f.name()); return;
    case K::True:
    case K::False: return;
    case K::Not: collect_vars(f.child(), out); return;
    default:
      collect_vars(f.left(), out);
      collect_vars(f.right(), out);
  }
}

}  // namespace

std::set<std::string> vars(const Formula& f) {
  std::set<std::string> out;
  collect_vars(f, out);
  return out;
}

Formula substitute(const Formula& f, const Assignment& values) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Var: {
      auto it = values.find(f.name());
      return it == values.end() ? f : Formula::constant(it->second);
    }
    case K::True:
    case K::False: return f;
    case K::Not: {
      Formula c = substitute(f.child(), values);
      if (c.is_constant()) return Formula::constant(c.kind() == K::False);
      if (c == f.child()) return f;
      return Formula::negation(std::move(c));
    }
    default: break;
  }
  Formula l = substitute(f.left(), values);
  Formula r = substitute(f.right(), values);
  const bool lt = l.kind() == K::True, lf = l.kind() == K::False;
  const bool rt = r.kind() == K::True, rf = r.kind() == K::False;
  switch (f.kind()) {
    case K::And:
      if (lf || rf) return Formula::constant(false);
      if (lt) return r;
      if (rt) return l;
      break;
    case K::Or:
      if (lt || rt) return Formula::constant(true);
      if (lf) return r;
      if (rf) return l;
      break;
    default:  // Implies
      if (lf || rt) return Formula::constant(true);
      if (lt) return r;
      if (rf) return Formula::negation(std::move(l));
      break;
  }
  if (l == f.left() && r == f.right()) return f;
  switch (f.kind()) {
    case K::And: return Formula::conjunction(std::move(l), std::move(r));
    case K::Or: return Formula::disjunction(std::move(l), std::move(r));
    default: return Formula::implication(std::move(l), std::move(r));
  }
}

Formula conjoin(std::span<const Formula> parts) {
  if (parts.empty()) return Formula::constant(true);
  Formula acc = parts.front();
  for (const auto& p : parts.subspan(1)) acc = Formula::conjunction(std::move(acc), p);
  return acc;
}

Formula disjoin(std::span<const Formula> parts) {
  if (parts.empty()) return Formula::constant(false);
  Formula acc = parts.front();
  for (const auto& p : parts.subspan(1)) acc = Formula::disjunction(std::move(acc), p);
  return acc;
}

std::vector<Formula> conjuncts(const Formula& f) {
  std::vector<Formula> out;
  std::vector<const Formula*> stack{&f};
  while (!stack.empty()) {
    const Formula* top = stack.back();
    stack.pop_back();
    if (top->kind() == Formula::Kind::And) {
      stack.push_back(&top->right());
      stack.push_back(&top->left());
    } else {
      out.push_back(*top);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// VarMap

int VarMap::intern(const std::string& name) {
  auto [it, inserted] = ids_.try_emplace(name, 0);
  if (inserted) {
    names_.push_back(name);
    it->second = static_cast<int>(names_.size());
  }
  return it->second;
}

int VarMap::fresh() {
  names_.emplace_back();
  return static_cast<int>(names_.size());
}

int VarMap::id(const std::string& name) const {
  auto it = ids_.find(name);
  return it == ids_.end() ? 0 : it->second;
}

const std::string& VarMap::name(int id) const {
  static const std::string empty;
  if (id < 1 || id > max_id()) return empty;
  return names_[static_cast<std::size_t>(id - 1)];
}

std::vector<std::pair<std::string, int>> VarMap::named() const {
  std::vector<std::pair<std::string, int>> out;
  out.reserve(ids_.size());
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (!names_[i].empty()) out.emplace_back(names_[i], static_cast<int>(i + 1));
  return out;
}

// ---------------------------------------------------------------------------
// Tseitin encoding

namespace {

// A literal or a truth constant.
struct Ref {
  enum class Tag : std::uint8_t { Lit, True, False } tag = Tag::Lit;
  Literal lit;

  static Ref of(Literal l) { return {Tag::Lit, l}; }
  static Ref constant(bool v) { return {v ? Tag::True : Tag::False, {}}; }
  Ref operator~() const {
    switch (tag) {
      case Tag::True: return constant(false);
      case Tag::False: return constant(true);
      default: return of(~lit);
    }
  }
};

class Encoder {
 public:
  Encoder(VarMap& map, std::vector<std::pair<int, Formula>>* definitions)
      : map_(map), definitions_(definitions) {}

  void assert_formula(const Formula& f) {
    using K = Formula::Kind;
    switch (f.kind()) {
      case K::True: return;
      case K::And:
        assert_formula(f.left());
        assert_formula(f.right());
        return;
      default: break;
    }
    Clause clause;
    bool satisfied = false;
    disjuncts(f, true, clause, satisfied);
    if (!satisfied) emit(std::move(clause));
  }

  std::vector<Clause> take() { return std::move(clauses_); }

 private:
  // Appends literals whose disjunction is equivalent to f (or !f when
  // positive is false). Subformulas that are not clause-shaped get a
  // Tseitin literal.
  void disjuncts(const Formula& f, bool positive, Clause& out, bool& satisfied) {
    using K = Formula::Kind;
    switch (f.kind()) {
      case K::Var: out.push_back(Literal{map_.intern(f.name()), positive}); return;
      case K::True:
        if (positive) satisfied = true;
        return;
      case K::False:
        if (!positive) satisfied = true;
        return;
      case K::Not: disjuncts(f.child(), !positive, out, satisfied); return;
      case K::Or:
        if (positive) {
          disjuncts(f.left(), true, out, satisfied);
          disjuncts(f.right(), true, out, satisfied);
          return;
        }
        break;
      case K::Implies:
        if (positive) {
          disjuncts(f.left(), false, out, satisfied);
          disjuncts(f.right(), true, out, satisfied);
          return;
        }
        break;
      case K::And:
        if (!positive) {
          disjuncts(f.left(), false, out, satisfied);
          disjuncts(f.right(), false, out, satisfied);
          return;
        }
        break;
    }
    Ref r = encode(f);
    if (!positive) r = ~r;
    if (r.tag == Ref::Tag::True) satisfied = true;
    else if (r.tag == Ref::Tag::Lit) out.push_back(r.lit);
  }

  // Literal equivalent to f.
  Ref encode(const Formula& f) {
    using K = Formula::Kind;
    switch (f.kind()) {
      case K::Var: return Ref::of(Literal{map_.intern(f.name()), true});
      case K::True: return Ref::constant(true);
      case K::False: return Ref::constant(false);
      case K::Not: return ~encode(f.child());
      default: break;
    }
    Ref a = encode(f.left());
    Ref b = encode(f.right());
    if (f.kind() == K::Implies) a = ~a;  // a -> b == !a | b
    if (f.kind() == K::And) {
      if (a.tag == Ref::Tag::False || b.tag == Ref::Tag::False) return Ref::constant(false);
      if (a.tag == Ref::Tag::True) return b;
      if (b.tag == Ref::Tag::True) return a;
      Literal x{map_.fresh(), true};
      emit({~x, a.lit});
      emit({~x, b.lit});
      emit({x, ~a.lit, ~b.lit});
      define(x, f);
      return Ref::of(x);
    }
    if (a.tag == Ref::Tag::True || b.tag == Ref::Tag::True) return Ref::constant(true);
    if (a.tag == Ref::Tag::False) return b;
    if (b.tag == Ref::Tag::False) return a;
    Literal x{map_.fresh(), true};
    emit({~x, a.lit, b.lit});
    emit({x, ~a.lit});
    emit({x, ~b.lit});
    define(x, f);
    return Ref::of(x);
  }

  void define(Literal x, const Formula& f) {
    if (definitions_) definitions_->emplace_back(x.var, f);
  }

  // Merges duplicate literals and drops tautologies.
  void emit(Clause clause) {
    std::sort(clause.begin(), clause.end());
    clause.erase(std::unique(clause.begin(), clause.end()), clause.end());
    for (std::size_t i = 1; i < clause.size(); ++i)
      if (clause[i].var == clause[i - 1].var) return;
    clauses_.push_back(std::move(clause));
  }

  VarMap& map_;
  std::vector<std::pair<int, Formula>>* definitions_;
  std::vector<Clause> clauses_;
};

}  // namespace

std::vector<Clause> to_cnf_into(const Formula& f, VarMap& var_map,
                                std::vector<std::pair<int, Formula>>* definitions) {
  for (const auto& name : vars(f)) var_map.intern(name);
  Encoder encoder(var_map, definitions);
  encoder.assert_formula(f);
  return encoder.take();
}

CnfEncoding to_cnf(const Formula& f, VarMap var_map) {
  CnfEncoding enc;
  for (const auto& name : vars(f)) var_map.intern(name);
  enc.aux_begin = var_map.max_id() + 1;
  enc.clauses = to_cnf_into(f, var_map, &enc.definitions);
  enc.aux_end = var_map.max_id() + 1;
  enc.var_map = std::move(var_map);
  return enc;
}

}  // namespace cafm
