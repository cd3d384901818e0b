// Copyright 2026 The cafm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Propositional formulas over named variables.
//
// Concrete syntax:
//   formula := implies
//   implies := or ( "->" implies )?          right-associative
//   or      := and ( "|" and )*              left-associative
//   and     := unary ( "&" unary )*          left-associative
//   unary   := "!" unary | "(" formula ")" | identifier
//
// Identifiers match [A-Za-z_][A-Za-z0-9_]*.

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cafm {

bool is_valid_name(std::string_view text);

/// Immutable formula tree with cheap copies (shared nodes).
///
/// True/False only arise from constant folding (`substitute`, model
/// grounding); the parser never produces them.
class Formula {
 public:
  enum class Kind : std::uint8_t { Var, Not, And, Or, Implies, True, False };

  /// Default-constructed formula is the constant true (empty conjunction).
  Formula();

  static Formula variable(std::string name);
  static Formula negation(Formula child);
  static Formula conjunction(Formula left, Formula right);
  static Formula disjunction(Formula left, Formula right);
  static Formula implication(Formula left, Formula right);
  static Formula constant(bool value);

  Kind kind() const noexcept;
  bool is_constant() const noexcept {
    return kind() == Kind::True || kind() == Kind::False;
  }

  /// Only valid for Var.
  const std::string& name() const;
  /// Only valid for Not.
  const Formula& child() const;
  /// Only valid for And/Or/Implies.
  const Formula& left() const;
  const Formula& right() const;

  /// Number of nodes.
  std::size_t size() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

using Assignment = std::map<std::string, bool>;

Formula parse(std::string_view text);

/// Prints with the minimal parentheses the precedence rules need.
std::string print(const Formula& f);

/// Throws UnboundVariableError when a variable of `f` is missing from `a`.
bool evaluate(const Formula& f, const Assignment& a);

std::set<std::string> vars(const Formula& f);

/// Replaces the mapped variables by constants and folds constants away.
/// The result is either a constant or contains no constant node.
Formula substitute(const Formula& f, const Assignment& values);

/// Left-nested conjunction; the empty list yields the constant true.
Formula conjoin(std::span<const Formula> parts);
/// Left-nested disjunction; the empty list yields the constant false.
Formula disjoin(std::span<const Formula> parts);

/// Flattens the top-level And spine, left to right.
std::vector<Formula> conjuncts(const Formula& f);

// ---------------------------------------------------------------------------
// Clause form

struct Literal {
  int var = 0;  // >= 1
  bool positive = true;

  Literal operator~() const { return {var, !positive}; }
  friend bool operator==(const Literal&, const Literal&) = default;
  friend auto operator<=>(const Literal&, const Literal&) = default;
};

using Clause = std::vector<Literal>;

/// Append-only name <-> id map. Ids are 1-based and shared with anonymous
/// (auxiliary) variables so they never collide.
class VarMap {
 public:
  /// Existing id or a newly allocated one.
  int intern(const std::string& name);
  /// Anonymous id above every id handed out so far.
  int fresh();

  bool contains(const std::string& name) const { return ids_.contains(name); }
  /// 0 when unmapped.
  int id(const std::string& name) const;
  /// Empty for anonymous ids.
  const std::string& name(int id) const;
  bool is_named(int id) const { return !name(id).empty(); }

  int max_id() const { return static_cast<int>(names_.size()); }
  /// Named entries in allocation order.
  std::vector<std::pair<std::string, int>> named() const;

 private:
  std::unordered_map<std::string, int> ids_;
  std::vector<std::string> names_;  // index id-1, empty for anonymous
};

struct CnfEncoding {
  std::vector<Clause> clauses;
  VarMap var_map;
  /// Tseitin variables occupy ids [aux_begin, aux_end).
  int aux_begin = 1;
  int aux_end = 1;
  /// Subformula each Tseitin variable is equivalent to.
  std::vector<std::pair<int, Formula>> definitions;
};

/// Tseitin encoding. Names already in `var_map` keep their ids; new names
/// are mapped first, then auxiliary ids are allocated above everything.
CnfEncoding to_cnf(const Formula& f, VarMap var_map = {});

/// In-place variant used by the incremental solver.
std::vector<Clause> to_cnf_into(const Formula& f, VarMap& var_map,
                                std::vector<std::pair<int, Formula>>* definitions = nullptr);

}  // namespace cafm
