// Copyright 2026 The cafm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <set>
#include <string>
#include <vector>

#include "cafm/formula.hpp"

namespace cafm {

/// Context-aware feature model: contexts, features, the optional-marked
/// subset of the features and the constraint formula. A plain feature model
/// is the case with no contexts.
///
/// Names keep their declaration order, which fixes the iteration order of
/// the analyses.
class CaFM {
 public:
  CaFM() = default;

  /// Throws ValidationError unless contexts and features are disjoint sets of
  /// valid names, optional is a subset of features and every variable of the
  /// formula is declared.
  CaFM(std::vector<std::string> contexts, std::vector<std::string> features,
       std::vector<std::string> optional, Formula formula);

  const std::vector<std::string>& contexts() const { return contexts_; }
  const std::vector<std::string>& features() const { return features_; }
  const std::vector<std::string>& optional() const { return optional_; }
  const Formula& formula() const { return formula_; }

  bool is_context(const std::string& name) const;
  bool is_feature(const std::string& name) const;
  bool is_optional(const std::string& name) const;

  friend bool operator==(const CaFM&, const CaFM&) = default;

 private:
  std::vector<std::string> contexts_;
  std::vector<std::string> features_;
  std::vector<std::string> optional_;
  Formula formula_;
};

/// Contexts set to true; every other context is false.
struct ContextAssignment {
  std::set<std::string> truthy;
  friend bool operator==(const ContextAssignment&, const ContextAssignment&) = default;
};

/// Selected features; every other feature is deselected.
struct Product {
  std::set<std::string> selected;
  friend bool operator==(const Product&, const Product&) = default;
};

/// Total assignment over contexts and features induced by `d` and `p`.
Assignment induced_assignment(const CaFM& m, const ContextAssignment& d, const Product& p);

/// True when `p` is a valid product of `m` under the contexts `d`. Throws
/// ValidationError naming any name of `d` or `p` that is not a context or
/// feature respectively.
bool validate_product(const CaFM& m, const ContextAssignment& d, const Product& p);

/// The formula with every context replaced by its value under `d`, constant
/// folded. Only features remain, or the result is a constant.
Formula ground(const CaFM& m, const ContextAssignment& d);

}  // namespace cafm
