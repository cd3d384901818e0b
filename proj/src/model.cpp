// Copyright 2026 The cafm Authors
// SPDX-License-Identifier: Apache-2.0

#include "cafm/model.hpp"

#include <algorithm>
#include <unordered_set>

#include "cafm/errors.hpp"

namespace cafm {

namespace {

void check_names(const std::vector<std::string>& names, const char* what,
                 std::unordered_set<std::string>& seen) {
  for (const auto& n : names) {
    if (!is_valid_name(n)) throw ValidationError(std::string("invalid ") + what + " name '" + n + "'");
    if (!seen.insert(n).second)
      throw ValidationError("name '" + n + "' declared twice (" + what + ")");
  }
}

bool contains(const std::vector<std::string>& names, const std::string& n) {
  return std::find(names.begin(), names.end(), n) != names.end();
}

}  // namespace

CaFM::CaFM(std::vector<std::string> contexts, std::vector<std::string> features,
           std::vector<std::string> optional, Formula formula)
    : contexts_(std::move(contexts)),
      features_(std::move(features)),
      optional_(std::move(optional)),
      formula_(std::move(formula)) {
  std::unordered_set<std::string> declared;
  check_names(contexts_, "context", declared);
  check_names(features_, "feature", declared);
  std::unordered_set<std::string> opt_seen;
  for (const auto& o : optional_) {
    if (!contains(features_, o)) throw ValidationError("optional name '" + o + "' is not a feature");
    if (!opt_seen.insert(o).second) throw ValidationError("optional name '" + o + "' listed twice");
  }
  for (const auto& v : vars(formula_))
    if (!declared.contains(v))
      throw ValidationError("formula variable '" + v + "' is neither a context nor a feature");
}

bool CaFM::is_context(const std::string& name) const { return contains(contexts_, name); }
bool CaFM::is_feature(const std::string& name) const { return contains(features_, name); }
bool CaFM::is_optional(const std::string& name) const { return contains(optional_, name); }

Assignment induced_assignment(const CaFM& m, const ContextAssignment& d, const Product& p) {
  for (const auto& c : d.truthy)
    if (!m.is_context(c)) throw ValidationError("'" + c + "' in the context assignment is not a context");
  for (const auto& f : p.selected)
    if (!m.is_feature(f)) throw ValidationError("'" + f + "' in the product is not a feature");
  Assignment a;
  for (const auto& c : m.contexts()) a.emplace(c, d.truthy.contains(c));
  for (const auto& f : m.features()) a.emplace(f, p.selected.contains(f));
  return a;
}

bool validate_product(const CaFM& m, const ContextAssignment& d, const Product& p) {
  return evaluate(m.formula(), induced_assignment(m, d, p));
}

Formula ground(const CaFM& m, const ContextAssignment& d) {
  for (const auto& c : d.truthy)
    if (!m.is_context(c)) throw ValidationError("'" + c + "' in the context assignment is not a context");
  Assignment values;
  for (const auto& c : m.contexts()) values.emplace(c, d.truthy.contains(c));
  return substitute(m.formula(), values);
}

}  // namespace cafm
