// Copyright 2026 The cafm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// On-disk CaFM format:
//
//   {
//     "contexts": ["Location"],
//     "features": ["eCall", ...],
//     "optional": ["eCallEurope", ...],
//     "formula":  "eCall & (eCall -> eCallEurope | eCallRussia) & ...",
//     "metadata": { ... }
//   }
//
// "formula" uses the parser's concrete syntax; an empty string is the empty
// conjunction. "optional" and "metadata" may be omitted.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cafm/analyses.hpp"
#include "cafm/generator.hpp"
#include "cafm/model.hpp"

namespace cafm {

struct CaFmDocument {
  std::vector<std::string> contexts;
  std::vector<std::string> features;
  std::vector<std::string> optional;
  std::string formula;
  nlohmann::json metadata = nlohmann::json::object();
};

/// Throws ValidationError on schema violations.
CaFmDocument document_from_json(const nlohmann::json& j);
nlohmann::json document_to_json(const CaFmDocument& doc);

/// Parses the formula and checks the model invariants.
CaFM to_model(const CaFmDocument& doc);
CaFmDocument to_document(const CaFM& m, nlohmann::json metadata = nlohmann::json::object());

CaFmDocument read_document(const std::filesystem::path& path);
void write_document(const std::filesystem::path& path, const CaFmDocument& doc);
/// Canonical text: two-space indented JSON plus a trailing newline.
std::string document_text(const CaFmDocument& doc);

CaFM load_model(const std::filesystem::path& path);

/// Generator parameters and clause counts for the metadata block.
nlohmann::json generator_metadata(const GenSpec& spec, const GeneratedInstance& instance);

nlohmann::json report_to_json(const AnalysisReport& report);

}  // namespace cafm
