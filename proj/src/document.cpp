// Copyright 2026 The cafm Authors
// SPDX-License-Identifier: Apache-2.0

#include "cafm/document.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "cafm/errors.hpp"

namespace cafm {

namespace {

std::vector<std::string> name_list(const nlohmann::json& j, const char* key, bool required) {
  if (!j.contains(key)) {
    if (required) throw ValidationError(std::string("missing field '") + key + "'");
    return {};
  }
  const auto& arr = j.at(key);
  if (!arr.is_array()) throw ValidationError(std::string("field '") + key + "' must be an array");
  std::vector<std::string> out;
  for (const auto& item : arr) {
    if (!item.is_string()) throw ValidationError(std::string("field '") + key + "' must hold strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

}  // namespace

CaFmDocument document_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("CaFM document must be a JSON object");
  CaFmDocument doc;
  doc.contexts = name_list(j, "contexts", true);
  doc.features = name_list(j, "features", true);
  doc.optional = name_list(j, "optional", false);
  if (!j.contains("formula") || !j.at("formula").is_string())
    throw ValidationError("field 'formula' must be a string");
  doc.formula = j.at("formula").get<std::string>();
  if (j.contains("metadata")) {
    if (!j.at("metadata").is_object()) throw ValidationError("field 'metadata' must be an object");
    doc.metadata = j.at("metadata");
  }
  return doc;
}

nlohmann::json document_to_json(const CaFmDocument& doc) {
  return nlohmann::json{{"contexts", doc.contexts},
                        {"features", doc.features},
                        {"optional", doc.optional},
                        {"formula", doc.formula},
                        {"metadata", doc.metadata}};
}

CaFM to_model(const CaFmDocument& doc) {
  Formula f = blank(doc.formula) ? Formula::constant(true) : parse(doc.formula);
  return CaFM(doc.contexts, doc.features, doc.optional, std::move(f));
}

CaFmDocument to_document(const CaFM& m, nlohmann::json metadata) {
  CaFmDocument doc;
  doc.contexts = m.contexts();
  doc.features = m.features();
  doc.optional = m.optional();
  if (m.formula().kind() == Formula::Kind::False)
    throw ValidationError("the constant false has no file representation");
  doc.formula = m.formula().kind() == Formula::Kind::True ? std::string() : print(m.formula());
  doc.metadata = std::move(metadata);
  return doc;
}

CaFmDocument read_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
  return document_from_json(j);
}

std::string document_text(const CaFmDocument& doc) { return document_to_json(doc).dump(2) + "\n"; }

void write_document(const std::filesystem::path& path, const CaFmDocument& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << document_text(doc);
}

CaFM load_model(const std::filesystem::path& path) { return to_model(read_document(path)); }

nlohmann::json generator_metadata(const GenSpec& spec, const GeneratedInstance& instance) {
  nlohmann::json gen{{"features", spec.n_features},
                     {"contexts", spec.n_contexts},
                     {"ratio", spec.ratio},
                     {"seed", spec.seed},
                     {"distribution", std::string(to_string(spec.distribution))},
                     {"redraw_context_only", spec.redraw_context_only}};
  if (spec.distribution == Distribution::PowerLaw) gen["exponent"] = spec.exponent;
  return nlohmann::json{{"generator", gen},
                        {"clauses_drawn", instance.clauses_drawn},
                        {"clauses_removed", instance.clauses_removed},
                        {"clauses_kept", instance.clauses.size()}};
}

nlohmann::json report_to_json(const AnalysisReport& report) {
  nlohmann::json j{{"analysis", std::string(to_string(report.kind))},
                   {"approach", std::string(to_string(report.approach))},
                   {"stop_mode", std::string(to_string(report.stop_mode))},
                   {"complete", report.complete},
                   {"anomaly", report.anomaly()},
                   {"verdict", report.verdict()},
                   {"wall_time_s", report.wall_time},
                   {"stats",
                    {{"sat_calls", report.stats.sat_calls},
                     {"refinement_count", report.stats.refinement_count}}}};
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, VoidnessResult>) {
          j["void"] = p.is_void;
          j["witness_context"] = p.witness ? nlohmann::json(p.witness->truthy) : nlohmann::json(nullptr);
        } else if constexpr (std::is_same_v<T, FeatureSetResult>) {
          j["features"] = p.features;
        } else if constexpr (std::is_same_v<T, FeatureAnalysisResult>) {
          j["dead"] = p.dead;
          j["false_optional"] = p.false_optional;
        } else {
          j["redundant"] = p.redundant;
          j["candidate_index"] =
              p.candidate_index ? nlohmann::json(*p.candidate_index) : nlohmann::json(nullptr);
        }
      },
      report.payload);
  return j;
}

}  // namespace cafm
