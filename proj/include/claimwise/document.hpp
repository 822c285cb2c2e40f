#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "claimwise/text.hpp"

namespace claimwise {

enum class Side { A, B };

std::string_view to_string(Side side);
Side side_from_string(std::string_view s);

struct Claim {
  std::string id;
  Side side = Side::A;
  std::size_t sentence_index = 0;
  std::string text;
  text::Span source_span;
  std::size_t narrative_rank = 0;
  double relevance = 0.0;
  double fidelity = 1.0;
};

struct Link {
  std::string claim_a_id;
  std::string claim_b_id;
  double similarity = 0.0;
  std::string keyword;
};

/// Which provider served a pipeline stage, and when.
struct StageRecord {
  std::string provider;
  std::string timestamp;
};

/// A degradation or flag raised while processing (fallback, low fidelity, ...).
struct ProvenanceEvent {
  std::string stage;
  std::string target;
  std::string reason;
};

struct Provenance {
  std::map<std::string, StageRecord> stages;
  std::vector<ProvenanceEvent> events;

  void note(std::string stage, std::string target, std::string reason) {
    events.push_back({std::move(stage), std::move(target), std::move(reason)});
  }
};

struct DecompositionResult {
  std::string pair_id;
  std::vector<Claim> claims_a;
  std::vector<Claim> claims_b;
  std::vector<Link> links;
  Provenance provenance;

  const std::vector<Claim>& claims(Side side) const {
    return side == Side::A ? claims_a : claims_b;
  }
  std::vector<Claim>& claims(Side side) { return side == Side::A ? claims_a : claims_b; }

  /// Linear lookup across both sides; nullptr if absent.
  const Claim* find_claim(std::string_view id) const;
};

void to_json(nlohmann::json& j, const Claim& c);
void from_json(const nlohmann::json& j, Claim& c);
void to_json(nlohmann::json& j, const Link& l);
void from_json(const nlohmann::json& j, Link& l);
void to_json(nlohmann::json& j, const Provenance& p);
void from_json(const nlohmann::json& j, Provenance& p);
void to_json(nlohmann::json& j, const DecompositionResult& d);
void from_json(const nlohmann::json& j, DecompositionResult& d);

/// Checks the document invariants (sides, unique ids, link endpoints, ranges).
/// Throws DataError describing the first violation.
void validate(const DecompositionResult& doc);

}  // namespace claimwise
