#include "claimwise/document.hpp"

#include <set>

#include "claimwise/error.hpp"

namespace claimwise {

using nlohmann::json;

std::string_view to_string(Side side) { return side == Side::A ? "A" : "B"; }

Side side_from_string(std::string_view s) {
  if (s == "A") return Side::A;
  if (s == "B") return Side::B;
  throw DataError("invalid side '" + std::string(s) + "'");
}

const Claim* DecompositionResult::find_claim(std::string_view id) const {
  for (const auto* list : {&claims_a, &claims_b}) {
    for (const auto& c : *list) {
      if (c.id == id) return &c;
    }
  }
  return nullptr;
}

void to_json(json& j, const Claim& c) {
  j = json{{"id", c.id},
           {"side", to_string(c.side)},
           {"sentence_index", c.sentence_index},
           {"text", c.text},
           {"source_span", {c.source_span.start, c.source_span.end}},
           {"narrative_rank", c.narrative_rank},
           {"relevance", c.relevance},
           {"fidelity", c.fidelity}};
}

void from_json(const json& j, Claim& c) {
  j.at("id").get_to(c.id);
  c.side = side_from_string(j.at("side").get<std::string>());
  j.at("sentence_index").get_to(c.sentence_index);
  j.at("text").get_to(c.text);
  const auto& span = j.at("source_span");
  if (!span.is_array() || span.size() != 2) throw DataError("source_span must be [start, end]");
  c.source_span = {span[0].get<std::size_t>(), span[1].get<std::size_t>()};
  j.at("narrative_rank").get_to(c.narrative_rank);
  c.relevance = j.value("relevance", 0.0);
  c.fidelity = j.value("fidelity", 1.0);
}

void to_json(json& j, const Link& l) {
  j = json{{"claim_a_id", l.claim_a_id},
           {"claim_b_id", l.claim_b_id},
           {"similarity", l.similarity},
           {"keyword", l.keyword}};
}

void from_json(const json& j, Link& l) {
  j.at("claim_a_id").get_to(l.claim_a_id);
  j.at("claim_b_id").get_to(l.claim_b_id);
  j.at("similarity").get_to(l.similarity);
  l.keyword = j.value("keyword", std::string{});
}

void to_json(json& j, const Provenance& p) {
  json stages = json::object();
  for (const auto& [name, rec] : p.stages) {
    stages[name] = {{"provider", rec.provider}, {"timestamp", rec.timestamp}};
  }
  json events = json::array();
  for (const auto& e : p.events) {
    events.push_back({{"stage", e.stage}, {"target", e.target}, {"reason", e.reason}});
  }
  j = json{{"stages", stages}, {"events", events}};
}

void from_json(const json& j, Provenance& p) {
  p = {};
  if (j.contains("stages")) {
    for (const auto& [name, rec] : j.at("stages").items()) {
      p.stages[name] = {rec.value("provider", ""), rec.value("timestamp", "")};
    }
  }
  if (j.contains("events")) {
    for (const auto& e : j.at("events")) {
      p.events.push_back({e.value("stage", ""), e.value("target", ""), e.value("reason", "")});
    }
  }
}

void to_json(json& j, const DecompositionResult& d) {
  j = json{{"pair_id", d.pair_id},
           {"claims_a", d.claims_a},
           {"claims_b", d.claims_b},
           {"links", d.links},
           {"provenance", d.provenance}};
}

void from_json(const json& j, DecompositionResult& d) {
  j.at("pair_id").get_to(d.pair_id);
  j.at("claims_a").get_to(d.claims_a);
  j.at("claims_b").get_to(d.claims_b);
  d.links = j.value("links", std::vector<Link>{});
  d.provenance = j.value("provenance", Provenance{});
}

void validate(const DecompositionResult& doc) {
  std::set<std::string> ids_a;
  std::set<std::string> ids_b;
  for (Side side : {Side::A, Side::B}) {
    auto& ids = side == Side::A ? ids_a : ids_b;
    for (const auto& c : doc.claims(side)) {
      if (c.side != side) throw DataError("claim " + c.id + " is listed on the wrong side");
      if (c.text.empty()) throw DataError("claim " + c.id + " has empty text");
      if (c.relevance < 0.0 || c.relevance > 1.0 || c.fidelity < 0.0 || c.fidelity > 1.0) {
        throw DataError("claim " + c.id + " has a score outside [0, 1]");
      }
      if (ids_a.count(c.id) || ids_b.count(c.id)) throw DataError("duplicate claim id " + c.id);
      ids.insert(c.id);
    }
  }
  for (const auto& l : doc.links) {
    if (!ids_a.count(l.claim_a_id) || !ids_b.count(l.claim_b_id)) {
      throw DataError("link " + l.claim_a_id + " -> " + l.claim_b_id +
                      " does not connect side A to side B");
    }
  }
}

}  // namespace claimwise
