#include "claimwise/annotate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "claimwise/error.hpp"
#include "claimwise/parallel.hpp"
#include "claimwise/text.hpp"

namespace claimwise {

using nlohmann::json;

void rank_claims(RelevanceScorer& scorer, std::string_view query, std::vector<Claim>& claims,
                 Provenance& provenance, int parallelism) {
  if (text::trim(query).empty()) throw ValidationError("rank_claims: query is blank");
  std::vector<std::string> failures(claims.size());
  parallel_for(claims.size(), parallelism, [&](std::size_t i) {
    try {
      claims[i].relevance = scorer.score(query, claims[i].text);
    } catch (const ProviderError& e) {
      claims[i].relevance = 0.5;
      failures[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < claims.size(); ++i) {
    if (!failures[i].empty()) {
      provenance.note("ranking", claims[i].id, "neutral_fallback (" + failures[i] + ")");
    }
  }
}

double cosine_similarity(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("cosine_similarity: dimension mismatch");
  double xx = 0.0;
  double yy = 0.0;
  double xy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx += x[i] * x[i];
    yy += y[i] * y[i];
    xy += x[i] * y[i];
  }
  if (xx == 0.0 || yy == 0.0) return 0.0;
  return xy / (std::sqrt(xx) * std::sqrt(yy));
}

namespace {

bool is_zero(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

void check_threshold(double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ValidationError("link threshold must be in (0, 1], got " + std::to_string(threshold));
  }
}

}  // namespace

std::vector<Link> link_embeddings(const std::vector<Claim>& claims_a,
                                  const std::vector<std::vector<double>>& embeddings_a,
                                  const std::vector<Claim>& claims_b,
                                  const std::vector<std::vector<double>>& embeddings_b,
                                  double threshold) {
  check_threshold(threshold);
  struct Candidate {
    Link link;
    std::size_t rank_a;
    std::size_t rank_b;
  };
  std::vector<Candidate> found;
  for (std::size_t i = 0; i < claims_a.size(); ++i) {
    if (is_zero(embeddings_a[i])) continue;
    for (std::size_t j = 0; j < claims_b.size(); ++j) {
      if (is_zero(embeddings_b[j])) continue;
      const double sim = std::min(1.0, cosine_similarity(embeddings_a[i], embeddings_b[j]));
      if (sim >= threshold) {
        found.push_back({{claims_a[i].id, claims_b[j].id, sim, {}},
                         claims_a[i].narrative_rank,
                         claims_b[j].narrative_rank});
      }
    }
  }
  std::sort(found.begin(), found.end(), [](const Candidate& l, const Candidate& r) {
    if (l.link.similarity != r.link.similarity) return l.link.similarity > r.link.similarity;
    if (l.rank_a != r.rank_a) return l.rank_a < r.rank_a;
    return l.rank_b < r.rank_b;
  });
  std::vector<Link> links;
  links.reserve(found.size());
  for (auto& c : found) links.push_back(std::move(c.link));
  return links;
}

std::vector<Link> link_claims(Embedder& embedder, const std::vector<Claim>& claims_a,
                              const std::vector<Claim>& claims_b, double threshold,
                              Provenance& provenance, int parallelism) {
  check_threshold(threshold);
  auto embed_all = [&](const std::vector<Claim>& claims) {
    std::vector<std::vector<double>> out(claims.size());
    std::vector<std::string> failures(claims.size());
    parallel_for(claims.size(), parallelism, [&](std::size_t i) {
      try {
        out[i] = embedder.embed(claims[i].text);
      } catch (const ProviderError& e) {
        out[i].clear();
        failures[i] = e.what();
      }
    });
    std::size_t dim = 0;
    for (const auto& v : out) dim = std::max(dim, v.size());
    for (std::size_t i = 0; i < claims.size(); ++i) {
      if (!failures[i].empty()) {
        provenance.note("linking", claims[i].id, "embedding_failed (" + failures[i] + ")");
      } else if (is_zero(out[i])) {
        provenance.note("linking", claims[i].id, "zero_embedding");
      }
      out[i].resize(dim, 0.0);
    }
    return out;
  };
  auto ea = embed_all(claims_a);
  auto eb = embed_all(claims_b);
  std::size_t dim = 0;
  for (const auto* side : {&ea, &eb}) {
    for (const auto& v : *side) dim = std::max(dim, v.size());
  }
  for (auto* side : {&ea, &eb}) {
    for (auto& v : *side) v.resize(dim, 0.0);
  }
  return link_embeddings(claims_a, ea, claims_b, eb, threshold);
}

std::string truncate_keyword(std::string_view keyword) {
  std::string out;
  std::size_t words = 0;
  std::size_t i = 0;
  while (i < keyword.size() && words < kMaxKeywordWords) {
    while (i < keyword.size() && std::isspace(static_cast<unsigned char>(keyword[i]))) ++i;
    if (i >= keyword.size()) break;
    const auto start = i;
    while (i < keyword.size() && !std::isspace(static_cast<unsigned char>(keyword[i]))) ++i;
    if (!out.empty()) out += ' ';
    out += keyword.substr(start, i - start);
    ++words;
  }
  return out;
}

std::string keyword_key(std::string_view keyword) {
  return text::to_lower(text::trim(keyword));
}

void label_links(KeywordSummarizer& summarizer, std::string_view query, std::vector<Link>& links,
                 const DecompositionResult& doc, Provenance& provenance, int parallelism) {
  std::vector<std::string> failures(links.size());
  parallel_for(links.size(), parallelism, [&](std::size_t i) {
    auto& link = links[i];
    const Claim* a = doc.find_claim(link.claim_a_id);
    const Claim* b = doc.find_claim(link.claim_b_id);
    if (!a || !b) throw DataError("label_links: link references an unknown claim");
    std::string keyword;
    try {
      keyword = truncate_keyword(summarizer.summarize(query, a->text, b->text));
    } catch (const ProviderError& e) {
      failures[i] = e.what();
    }
    if (keyword.empty()) {
      if (failures[i].empty()) failures[i] = "empty keyword";
      keyword = text::shared_content_token(a->text, b->text);
      if (keyword.empty()) keyword = "link";
    }
    link.keyword = std::move(keyword);
  });
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (!failures[i].empty()) {
      provenance.note("labeling", links[i].claim_a_id + "|" + links[i].claim_b_id,
                      "shared_token_fallback (" + failures[i] + ")");
    }
  }
}

std::string_view to_string(OrderMode mode) {
  return mode == OrderMode::Narrative ? "narrative" : "relevance";
}

OrderMode order_mode_from_string(std::string_view s) {
  if (s == "narrative") return OrderMode::Narrative;
  if (s == "relevance") return OrderMode::Relevance;
  throw ValidationError("unknown order mode '" + std::string(s) + "'");
}

double opacity_for(double relevance) {
  return kOpacityFloor + (1.0 - kOpacityFloor) * std::clamp(relevance, 0.0, 1.0);
}

std::vector<std::size_t> display_order(const std::vector<Claim>& claims, OrderMode mode) {
  std::vector<std::size_t> idx(claims.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t l, std::size_t r) {
    if (mode == OrderMode::Relevance && claims[l].relevance != claims[r].relevance) {
      return claims[l].relevance > claims[r].relevance;
    }
    return claims[l].narrative_rank < claims[r].narrative_rank;
  });
  return idx;
}

PresentationModel build_presentation(const std::vector<Claim>& claims_a,
                                     const std::vector<Claim>& claims_b,
                                     const std::vector<Link>& links, OrderMode mode) {
  PresentationModel model;
  model.order_mode = mode;
  for (std::size_t i : display_order(claims_a, mode)) model.order_a.push_back(claims_a[i].id);
  for (std::size_t i : display_order(claims_b, mode)) model.order_b.push_back(claims_b[i].id);
  for (const auto* side : {&claims_a, &claims_b}) {
    for (const auto& c : *side) model.opacity[c.id] = opacity_for(c.relevance);
  }
  for (const auto& link : links) {
    auto& group = model.groups[keyword_key(link.keyword)];
    if (group.links.empty()) group.label = link.keyword;
    group.links.push_back(link);
  }
  return model;
}

json to_json(const PresentationModel& model) {
  json groups = json::object();
  for (const auto& [key, group] : model.groups) {
    groups[key] = {{"label", group.label}, {"count", group.links.size()}, {"links", group.links}};
  }
  return json{{"order_mode", to_string(model.order_mode)},
              {"order_a", model.order_a},
              {"order_b", model.order_b},
              {"opacity", model.opacity},
              {"groups", groups}};
}

}  // namespace claimwise
