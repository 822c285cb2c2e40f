#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "claimwise/document.hpp"
#include "claimwise/providers.hpp"

namespace claimwise {

inline constexpr double kDefaultLinkThreshold = 0.7;
inline constexpr double kOpacityFloor = 0.35;
inline constexpr std::size_t kMaxKeywordWords = 5;

/// Fills `relevance` for every claim in place. A scorer failure assigns the
/// neutral 0.5 and notes it in `provenance`. Order is unchanged.
void rank_claims(RelevanceScorer& scorer, std::string_view query, std::vector<Claim>& claims,
                 Provenance& provenance, int parallelism = 4);

/// Cosine similarity of two vectors (normalized here); 0 if either is zero.
double cosine_similarity(std::span<const double> x, std::span<const double> y);

/// All cross-side pairs with similarity >= threshold, many-to-many, sorted by
/// descending similarity then (A rank, B rank). Claims whose embedding is
/// the zero vector take part in no link and are flagged.
/// Throws ValidationError unless threshold is in (0, 1].
std::vector<Link> link_claims(Embedder& embedder, const std::vector<Claim>& claims_a,
                              const std::vector<Claim>& claims_b, double threshold,
                              Provenance& provenance, int parallelism = 4);

/// Same as link_claims over precomputed embeddings (parallel to the claims).
std::vector<Link> link_embeddings(const std::vector<Claim>& claims_a,
                                  const std::vector<std::vector<double>>& embeddings_a,
                                  const std::vector<Claim>& claims_b,
                                  const std::vector<std::vector<double>>& embeddings_b,
                                  double threshold);

/// Keeps the first kMaxKeywordWords whitespace-separated words.
std::string truncate_keyword(std::string_view keyword);

/// Case-folded grouping key.
std::string keyword_key(std::string_view keyword);

/// Assigns a keyword to every link. Summarizer failures fall back to the
/// claims' shared content token (see text::shared_content_token).
void label_links(KeywordSummarizer& summarizer, std::string_view query, std::vector<Link>& links,
                 const DecompositionResult& doc, Provenance& provenance, int parallelism = 4);

enum class OrderMode { Narrative, Relevance };

std::string_view to_string(OrderMode mode);
OrderMode order_mode_from_string(std::string_view s);

struct LinkGroup {
  std::string label;  // first-seen spelling
  std::vector<Link> links;
};

struct PresentationModel {
  OrderMode order_mode = OrderMode::Narrative;
  std::vector<std::string> order_a;  // claim ids in display order
  std::vector<std::string> order_b;
  std::map<std::string, double> opacity;
  std::map<std::string, LinkGroup> groups;  // keyed by keyword_key
};

/// 0.35 + 0.65 * relevance, relevance clamped to [0, 1].
double opacity_for(double relevance);

/// Display order for one side: narrative rank, or descending relevance with
/// narrative-rank ties (stable).
std::vector<std::size_t> display_order(const std::vector<Claim>& claims, OrderMode mode);

PresentationModel build_presentation(const std::vector<Claim>& claims_a,
                                     const std::vector<Claim>& claims_b,
                                     const std::vector<Link>& links, OrderMode mode);

nlohmann::json to_json(const PresentationModel& model);

}  // namespace claimwise
