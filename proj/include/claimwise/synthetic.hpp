#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "claimwise/dataset.hpp"
#include "claimwise/document.hpp"
#include "claimwise/providers.hpp"

namespace claimwise::sim {

/// Knobs of the synthetic annotation world used to check strategy ordering.
///
/// Each side has 8-14 claims. A claim is relevant (score >= 0.3) or not.
/// Relevant claims on the ground-truth side are 0.15 more helpful on average
/// than relevant claims on the other side. Irrelevant claims are judged
/// around a shared mean with uniform +-0.3 noise. Some ground-truth claims
/// have a weak counterpart on the other side (low relevance, low
/// helpfulness) joined by a link above the similarity threshold; the
/// remaining links either join two relevant claims or two irrelevant ones,
/// and a few fall just below the threshold. The full-text judge sees the
/// all-claim mean plus uniform +-0.2 noise.
struct SyntheticSpec {
  std::size_t instances = 50;
  std::uint64_t seed = 0;
  std::size_t min_claims = 8;
  std::size_t max_claims = 14;
  double relevant_fraction = 0.55;
  double relevance_threshold = 0.3;
  double relevant_advantage = 0.15;
  double irrelevant_mean = 0.45;
  double irrelevant_noise = 0.3;
  double full_text_noise = 0.2;
  double counterpart_rate = 0.35;  // per relevant ground-truth claim
  double link_threshold = 0.7;
};

struct SyntheticWorld {
  std::vector<ResponsePair> pairs;
  std::vector<DecompositionResult> decompositions;
  /// Judge completions for every claim and full text, keyed as the default
  /// helpfulness prompt would be.
  std::shared_ptr<Transcript> judge_transcript;
  /// Judge scores by (query, text), for tests that bypass the transcript.
  std::map<std::pair<std::string, std::string>, double> scores;
};

SyntheticWorld generate_world(const SyntheticSpec& spec);

}  // namespace claimwise::sim
