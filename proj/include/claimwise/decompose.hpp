#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "claimwise/document.hpp"
#include "claimwise/providers.hpp"
#include "claimwise/segment.hpp"

namespace claimwise {

struct DecomposeOptions {
  SegmenterConfig segmenter;
  /// Claims with fidelity below this are flagged in provenance, not dropped.
  double flag_threshold = 0.8;
  int parallelism = 4;
  std::string timestamp;
};

/// Outcome of decomposing one sentence. `fallback_reason` is non-empty when
/// the sentence itself was substituted as the only claim.
struct SentenceClaims {
  std::vector<std::string> claims;
  std::string fallback_reason;
};

/// Never fails: extractor errors and empty results degrade to the sentence
/// text as a single claim.
SentenceClaims decompose_sentence(ClaimExtractor& extractor, const Sentence& sentence,
                                  std::string_view context);

/// Fraction of claim tokens (case-folded, punctuation-stripped, multiset)
/// found in the sentence. Empty claims score 0.
double fidelity_score(std::string_view claim_text, std::string_view sentence_text);

/// Stable id derived from (pair_id, side, sentence_index, emission ordinal).
std::string claim_id(std::string_view pair_id, Side side, std::size_t sentence_index,
                     std::size_t ordinal);

/// Segments, decomposes every sentence (concurrently, assembled in order),
/// and fills ids, spans, narrative ranks and fidelity. Fallbacks and
/// low-fidelity claims are noted in `provenance`.
std::vector<Claim> decompose_response(ClaimExtractor& extractor, std::string_view response_text,
                                      std::string_view context, Side side,
                                      std::string_view pair_id, Provenance& provenance,
                                      const DecomposeOptions& options = {});

}  // namespace claimwise
