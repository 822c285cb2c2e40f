#include "claimwise/decompose.hpp"

#include "claimwise/error.hpp"
#include "claimwise/hash.hpp"
#include "claimwise/parallel.hpp"

namespace claimwise {

SentenceClaims decompose_sentence(ClaimExtractor& extractor, const Sentence& sentence,
                                  std::string_view context) {
  try {
    auto claims = extractor.extract(sentence.text, context);
    return {std::move(claims), {}};
  } catch (const EmptyResult& e) {
    return {{sentence.text}, std::string("empty_result: ") + e.what()};
  } catch (const ProviderError& e) {
    return {{sentence.text}, std::string("provider_unavailable: ") + e.what()};
  }
}

double fidelity_score(std::string_view claim_text, std::string_view sentence_text) {
  return text::multiset_containment(text::tokenize(claim_text), text::tokenize(sentence_text));
}

std::string claim_id(std::string_view pair_id, Side side, std::size_t sentence_index,
                     std::size_t ordinal) {
  std::string key(pair_id);
  key += '\x1f';
  key += to_string(side);
  key += '\x1f' + std::to_string(sentence_index) + '\x1f' + std::to_string(ordinal);
  return "c-" + sha256_hex(key).substr(0, 16);
}

std::vector<Claim> decompose_response(ClaimExtractor& extractor, std::string_view response_text,
                                      std::string_view context, Side side,
                                      std::string_view pair_id, Provenance& provenance,
                                      const DecomposeOptions& options) {
  const auto sentences = segment(response_text, options.segmenter);

  std::vector<SentenceClaims> per_sentence(sentences.size());
  parallel_for(sentences.size(), options.parallelism, [&](std::size_t i) {
    per_sentence[i] = decompose_sentence(extractor, sentences[i], context);
  });

  std::vector<Claim> claims;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const auto& sentence = sentences[s];
    if (!per_sentence[s].fallback_reason.empty()) {
      provenance.note("extraction",
                      std::string(to_string(side)) + ":sentence:" + std::to_string(s),
                      "fallback_sentence_as_claim (" + per_sentence[s].fallback_reason + ")");
    }
    for (std::size_t k = 0; k < per_sentence[s].claims.size(); ++k) {
      Claim c;
      c.id = claim_id(pair_id, side, s, k);
      c.side = side;
      c.sentence_index = s;
      c.text = per_sentence[s].claims[k];
      c.source_span = sentence.span;
      c.narrative_rank = claims.size();
      c.fidelity = fidelity_score(c.text, sentence.text);
      if (c.fidelity < options.flag_threshold) {
        provenance.note("extraction", c.id, "low_fidelity");
      }
      claims.push_back(std::move(c));
    }
  }
  return claims;
}

}  // namespace claimwise
