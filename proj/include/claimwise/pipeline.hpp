#pragma once

#include <memory>
#include <string>
#include <vector>

#include "claimwise/annotate.hpp"
#include "claimwise/dataset.hpp"
#include "claimwise/decompose.hpp"
#include "claimwise/document.hpp"
#include "claimwise/providers.hpp"

namespace claimwise {

/// The four model-backed capabilities the decomposition pipeline needs.
struct PipelineProviders {
  std::unique_ptr<ClaimExtractor> extractor;
  std::unique_ptr<RelevanceScorer> scorer;
  std::unique_ptr<Embedder> embedder;
  std::unique_ptr<KeywordSummarizer> summarizer;
};

struct PipelineOptions {
  DecomposeOptions decompose;
  double link_threshold = kDefaultLinkThreshold;
};

/// segment -> extract -> rank -> link -> label for both responses of a pair.
DecompositionResult run_pipeline(const ResponsePair& pair, PipelineProviders& providers,
                                 const PipelineOptions& options = {});

std::vector<DecompositionResult> read_decompositions(const std::string& path);
void write_decompositions(const std::string& path, const std::vector<DecompositionResult>& docs);

}  // namespace claimwise
