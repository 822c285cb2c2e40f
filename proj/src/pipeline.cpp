#include "claimwise/pipeline.hpp"

#include <fstream>

#include "claimwise/error.hpp"

namespace claimwise {

using nlohmann::json;

DecompositionResult run_pipeline(const ResponsePair& pair, PipelineProviders& providers,
                                 const PipelineOptions& options) {
  if (!(options.link_threshold > 0.0 && options.link_threshold <= 1.0)) {
    throw ValidationError("link threshold must be in (0, 1]");
  }
  const int par = options.decompose.parallelism;
  const auto& ts = options.decompose.timestamp;

  DecompositionResult doc;
  doc.pair_id = pair.pair_id;
  auto& prov = doc.provenance;

  doc.claims_a = decompose_response(*providers.extractor, pair.response_a, pair.response_a,
                                    Side::A, pair.pair_id, prov, options.decompose);
  doc.claims_b = decompose_response(*providers.extractor, pair.response_b, pair.response_b,
                                    Side::B, pair.pair_id, prov, options.decompose);
  prov.stages["extraction"] = {providers.extractor->describe(), ts};

  rank_claims(*providers.scorer, pair.query, doc.claims_a, prov, par);
  rank_claims(*providers.scorer, pair.query, doc.claims_b, prov, par);
  prov.stages["ranking"] = {providers.scorer->describe(), ts};

  doc.links = link_claims(*providers.embedder, doc.claims_a, doc.claims_b,
                          options.link_threshold, prov, par);
  prov.stages["linking"] = {providers.embedder->describe(), ts};

  label_links(*providers.summarizer, pair.query, doc.links, doc, prov, par);
  prov.stages["labeling"] = {providers.summarizer->describe(), ts};

  validate(doc);
  return doc;
}

std::vector<DecompositionResult> read_decompositions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<DecompositionResult> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      docs.push_back(json::parse(line).get<DecompositionResult>());
      validate(docs.back());
    } catch (const json::exception& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return docs;
}

void write_decompositions(const std::string& path, const std::vector<DecompositionResult>& docs) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  for (const auto& d : docs) out << json(d).dump() << "\n";
}

}  // namespace claimwise
