#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "claimwise/document.hpp"

namespace claimwise {

/// One HH-RLHF style record: two full transcripts that differ only in the
/// final assistant turn.
struct RawRecord {
  std::string chosen;
  std::string rejected;
  std::size_t line = 0;  // 1-based source line, 0 if not read from a file
};

struct ResponsePair {
  std::string pair_id;
  std::string query;
  std::string response_a;
  std::string response_b;
  std::optional<Side> ground_truth;
  int rounds = 0;
  std::string source;
  bool swapped = false;  // true when the chosen response was moved to side B

  const std::string& response(Side side) const {
    return side == Side::A ? response_a : response_b;
  }
};

void to_json(nlohmann::json& j, const ResponsePair& p);
void from_json(const nlohmann::json& j, ResponsePair& p);

struct ParseOptions {
  /// Seed for the per-pair side shuffle; nullopt keeps chosen on side A.
  std::optional<std::uint64_t> shuffle_seed;
  std::string source = "hh-rlhf";
};

/// Parses a record whose transcripts use "\n\nHuman:" / "\n\nAssistant:"
/// markers. `record_index` is only used in error messages.
/// Throws DataError on malformed transcripts or identical final turns.
ResponsePair parse_record(const RawRecord& raw, const ParseOptions& options = {},
                          std::size_t record_index = 0);

/// Inverse of parse_record for one side's view: rebuilds the transcript of
/// `query` followed by an assistant turn `response`.
std::string render_transcript(std::string_view query, std::string_view response);

struct FilterRules {
  std::set<int> allowed_rounds = {1, 2};
  std::size_t min_sentences = 5;
  std::size_t max_word_diff = 30;
  std::vector<std::string> keyword_blocklist;
  std::size_t sample_size = 50;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Rejection {
  ResponsePair pair;
  std::string reason;  // rounds | min_sentences | max_word_diff | blocklist
};

struct FilterOutcome {
  std::vector<ResponsePair> kept;
  std::vector<Rejection> rejected;
};

/// First-match rejection reason, or nullopt if the pair passes.
std::optional<std::string> rejection_reason(const ResponsePair& pair, const FilterRules& rules);

/// Partitions pairs; both outputs are ordered by pair_id.
FilterOutcome apply_filters(const std::vector<ResponsePair>& pairs, const FilterRules& rules);

/// Uniform sample without replacement, deterministic in `seed`, returned in
/// pair_id order. Throws DataError when n exceeds the pool.
std::vector<ResponsePair> sample(const std::vector<ResponsePair>& kept, std::size_t n,
                                 std::uint64_t seed);

/// JSON-lines helpers. Blank lines are skipped; errors name the 1-based line.
std::vector<RawRecord> read_raw_records(const std::string& path);
std::vector<ResponsePair> read_pairs(const std::string& path);
void write_pairs(const std::string& path, const std::vector<ResponsePair>& pairs);

}  // namespace claimwise
