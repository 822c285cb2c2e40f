#include "claimwise/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "claimwise/error.hpp"
#include "claimwise/hash.hpp"
#include "claimwise/segment.hpp"
#include "claimwise/text.hpp"

namespace claimwise {

using nlohmann::json;

void to_json(json& j, const ResponsePair& p) {
  j = json{{"pair_id", p.pair_id},
           {"query", p.query},
           {"response_a", p.response_a},
           {"response_b", p.response_b},
           {"ground_truth", p.ground_truth ? json(to_string(*p.ground_truth)) : json(nullptr)},
           {"rounds", p.rounds},
           {"metadata", {{"source", p.source}, {"swapped", p.swapped}}}};
}

void from_json(const json& j, ResponsePair& p) {
  j.at("pair_id").get_to(p.pair_id);
  j.at("query").get_to(p.query);
  j.at("response_a").get_to(p.response_a);
  j.at("response_b").get_to(p.response_b);
  const auto& gt = j.value("ground_truth", json(nullptr));
  p.ground_truth = gt.is_null() ? std::nullopt
                                : std::optional<Side>(side_from_string(gt.get<std::string>()));
  p.rounds = j.value("rounds", 0);
  const auto meta = j.value("metadata", json::object());
  p.source = meta.value("source", "");
  p.swapped = meta.value("swapped", false);
}

namespace {

struct Turn {
  bool human;
  std::string content;
};

// Splits a transcript into turns at "\n\nHuman:" / "\n\nAssistant:" markers.
std::vector<Turn> split_turns(std::string_view transcript, std::size_t record_index,
                              std::string_view which) {
  constexpr std::string_view kHuman = "\n\nHuman:";
  constexpr std::string_view kAssistant = "\n\nAssistant:";
  auto fail = [&](const std::string& why) {
    return DataError("record " + std::to_string(record_index) + " (" + std::string(which) +
                     "): " + why);
  };

  std::vector<Turn> turns;
  std::size_t pos = transcript.find_first_not_of(" \t\r");
  if (pos == std::string_view::npos) throw fail("empty transcript");
  // Tolerate a missing leading blank line before the first marker.
  std::string buffer;
  if (transcript.substr(pos, 2) != "\n\n") {
    buffer = "\n\n" + std::string(transcript.substr(pos));
    transcript = buffer;
    pos = 0;
  }
  while (pos < transcript.size()) {
    bool human;
    std::size_t body;
    if (transcript.substr(pos, kHuman.size()) == kHuman) {
      human = true;
      body = pos + kHuman.size();
    } else if (transcript.substr(pos, kAssistant.size()) == kAssistant) {
      human = false;
      body = pos + kAssistant.size();
    } else {
      throw fail("expected a Human: or Assistant: turn marker");
    }
    const auto next = std::min(transcript.find(kHuman, body), transcript.find(kAssistant, body));
    const auto end = next == std::string_view::npos ? transcript.size() : next;
    turns.push_back({human, std::string(text::trim(transcript.substr(body, end - body)))});
    pos = end;
  }
  for (std::size_t i = 0; i < turns.size(); ++i) {
    if (turns[i].human != (i % 2 == 0)) throw fail("turns do not alternate Human/Assistant");
  }
  if (turns.size() < 2 || turns.back().human) throw fail("missing final assistant turn");
  return turns;
}

std::string render_turns(const std::vector<Turn>& turns, std::size_t count) {
  std::string out;
  for (std::size_t i = 0; i < count; ++i) {
    if (i > 0) out += "\n\n";
    out += turns[i].human ? "Human: " : "Assistant: ";
    out += turns[i].content;
  }
  return out;
}

}  // namespace

ResponsePair parse_record(const RawRecord& raw, const ParseOptions& options,
                          std::size_t record_index) {
  const auto chosen = split_turns(raw.chosen, record_index, "chosen");
  const auto rejected = split_turns(raw.rejected, record_index, "rejected");
  const auto prefix_len = chosen.size() - 1;
  bool same_prefix = rejected.size() == chosen.size();
  for (std::size_t i = 0; same_prefix && i < prefix_len; ++i) {
    same_prefix = chosen[i].content == rejected[i].content;
  }
  if (!same_prefix) {
    throw DataError("record " + std::to_string(record_index) +
                    ": transcripts diverge before the final assistant turn");
  }
  if (chosen.back().content == rejected.back().content) {
    throw DataError("record " + std::to_string(record_index) + ": responses are identical");
  }
  if (chosen.back().content.empty() || rejected.back().content.empty()) {
    throw DataError("record " + std::to_string(record_index) + ": empty final assistant turn");
  }

  ResponsePair pair;
  pair.query = render_turns(chosen, prefix_len);
  pair.pair_id = "p-" + sha256_hex(raw.chosen + '\x1f' + raw.rejected).substr(0, 16);
  pair.response_a = chosen.back().content;
  pair.response_b = rejected.back().content;
  pair.ground_truth = Side::A;
  pair.rounds = static_cast<int>((chosen.size() + 1) / 2);
  pair.source = options.source;
  if (options.shuffle_seed) {
    const auto bits = hash64(std::to_string(*options.shuffle_seed) + ":" + pair.pair_id);
    if (bits & 1U) {
      std::swap(pair.response_a, pair.response_b);
      pair.ground_truth = Side::B;
      pair.swapped = true;
    }
  }
  return pair;
}

std::string render_transcript(std::string_view query, std::string_view response) {
  return "\n\n" + std::string(query) + "\n\nAssistant: " + std::string(response);
}

void FilterRules::validate() const {
  if (min_sentences < 1) throw ValidationError("min_sentences must be >= 1");
}

std::optional<std::string> rejection_reason(const ResponsePair& pair, const FilterRules& rules) {
  if (!rules.allowed_rounds.count(pair.rounds)) return "rounds";
  for (const auto* response : {&pair.response_a, &pair.response_b}) {
    if (text::trim(*response).empty() || segment(*response).size() < rules.min_sentences) {
      return "min_sentences";
    }
  }
  const auto wa = text::word_count(pair.response_a);
  const auto wb = text::word_count(pair.response_b);
  if ((wa > wb ? wa - wb : wb - wa) > rules.max_word_diff) return "max_word_diff";
  for (const auto& keyword : rules.keyword_blocklist) {
    for (const auto* field : {&pair.query, &pair.response_a, &pair.response_b}) {
      if (text::contains_case_insensitive(*field, keyword)) return "blocklist";
    }
  }
  return std::nullopt;
}

FilterOutcome apply_filters(const std::vector<ResponsePair>& pairs, const FilterRules& rules) {
  rules.validate();
  FilterOutcome out;
  for (const auto& pair : pairs) {
    if (auto reason = rejection_reason(pair, rules)) {
      out.rejected.push_back({pair, *reason});
    } else {
      out.kept.push_back(pair);
    }
  }
  std::stable_sort(out.kept.begin(), out.kept.end(),
                   [](const auto& l, const auto& r) { return l.pair_id < r.pair_id; });
  std::stable_sort(out.rejected.begin(), out.rejected.end(),
                   [](const auto& l, const auto& r) { return l.pair.pair_id < r.pair.pair_id; });
  return out;
}

std::vector<ResponsePair> sample(const std::vector<ResponsePair>& kept, std::size_t n,
                                 std::uint64_t seed) {
  if (n > kept.size()) {
    throw DataError("cannot sample " + std::to_string(n) + " pairs from a pool of " +
                    std::to_string(kept.size()));
  }
  std::vector<std::size_t> idx(kept.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t l, std::size_t r) { return kept[l].pair_id < kept[r].pair_id; });
  // Partial Fisher-Yates over the canonical order.
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i + rng.below(idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
  std::vector<ResponsePair> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(kept[idx[i]]);
  std::sort(out.begin(), out.end(),
            [](const auto& l, const auto& r) { return l.pair_id < r.pair_id; });
  return out;
}

namespace {

template <typename Fn>
void for_each_json_line(const std::string& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      fn(json::parse(line), line_no);
    } catch (const json::exception& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

}  // namespace

std::vector<RawRecord> read_raw_records(const std::string& path) {
  std::vector<RawRecord> records;
  for_each_json_line(path, [&](const json& j, std::size_t line_no) {
    records.push_back(
        {j.at("chosen").get<std::string>(), j.at("rejected").get<std::string>(), line_no});
  });
  return records;
}

std::vector<ResponsePair> read_pairs(const std::string& path) {
  std::vector<ResponsePair> pairs;
  for_each_json_line(path, [&](const json& j, std::size_t) { pairs.push_back(j.get<ResponsePair>()); });
  return pairs;
}

void write_pairs(const std::string& path, const std::vector<ResponsePair>& pairs) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  for (const auto& p : pairs) out << json(p).dump() << "\n";
}

}  // namespace claimwise
