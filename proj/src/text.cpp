#include "claimwise/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>

namespace claimwise::text {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u) != 0;
}

// Short function words; content-token selection skips these.
constexpr std::array<std::string_view, 64> kStopwords = {
    "a",     "an",    "the",   "and",  "or",    "but",  "if",   "of",
    "to",    "in",    "on",    "at",   "by",    "for",  "with", "from",
    "as",    "is",    "are",   "was",  "were",  "be",   "been", "being",
    "has",   "have",  "had",   "do",   "does",  "did",  "it",   "its",
    "he",    "she",   "they",  "them", "his",   "her",  "their", "we",
    "you",   "your",  "i",     "me",   "my",    "this", "that", "these",
    "those", "there", "then",  "than", "so",    "not",  "no",   "can",
    "will",  "would", "should", "could", "may", "might", "must", "also"};

}  // namespace

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : s) {
    if (is_word_char(c)) {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::size_t word_count(std::string_view s) {
  std::size_t count = 0;
  bool in_word = false;
  for (char c : s) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++count;
    }
  }
  return count;
}

bool is_stopword(std::string_view token) {
  return std::find(kStopwords.begin(), kStopwords.end(), token) != kStopwords.end();
}

double multiset_containment(const std::vector<std::string>& part,
                            const std::vector<std::string>& whole) {
  if (part.empty()) return 0.0;
  std::map<std::string_view, int> available;
  for (const auto& t : whole) ++available[t];
  std::size_t hits = 0;
  for (const auto& t : part) {
    auto it = available.find(t);
    if (it != available.end() && it->second > 0) {
      --it->second;
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(part.size());
}

std::string render_template(
    std::string_view tmpl,
    const std::vector<std::pair<std::string, std::string>>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const auto close = tmpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        const auto name = tmpl.substr(i + 1, close - i - 1);
        auto it = std::find_if(values.begin(), values.end(),
                               [&](const auto& kv) { return kv.first == name; });
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(tmpl[i]);
    ++i;
  }
  return out;
}

bool contains_case_insensitive(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return false;
  return to_lower(haystack).find(to_lower(needle)) != std::string::npos;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.emplace_back(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace claimwise::text

namespace claimwise::text {

std::string shared_content_token(std::string_view a, std::string_view b) {
  const auto ta = tokenize(a);
  const auto tb = tokenize(b);
  auto pick = [&](bool content_only) -> std::string {
    std::string best;
    std::size_t best_count = 0;
    for (const auto& t : ta) {
      if (content_only && is_stopword(t)) continue;
      const auto in_b = static_cast<std::size_t>(std::count(tb.begin(), tb.end(), t));
      if (in_b == 0) continue;
      const auto total = in_b + static_cast<std::size_t>(std::count(ta.begin(), ta.end(), t));
      // >= so later tokens in `a` win ties.
      if (total >= best_count) {
        best = t;
        best_count = total;
      }
    }
    return best;
  };
  if (auto t = pick(true); !t.empty()) return t;
  if (auto t = pick(false); !t.empty()) return t;
  for (const auto& t : ta) {
    if (!is_stopword(t)) return t;
  }
  return ta.empty() ? std::string{} : ta.front();
}

}  // namespace claimwise::text
