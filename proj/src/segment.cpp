#include "claimwise/segment.hpp"

#include <algorithm>
#include <cctype>

#include "claimwise/error.hpp"

namespace claimwise {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

// Token immediately preceding position `dot` (exclusive), back to whitespace.
std::string_view token_before(std::string_view text, std::size_t dot) {
  std::size_t begin = dot;
  while (begin > 0 && !is_space(text[begin - 1])) --begin;
  auto token = text.substr(begin, dot - begin);
  while (!token.empty() && (token.front() == '(' || token.front() == '"' || token.front() == '\'')) {
    token.remove_prefix(1);
  }
  return token;
}

}  // namespace

std::vector<Sentence> segment(std::string_view text, const SegmenterConfig& config) {
  if (text::trim(text).empty()) throw ValidationError("segment: input text is blank");

  std::vector<text::Span> spans;
  std::size_t start = 0;

  auto emit = [&](std::size_t end) {
    std::size_t b = start;
    std::size_t e = end;
    while (b < e && is_space(text[b])) ++b;
    while (e > b && is_space(text[e - 1])) --e;
    if (b < e) spans.push_back({b, e});
    start = end;
  };

  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      std::size_t j = i + 1;
      while (j < text.size() && is_space(text[j]) && text[j] != '\n') ++j;
      if (j < text.size() && text[j] == '\n') {
        emit(i);
        i = j + 1;
        continue;
      }
    }
    if (is_terminator(c)) {
      const std::size_t first = i;
      std::size_t j = i;
      while (j < text.size() && is_terminator(text[j])) ++j;
      while (j < text.size() && is_closer(text[j])) ++j;
      bool boundary = false;
      if (j == text.size()) {
        boundary = true;
      } else if (is_space(text[j])) {
        std::size_t k = j;
        while (k < text.size() && is_space(text[k])) ++k;
        boundary = k == text.size() || std::isupper(static_cast<unsigned char>(text[k])) != 0;
      }
      if (boundary && text[first] == '.' && j - first == 1) {
        const auto tok = token_before(text, first);
        if (std::find(config.abbreviations.begin(), config.abbreviations.end(), tok) !=
            config.abbreviations.end()) {
          boundary = false;
        }
      }
      if (boundary) emit(j);
      i = j;
      continue;
    }
    ++i;
  }
  emit(text.size());

  std::vector<Sentence> sentences;
  sentences.reserve(spans.size());
  for (const auto& span : spans) {
    sentences.push_back(
        {sentences.size(), std::string(text.substr(span.start, span.size())), span});
  }
  return sentences;
}

}  // namespace claimwise
