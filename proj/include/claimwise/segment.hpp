#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "claimwise/text.hpp"

namespace claimwise {

struct Sentence {
  std::size_t index = 0;
  std::string text;
  text::Span span;
};

struct SegmenterConfig {
  /// Tokens that never end a sentence when followed by '.'. Case-sensitive.
  std::vector<std::string> abbreviations = {"Mr", "Mrs", "Ms", "Dr",  "Prof", "St",
                                            "vs", "etc", "e.g", "i.e", "U.S"};
};

/// Rule-based sentence splitter.
///
/// A sentence ends after a run of '.', '!' or '?' (plus any closing quotes or
/// brackets) when it is followed by whitespace and an uppercase letter, or by
/// the end of the text. A period directly after a listed abbreviation does not
/// end a sentence. Two newlines (optionally separated by other whitespace)
/// always end a sentence. Spans exclude surrounding whitespace.
///
/// Throws ValidationError when `text` is blank.
std::vector<Sentence> segment(std::string_view text, const SegmenterConfig& config = {});

}  // namespace claimwise
