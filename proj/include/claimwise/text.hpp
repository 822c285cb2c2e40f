#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace claimwise::text {

/// Half-open character interval [start, end).
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool operator==(const Span&) const = default;
};

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);

/// Case-folded, punctuation-stripped tokens. ASCII alphanumerics and all
/// non-ASCII bytes are word characters; everything else separates tokens.
std::vector<std::string> tokenize(std::string_view s);

/// Whitespace-delimited word count.
std::size_t word_count(std::string_view s);

bool is_stopword(std::string_view token);

/// Fraction of `part` tokens (multiset) contained in the `whole` token multiset.
/// Empty `part` yields 0.
double multiset_containment(const std::vector<std::string>& part,
                            const std::vector<std::string>& whole);

/// Substitutes `{name}` placeholders; unknown placeholders are left verbatim.
std::string render_template(
    std::string_view tmpl,
    const std::vector<std::pair<std::string, std::string>>& values);

bool contains_case_insensitive(std::string_view haystack, std::string_view needle);

std::vector<std::string> split(std::string_view s, char sep);

}  // namespace claimwise::text

namespace claimwise::text {

/// Shared non-stopword token of two texts with the largest combined count;
/// ties go to the token appearing latest in `a`. Falls back to any shared
/// token, then to the first content token of `a`. Empty if `a` has no tokens.
std::string shared_content_token(std::string_view a, std::string_view b);

}  // namespace claimwise::text
