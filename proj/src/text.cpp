#include "chronofact/text.hpp"

#include <algorithm>
#include <cctype>

namespace chronofact {
namespace {

bool is_strippable(char c) {
  switch (c) {
    case ',': case ':': case '!': case '?': case '(': case ')':
    case '"': case '\'': case '[': case ']': case '{': case '}':
      return true;
    default:
      return false;
  }
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    std::string_view word = text.substr(i, j - i);
    i = j;
    if (word.empty()) continue;

    char trailing_marker = 0;
    while (!word.empty() && (is_strippable(word.front()) || word.front() == ';')) word.remove_prefix(1);
    while (!word.empty() && (is_strippable(word.back()) || word.back() == ';')) {
      if (word.back() == ';' || (word.back() == ',' && trailing_marker != ';')) trailing_marker = word.back();
      word.remove_suffix(1);
    }
    if (!word.empty() && word.back() == '.' &&
        std::count(word.begin(), word.end(), '.') == 1) {
      word.remove_suffix(1);
    }
    if (!word.empty() && std::any_of(word.begin(), word.end(), [](char c) {
          return std::isalnum(static_cast<unsigned char>(c)) || static_cast<unsigned char>(c) >= 0x80;
        })) {
      out.emplace_back(word);
    }
    if (trailing_marker) out.emplace_back(1, trailing_marker);
  }
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string join(const std::vector<std::string>& tokens, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

bool is_capitalized(std::string_view token) {
  return !token.empty() && std::isupper(static_cast<unsigned char>(token.front()));
}

bool is_clause_marker(std::string_view token) { return token == "," || token == ";"; }

std::vector<std::string> strip_markers(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) {
    if (!is_clause_marker(t)) out.push_back(t);
  }
  return out;
}

bool is_number(std::string_view token) {
  return !token.empty() &&
         std::all_of(token.begin(), token.end(), [](unsigned char c) { return std::isdigit(c); });
}

}  // namespace chronofact
