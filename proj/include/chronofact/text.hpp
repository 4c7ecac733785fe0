#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace chronofact {

// Whitespace split with surrounding punctuation stripped. Inner dots are
// kept so "F.C." stays one token; a trailing dot is dropped from tokens
// that have no other dot ("2006." -> "2006"). Pure punctuation tokens are
// discarded. A trailing "," or ";" is emitted as its own marker token so
// clause splitting can see it; strip_markers() removes them.
std::vector<std::string> tokenize(std::string_view text);
bool is_clause_marker(std::string_view token);
std::vector<std::string> strip_markers(const std::vector<std::string>& tokens);

std::string to_lower(std::string_view s);
std::string join(const std::vector<std::string>& tokens, std::string_view sep = " ");
bool is_capitalized(std::string_view token);
bool is_number(std::string_view token);

}  // namespace chronofact
