#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace commitforge::text {

/// Tokenization rule shared by the filter distributions and the text metrics:
/// a token is either a maximal run of [A-Za-z0-9_] or a single non-space,
/// non-word character.
std::vector<std::string> tokenize(std::string_view s);

/// Number of tokens under the rule above.
std::size_t count_tokens(std::string_view s);

std::string to_lower(std::string_view s);

/// Splits on '\n'; a trailing '\r' on each line is stripped.
std::vector<std::string> split_lines(std::string_view s);

std::string trim(std::string_view s);

bool contains_ci(std::string_view haystack, std::string_view needle);

/// Hex-encoded SHA-256 digest.
std::string sha256_hex(std::string_view data);

} // namespace commitforge::text
