#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Small string helpers shared across modules.
namespace glow::text {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

/// Trims whitespace plus surrounding punctuation such as quotes, brackets,
/// trailing periods and commas.
std::string trim_punct(std::string_view s);

bool iequals(std::string_view a, std::string_view b);
bool icontains(std::string_view haystack, std::string_view needle);
bool starts_with_icase(std::string_view s, std::string_view prefix);

std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// The part of an IRI after the last '#', '/' or ':'.
std::string_view local_name(std::string_view iri);

/// Number of UTF-8 code points; malformed bytes count as one each.
std::size_t utf8_length(std::string_view s);

/// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view s);

}  // namespace glow::text
