#pragma once

#include <string>
#include <string_view>
#include <vector>

// Code-point level helpers backed by ICU.
namespace acoso::text {

/// Ill-formed sequences decode to U+FFFD.
std::u32string decode_utf8(std::string_view utf8);
std::string encode_utf8(std::u32string_view text);

/// Canonical composition, so decomposed accents attach to their base letter.
std::string to_nfc(std::string_view utf8);

bool is_letter(char32_t c);
bool is_space(char32_t c);
bool is_upper(char32_t c);
char32_t to_lower(char32_t c);

/// Strips combining marks after canonical decomposition. The tilde of ñ/Ñ is
/// kept because it distinguishes Spanish words.
std::u32string fold_accents(std::u32string_view text);

/// Lowercases per code point and splits on Unicode whitespace.
std::vector<std::string> lower_words(std::string_view utf8);

std::vector<std::string> split_whitespace(std::string_view utf8);

}  // namespace acoso::text
