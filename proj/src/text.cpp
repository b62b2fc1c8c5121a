#include "acoso/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <stdexcept>

namespace acoso::text {

std::u32string decode_utf8(std::string_view utf8) {
    std::u32string out;
    out.reserve(utf8.size());
    const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
    const auto length = static_cast<int32_t>(utf8.size());
    int32_t i = 0;
    while (i < length) {
        UChar32 c;
        U8_NEXT(s, i, length, c);
        out.push_back(c < 0 ? U'�' : static_cast<char32_t>(c));
    }
    return out;
}

std::string encode_utf8(std::u32string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char32_t c : text) {
        uint8_t buf[U8_MAX_LENGTH];
        int32_t n = 0;
        UBool error = false;
        U8_APPEND(buf, n, U8_MAX_LENGTH, static_cast<UChar32>(c), error);
        if (error) {
            n = 0;
            U8_APPEND_UNSAFE(buf, n, 0xFFFD);
        }
        out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
    }
    return out;
}

bool is_letter(char32_t c) { return u_isalpha(static_cast<UChar32>(c)); }

bool is_space(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }

bool is_upper(char32_t c) { return u_isupper(static_cast<UChar32>(c)); }

char32_t to_lower(char32_t c) { return static_cast<char32_t>(u_tolower(static_cast<UChar32>(c))); }

namespace {

const icu::Normalizer2& nfd() {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* n = icu::Normalizer2::getNFDInstance(status);
    if (U_FAILURE(status) || n == nullptr) {
        throw std::runtime_error("ICU NFD normalizer unavailable");
    }
    return *n;
}

const icu::Normalizer2& nfc() {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status) || n == nullptr) {
        throw std::runtime_error("ICU NFC normalizer unavailable");
    }
    return *n;
}

constexpr char32_t kCombiningTilde = U'̃';

}  // namespace

std::u32string fold_accents(std::u32string_view text) {
    const auto& normalizer = nfd();
    std::u32string out;
    out.reserve(text.size());
    icu::UnicodeString decomposed;
    for (char32_t c : text) {
        if (c == U'ñ' || c == U'Ñ') {
            out.push_back(c);
            continue;
        }
        UErrorCode status = U_ZERO_ERROR;
        decomposed.remove();
        normalizer.normalize(icu::UnicodeString(static_cast<UChar32>(c)), decomposed, status);
        if (U_FAILURE(status)) {
            out.push_back(c);
            continue;
        }
        for (int32_t i = 0; i < decomposed.length();) {
            const UChar32 d = decomposed.char32At(i);
            i += U16_LENGTH(d);
            if (u_charType(d) == U_NON_SPACING_MARK && d != static_cast<UChar32>(kCombiningTilde)) {
                continue;
            }
            out.push_back(static_cast<char32_t>(d));
        }
    }
    return out;
}

std::string to_nfc(std::string_view utf8) {
    // Round-trip through decode/encode first so ill-formed bytes become U+FFFD.
    const auto clean = encode_utf8(decode_utf8(utf8));
    UErrorCode status = U_ZERO_ERROR;
    const auto normalized = nfc().normalize(icu::UnicodeString::fromUTF8(clean), status);
    if (U_FAILURE(status)) {
        return clean;
    }
    std::string out;
    normalized.toUTF8String(out);
    return out;
}

std::vector<std::string> split_whitespace(std::string_view utf8) {
    std::vector<std::string> out;
    std::u32string word;
    for (char32_t c : decode_utf8(utf8)) {
        if (is_space(c)) {
            if (!word.empty()) {
                out.push_back(encode_utf8(word));
                word.clear();
            }
        } else {
            word.push_back(c);
        }
    }
    if (!word.empty()) {
        out.push_back(encode_utf8(word));
    }
    return out;
}

std::vector<std::string> lower_words(std::string_view utf8) {
    auto decoded = decode_utf8(utf8);
    for (auto& c : decoded) {
        c = to_lower(c);
    }
    return split_whitespace(encode_utf8(decoded));
}

}  // namespace acoso::text
