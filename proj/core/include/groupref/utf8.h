#ifndef GROUPREF_UTF8_H_
#define GROUPREF_UTF8_H_

#include <cstddef>
#include <string>
#include <string_view>

namespace groupref::utf8 {

// All span offsets in this library count Unicode scalar values, so text is
// decoded once into UTF-32 wherever offsets are computed.
// Throws Error("invalid-utf8") on malformed input.
std::u32string Decode(std::string_view text);
std::string Encode(std::u32string_view text);

// Number of scalar values in `text`.
std::size_t Length(std::string_view text);

inline bool IsSpace(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' ||
         c == U'\v' || c == 0x00A0;
}
inline bool IsAsciiAlnum(char32_t c) {
  return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') ||
         (c >= U'0' && c <= U'9');
}
// Letters outside ASCII count as word characters for boundary checks.
inline bool IsWordChar(char32_t c) { return IsAsciiAlnum(c) || c >= 0xC0; }
inline char32_t AsciiLower(char32_t c) {
  return (c >= U'A' && c <= U'Z') ? c + (U'a' - U'A') : c;
}
std::u32string AsciiLower(std::u32string_view text);
std::string AsciiLower(std::string_view text);

std::string_view Trim(std::string_view text);

}  // namespace groupref::utf8

#endif  // GROUPREF_UTF8_H_
