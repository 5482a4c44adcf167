#include "groupref/utf8.h"

#include <gtest/gtest.h>

#include "groupref/error.h"

namespace groupref {
namespace {

TEST(Utf8Test, DecodeCountsScalarValues) {
  EXPECT_EQ(utf8::Length("abc"), 3u);
  EXPECT_EQ(utf8::Length("Hasn’t"), 6u);  // U+2019 is one scalar value
  EXPECT_EQ(utf8::Length("go 😀"), 4u);
  EXPECT_EQ(utf8::Length(""), 0u);
}

TEST(Utf8Test, RoundTripsMixedText) {
  const std::string text = "Ünïcödé ’s 😀 [SENT] ß";
  EXPECT_EQ(utf8::Encode(utf8::Decode(text)), text);
}

TEST(Utf8Test, RejectsMalformedInput) {
  EXPECT_THROW(utf8::Decode("\xC3"), Error);          // truncated
  EXPECT_THROW(utf8::Decode("\xC0\xAF"), Error);      // overlong
  EXPECT_THROW(utf8::Decode("\xED\xA0\x80"), Error);  // surrogate
  EXPECT_THROW(utf8::Decode("\xFF"), Error);
}

TEST(Utf8Test, LowerAndTrim) {
  EXPECT_EQ(utf8::AsciiLower(std::string_view("KC Chiefs")), "kc chiefs");
  EXPECT_EQ(utf8::Trim("  \t hi \n"), "hi");
  EXPECT_EQ(utf8::Trim("   "), "");
}

}  // namespace
}  // namespace groupref
