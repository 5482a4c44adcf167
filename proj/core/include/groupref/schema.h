#ifndef GROUPREF_SCHEMA_H_
#define GROUPREF_SCHEMA_H_

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace groupref {

// Reference labels. kIn is the commenter's own team (the subreddit's team),
// kOut the opponent in the game, kOther any other team.
enum class TagLabel { kIn = 0, kOut = 1, kOther = 2 };

inline constexpr std::array<TagLabel, 3> kAllLabels = {
    TagLabel::kIn, TagLabel::kOut, TagLabel::kOther};

inline constexpr std::size_t LabelIndex(TagLabel label) {
  return static_cast<std::size_t>(label);
}

// "IN", "OUT", "OTHER".
std::string_view LabelName(TagLabel label);
// "[IN]", "[OUT]", "[OTHER]".
std::string_view LabelToken(TagLabel label);
// Case-insensitive; accepts "in" as well as "IN".
std::optional<TagLabel> ParseLabel(std::string_view name);

// Sentence sentinel inserted before every sentence of a segmented body.
inline constexpr std::string_view kSentinel = "[SENT]";
inline constexpr std::u32string_view kSentinel32 = U"[SENT]";

}  // namespace groupref

#endif  // GROUPREF_SCHEMA_H_
