#ifndef GROUPREF_TAGTEXT_H_
#define GROUPREF_TAGTEXT_H_

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "groupref/error.h"
#include "groupref/schema.h"

namespace groupref {

// A labeled region of a segmented body. Offsets count Unicode scalar values;
// `end` is exclusive. Implicit spans cover exactly one "[SENT]" token.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  TagLabel label = TagLabel::kIn;
  bool implicit = false;
  std::optional<int> confidence;  // 1..5 when present

  bool operator==(const Span&) const = default;
};

struct TaggedComment {
  std::string comment_id;
  std::string text;  // segmented body
  std::vector<Span> spans;

  bool operator==(const TaggedComment&) const = default;
};

// Offsets of every "[SENT]" token in `text`.
std::vector<std::size_t> SentinelPositions(std::u32string_view text);

// Returns a description of the first violated span invariant, or nullopt.
// Checked: sorted by start, non-overlapping, in bounds, start < end,
// implicit spans cover exactly one sentinel, explicit spans never touch a
// sentinel, confidence in 1..5.
std::optional<std::string> CheckSpans(std::u32string_view text,
                                      std::span<const Span> spans);
// Throws Error("invalid-spans") with the CheckSpans message.
void ValidateSpans(std::u32string_view text, std::span<const Span> spans);

std::string SpanSurface(std::u32string_view text, const Span& span);

// Replaces each span with its label token. Throws Error("overlap") for
// overlapping spans and Error("invalid-spans") for out-of-range ones.
std::string RenderTagged(const TaggedComment& tagged);

struct ParseReport {
  // Exact alignment failed and the whitespace-tolerant fallback was used.
  bool whitespace_normalized = false;
  // More than one span placement reproduces the tagged text; the leftmost
  // one was returned.
  bool ambiguous = false;
};

struct ParseResult {
  std::vector<Span> spans;
  ParseReport report;
};

class AlignmentError : public Error {
 public:
  AlignmentError(std::size_t offset, const std::string& message)
      : Error("alignment-failed", message), offset_(offset) {}
  // First offset into the original text where the tagged text diverged.
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Recovers spans from tagged text by aligning the untagged segments between
// tag tokens against `original`, leftmost feasible placement first. Tag
// tokens are matched case-insensitively ("[in]" == "[IN]"). When exact
// alignment fails, whitespace differences (doubled spaces, a space inserted
// before punctuation) are tolerated. Throws AlignmentError.
ParseResult ParseTagged(std::string_view tagged, std::string_view original);

// Union of both lists; a lexicon span overlapping any model span is dropped.
std::vector<Span> MergeTags(std::span<const Span> model,
                            std::span<const Span> lexicon);

}  // namespace groupref

#endif  // GROUPREF_TAGTEXT_H_
