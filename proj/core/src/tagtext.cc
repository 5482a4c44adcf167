#include "groupref/tagtext.h"

#include <algorithm>
#include <map>
#include <utility>

#include "groupref/utf8.h"

namespace groupref {

std::string_view LabelName(TagLabel label) {
  switch (label) {
    case TagLabel::kIn:
      return "IN";
    case TagLabel::kOut:
      return "OUT";
    case TagLabel::kOther:
      return "OTHER";
  }
  return "?";
}

std::string_view LabelToken(TagLabel label) {
  switch (label) {
    case TagLabel::kIn:
      return "[IN]";
    case TagLabel::kOut:
      return "[OUT]";
    case TagLabel::kOther:
      return "[OTHER]";
  }
  return "?";
}

std::optional<TagLabel> ParseLabel(std::string_view name) {
  const std::string lowered = utf8::AsciiLower(name);
  if (lowered == "in") return TagLabel::kIn;
  if (lowered == "out") return TagLabel::kOut;
  if (lowered == "other") return TagLabel::kOther;
  return std::nullopt;
}

std::vector<std::size_t> SentinelPositions(std::u32string_view text) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while ((pos = text.find(kSentinel32, pos)) != std::u32string_view::npos) {
    out.push_back(pos);
    pos += kSentinel32.size();
  }
  return out;
}

std::optional<std::string> CheckSpans(std::u32string_view text,
                                      std::span<const Span> spans) {
  const auto sentinels = SentinelPositions(text);
  auto at = [](std::size_t i) { return "span " + std::to_string(i) + ": "; };
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const Span& s = spans[i];
    if (s.start >= s.end) return at(i) + "empty or reversed range";
    if (s.end > text.size()) return at(i) + "end beyond text length";
    if (i > 0) {
      if (s.start < spans[i - 1].start) return at(i) + "spans not sorted";
      if (s.start < spans[i - 1].end) return at(i) + "overlap";
    }
    if (s.confidence && (*s.confidence < 1 || *s.confidence > 5)) {
      return at(i) + "confidence outside 1..5";
    }
    if (s.implicit) {
      const bool on_sentinel =
          s.end - s.start == kSentinel32.size() &&
          std::binary_search(sentinels.begin(), sentinels.end(), s.start);
      if (!on_sentinel) return at(i) + "implicit span must cover one sentinel";
    } else {
      for (std::size_t p : sentinels) {
        if (s.start < p + kSentinel32.size() && p < s.end) {
          return at(i) + "explicit span overlaps a sentinel";
        }
      }
    }
  }
  return std::nullopt;
}

void ValidateSpans(std::u32string_view text, std::span<const Span> spans) {
  if (auto problem = CheckSpans(text, spans)) {
    throw Error("invalid-spans", *problem);
  }
}

std::string SpanSurface(std::u32string_view text, const Span& span) {
  if (span.end > text.size() || span.start > span.end) return {};
  return utf8::Encode(text.substr(span.start, span.end - span.start));
}

std::string RenderTagged(const TaggedComment& tagged) {
  const std::u32string text = utf8::Decode(tagged.text);
  std::vector<Span> spans = tagged.spans;
  std::sort(spans.begin(), spans.end(),
            [](const Span& a, const Span& b) { return a.start < b.start; });
  std::u32string out;
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const Span& s = spans[i];
    if (i > 0 && s.start < spans[i - 1].end) {
      throw Error("overlap", "spans " + std::to_string(i - 1) + " and " +
                                 std::to_string(i) + " overlap");
    }
    if (s.start >= s.end || s.end > text.size()) {
      throw Error("invalid-spans", "span " + std::to_string(i) +
                                       " outside text bounds");
    }
    out.append(text, cursor, s.start - cursor);
    const auto token = LabelToken(s.label);
    out.append(token.begin(), token.end());
    cursor = s.end;
  }
  out.append(text, cursor, std::u32string::npos);
  return utf8::Encode(out);
}

// ------------------------------------------------------------------ parsing

namespace {

struct TaggedPieces {
  std::vector<std::u32string> segments;  // labels.size() + 1 entries
  std::vector<TagLabel> labels;
};

bool MatchesTokenAt(std::u32string_view text, std::size_t pos,
                    std::u32string_view lowered_token) {
  if (pos + lowered_token.size() > text.size()) return false;
  for (std::size_t k = 0; k < lowered_token.size(); ++k) {
    if (utf8::AsciiLower(text[pos + k]) != lowered_token[k]) return false;
  }
  return true;
}

TaggedPieces SplitOnTags(std::u32string_view tagged) {
  static const std::pair<std::u32string_view, TagLabel> kTokens[] = {
      {U"[in]", TagLabel::kIn},
      {U"[out]", TagLabel::kOut},
      {U"[other]", TagLabel::kOther}};
  TaggedPieces pieces;
  pieces.segments.emplace_back();
  std::size_t i = 0;
  while (i < tagged.size()) {
    if (tagged[i] == U'[') {
      bool consumed = false;
      for (const auto& [token, label] : kTokens) {
        if (MatchesTokenAt(tagged, i, token)) {
          pieces.labels.push_back(label);
          pieces.segments.emplace_back();
          i += token.size();
          consumed = true;
          break;
        }
      }
      if (consumed) continue;
      if (MatchesTokenAt(tagged, i, U"[sent]")) {
        pieces.segments.back().append(kSentinel32);
        i += kSentinel32.size();
        continue;
      }
    }
    pieces.segments.back().push_back(tagged[i]);
    ++i;
  }
  return pieces;
}

std::u32string_view TrimSpace(std::u32string_view s) {
  while (!s.empty() && utf8::IsSpace(s.front())) s.remove_prefix(1);
  while (!s.empty() && utf8::IsSpace(s.back())) s.remove_suffix(1);
  return s;
}

// Searches placements of the tagged segments in the original text. A
// placement puts segment i at [begin_i, end_i); the span for tag i is the
// original text between end_{i-1} and begin_i. Feasibility is memoized on
// (segment, previous end), so both leftmost and rightmost searches are
// polynomial.
class Aligner {
 public:
  Aligner(const TaggedPieces& pieces, std::u32string_view original,
          bool tolerant)
      : pieces_(pieces),
        original_(original),
        tolerant_(tolerant),
        sentinels_(SentinelPositions(original)) {}

  std::optional<std::vector<Span>> Solve(bool leftmost) {
    const auto first_end = MatchFirst();
    if (!first_end) return std::nullopt;
    std::vector<Span> spans;
    if (!Search(1, *first_end, leftmost, &spans)) return std::nullopt;
    return spans;
  }

  std::size_t divergence() const { return divergence_; }

 private:
  // Returns the end offset when segment `index` matches at `begin`.
  std::optional<std::size_t> MatchAt(std::size_t index, std::size_t begin) {
    const std::u32string& seg = pieces_.segments[index];
    if (!tolerant_) {
      std::size_t k = 0;
      while (k < seg.size() && begin + k < original_.size() &&
             original_[begin + k] == seg[k]) {
        ++k;
      }
      if (index == 0) Note(begin + k);
      if (k < seg.size()) return std::nullopt;
      return begin + seg.size();
    }
    const std::u32string_view core = TrimSpace(seg);
    if (core.empty()) {
      if (seg.empty()) return begin;
      // Whitespace between two tags must still separate them in the
      // original.
      std::size_t q = begin;
      while (q < original_.size() && utf8::IsSpace(original_[q])) ++q;
      if (q == begin) return std::nullopt;
      return q;
    }
    if (begin >= original_.size() || utf8::IsSpace(original_[begin])) {
      return std::nullopt;
    }
    std::size_t q = begin;
    std::size_t k = 0;
    while (k < core.size()) {
      if (utf8::IsSpace(core[k])) {
        while (k < core.size() && utf8::IsSpace(core[k])) ++k;
        while (q < original_.size() && utf8::IsSpace(original_[q])) ++q;
        continue;
      }
      while (q < original_.size() && utf8::IsSpace(original_[q]) && k > 0 &&
             !utf8::IsSpace(core[k - 1])) {
        // A space present in the original but dropped in the tagged text
        // is tolerated too.
        ++q;
      }
      if (q >= original_.size() || original_[q] != core[k]) {
        if (index == 0) Note(q);
        return std::nullopt;
      }
      ++q;
      ++k;
    }
    return q;
  }

  std::optional<std::size_t> MatchFirst() {
    if (!tolerant_) return MatchAt(0, 0);
    const std::u32string_view core = TrimSpace(pieces_.segments[0]);
    if (core.empty()) return std::size_t{0};
    std::size_t q = 0;
    while (q < original_.size() && utf8::IsSpace(original_[q])) ++q;
    return MatchAt(0, q);
  }

  bool AtEnd(std::size_t end) const {
    if (!tolerant_) return end == original_.size();
    for (std::size_t q = end; q < original_.size(); ++q) {
      if (!utf8::IsSpace(original_[q])) return false;
    }
    return true;
  }

  // Span covering original[from, to), trimmed in tolerant mode; nullopt if
  // it would be empty or straddle a sentinel.
  std::optional<Span> MakeSpan(std::size_t from, std::size_t to,
                               TagLabel label) const {
    if (tolerant_) {
      while (from < to && utf8::IsSpace(original_[from])) ++from;
      while (to > from && utf8::IsSpace(original_[to - 1])) --to;
    }
    if (from >= to) return std::nullopt;
    Span span{from, to, label, false, std::nullopt};
    for (std::size_t p : sentinels_) {
      if (from < p + kSentinel32.size() && p < to) {
        if (from == p && to == p + kSentinel32.size()) {
          span.implicit = true;
          return span;
        }
        return std::nullopt;
      }
    }
    return span;
  }

  // Places segment `index`, given the previous segment ended at `prev_end`.
  bool Search(std::size_t index, std::size_t prev_end, bool leftmost,
              std::vector<Span>* spans) {
    const std::size_t n = pieces_.labels.size();
    Note(prev_end);
    if (index > n) return AtEnd(prev_end);
    const auto key = std::make_pair(index, prev_end);
    if (auto it = dead_.find(key); it != dead_.end()) return false;
    const std::size_t lo = prev_end + 1;
    const std::size_t hi = original_.size();
    for (std::size_t step = 0; lo + step <= hi; ++step) {
      const std::size_t begin = leftmost ? lo + step : hi - step;
      auto span = MakeSpan(prev_end, begin, pieces_.labels[index - 1]);
      if (!span) continue;
      auto end = MatchAt(index, begin);
      if (!end) continue;
      if (index == n && !AtEnd(*end)) continue;
      spans->push_back(*span);
      if (Search(index + 1, *end, leftmost, spans)) return true;
      spans->pop_back();
    }
    dead_.emplace(key, true);
    return false;
  }

  void Note(std::size_t pos) { divergence_ = std::max(divergence_, pos); }

  const TaggedPieces& pieces_;
  std::u32string_view original_;
  bool tolerant_;
  std::vector<std::size_t> sentinels_;
  std::map<std::pair<std::size_t, std::size_t>, bool> dead_;
  std::size_t divergence_ = 0;
};

}  // namespace

ParseResult ParseTagged(std::string_view tagged, std::string_view original) {
  const std::u32string tagged32 = utf8::Decode(tagged);
  const std::u32string original32 = utf8::Decode(original);
  const TaggedPieces pieces = SplitOnTags(tagged32);

  std::size_t divergence = 0;
  for (bool tolerant : {false, true}) {
    Aligner left(pieces, original32, tolerant);
    auto spans = left.Solve(/*leftmost=*/true);
    if (!spans) {
      if (!tolerant) divergence = left.divergence();
      continue;
    }
    ParseResult result;
    result.report.whitespace_normalized = tolerant;
    Aligner right(pieces, original32, tolerant);
    auto alternative = right.Solve(/*leftmost=*/false);
    result.report.ambiguous = alternative && *alternative != *spans;
    result.spans = std::move(*spans);
    return result;
  }
  throw AlignmentError(divergence,
                       "tagged text diverges from the original at offset " +
                           std::to_string(divergence));
}

std::vector<Span> MergeTags(std::span<const Span> model,
                            std::span<const Span> lexicon) {
  std::vector<Span> out(model.begin(), model.end());
  for (const Span& candidate : lexicon) {
    const bool clash = std::any_of(model.begin(), model.end(), [&](const Span& m) {
      return candidate.start < m.end && m.start < candidate.end;
    });
    if (!clash) out.push_back(candidate);
  }
  std::sort(out.begin(), out.end(),
            [](const Span& a, const Span& b) { return a.start < b.start; });
  return out;
}

}  // namespace groupref
