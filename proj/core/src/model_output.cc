#include "groupref/model_output.h"

#include <algorithm>
#include <array>

#include "groupref/error.h"
#include "groupref/utf8.h"

namespace groupref {
namespace {

struct Section {
  std::size_t label_pos = std::string_view::npos;
  std::size_t content_pos = std::string_view::npos;
};

// First occurrence of `label` (case-insensitive), preferring one that
// starts a line.
Section FindLabel(std::string_view raw, std::string_view lowered,
                  std::string_view label) {
  Section any;
  std::size_t pos = 0;
  while ((pos = lowered.find(label, pos)) != std::string_view::npos) {
    std::size_t back = pos;
    while (back > 0 && (raw[back - 1] == ' ' || raw[back - 1] == '\t')) --back;
    const bool line_start = back == 0 || raw[back - 1] == '\n';
    Section s{pos, pos + label.size()};
    if (line_start) return s;
    if (any.label_pos == std::string_view::npos) any = s;
    pos += label.size();
  }
  return any;
}

std::string TrimCopy(std::string_view s) { return std::string(utf8::Trim(s)); }

// The target is one paragraph; anything after a blank line is commentary.
std::string FirstParagraph(std::string_view s) {
  s = utf8::Trim(s);
  std::size_t cut = s.find("\n\n");
  if (auto crlf = s.find("\r\n\r\n"); crlf < cut) cut = crlf;
  if (cut != std::string_view::npos) s = s.substr(0, cut);
  return TrimCopy(s);
}

}  // namespace

std::string_view ParseStatusName(ParseStatus status) {
  switch (status) {
    case ParseStatus::kOk:
      return "ok";
    case ParseStatus::kIncomplete:
      return "incomplete";
    case ParseStatus::kAlignmentFailed:
      return "alignment-failed";
    case ParseStatus::kNoTarget:
      return "no-target";
  }
  return "?";
}

std::optional<std::vector<std::string>> ParseRefList(std::string_view text) {
  const std::size_t open = text.find('[');
  if (open == std::string_view::npos) return std::nullopt;
  std::vector<std::string> items;
  std::size_t i = open + 1;
  auto skip_space = [&] {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' ||
                               text[i] == '\n' || text[i] == '\r')) {
      ++i;
    }
  };
  skip_space();
  if (i < text.size() && text[i] == ']') return items;
  while (i < text.size()) {
    skip_space();
    std::string item;
    if (text[i] == '\'' || text[i] == '"') {
      const char quote = text[i++];
      bool closed = false;
      while (i < text.size()) {
        if (text[i] == '\\' && i + 1 < text.size()) {
          item += text[i + 1];
          i += 2;
          continue;
        }
        if (text[i] == quote) {
          closed = true;
          ++i;
          break;
        }
        item += text[i++];
      }
      if (!closed) return std::nullopt;
      skip_space();
    } else {
      const std::size_t stop = text.find_first_of(",]", i);
      if (stop == std::string_view::npos) return std::nullopt;
      item = TrimCopy(text.substr(i, stop - i));
      i = stop;
    }
    items.push_back(std::move(item));
    if (i >= text.size()) return std::nullopt;
    if (text[i] == ']') return items;
    if (text[i] != ',') return std::nullopt;
    ++i;
  }
  return std::nullopt;
}

ModelResponse ParseModelOutput(std::string_view raw,
                               std::string_view segmented_body) {
  ModelResponse response;
  response.raw = std::string(raw);
  const std::string lowered = utf8::AsciiLower(raw);

  enum { kRefs = 0, kExplanation = 1, kTarget = 2 };
  std::array<Section, 3> sections = {
      FindLabel(raw, lowered, "ref_expressions:"),
      FindLabel(raw, lowered, "explanation:"),
      FindLabel(raw, lowered, "target:")};
  auto section_text = [&](int which) -> std::optional<std::string_view> {
    const Section& s = sections[which];
    if (s.label_pos == std::string_view::npos) return std::nullopt;
    std::size_t end = raw.size();
    for (const auto& other : sections) {
      if (other.label_pos != std::string_view::npos &&
          other.label_pos > s.label_pos) {
        end = std::min(end, other.label_pos);
      }
    }
    return raw.substr(s.content_pos, end - s.content_pos);
  };

  std::optional<std::string_view> refs_text = section_text(kRefs);
  if (!refs_text) {
    std::size_t first_label = raw.size();
    for (const auto& s : sections) {
      if (s.label_pos != std::string_view::npos) {
        first_label = std::min(first_label, s.label_pos);
      }
    }
    refs_text = raw.substr(0, first_label);
  }
  response.ref_expressions = ParseRefList(*refs_text);
  if (auto explanation = section_text(kExplanation)) {
    response.explanation = TrimCopy(*explanation);
  }

  auto target = section_text(kTarget);
  if (!target) {
    response.status = ParseStatus::kNoTarget;
    response.detail = "no target section";
    return response;
  }
  response.target = FirstParagraph(*target);
  try {
    ParseResult parsed = ParseTagged(*response.target, segmented_body);
    response.spans = std::move(parsed.spans);
    response.parse_report = parsed.report;
  } catch (const Error& e) {
    response.status = ParseStatus::kAlignmentFailed;
    response.detail = e.what();
    return response;
  }
  const bool complete = response.ref_expressions.has_value() &&
                        response.explanation.has_value() &&
                        !response.explanation->empty();
  response.status = complete ? ParseStatus::kOk : ParseStatus::kIncomplete;
  return response;
}

}  // namespace groupref
