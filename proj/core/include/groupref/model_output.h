#ifndef GROUPREF_MODEL_OUTPUT_H_
#define GROUPREF_MODEL_OUTPUT_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "groupref/tagtext.h"

namespace groupref {

// Ordered from best to worst.
enum class ParseStatus {
  kOk,               // ref list, explanation and target all present and aligned
  kIncomplete,       // target aligned, ref list or explanation missing
  kAlignmentFailed,  // target present but does not align with the comment
  kNoTarget,         // no target section
};
std::string_view ParseStatusName(ParseStatus status);

struct ModelResponse {
  std::string raw;
  std::optional<std::vector<std::string>> ref_expressions;
  std::optional<std::string> explanation;
  std::optional<std::string> target;
  ParseStatus status = ParseStatus::kNoTarget;
  std::string detail;
  std::vector<Span> spans;  // empty unless the target aligned
  ParseReport parse_report;
};

// Splits a completion into its ref_expressions / explanation / target
// sections (labels matched case-insensitively, any order; a leading bare
// list counts as ref_expressions) and aligns the target against
// `segmented_body`.
ModelResponse ParseModelOutput(std::string_view raw,
                               std::string_view segmented_body);

// Parses ['a', "b's", 'c'] (also tolerates unquoted items). nullopt when no
// bracketed list is present.
std::optional<std::vector<std::string>> ParseRefList(std::string_view text);

}  // namespace groupref

#endif  // GROUPREF_MODEL_OUTPUT_H_
