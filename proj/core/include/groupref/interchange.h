#ifndef GROUPREF_INTERCHANGE_H_
#define GROUPREF_INTERCHANGE_H_

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "groupref/tagtext.h"

namespace groupref {

// TaggedComment exchange format shared by the tagger, the scorer and the
// annotation service, one object per line:
//   {"comment_id": .., "text": .., "spans": [{"start", "end", "label",
//    "implicit", "confidence"?}]}
using TaggedCorpus = std::vector<TaggedComment>;

nlohmann::json SpanToJson(const Span& span);
Span SpanFromJson(const nlohmann::json& j);
nlohmann::json TaggedToJson(const TaggedComment& tagged);
// Throws Error("bad-record") when spans violate the TaggedComment invariants.
TaggedComment TaggedFromJson(const nlohmann::json& j);

void WriteTaggedJsonl(std::ostream& out, std::span<const TaggedComment> corpus);
TaggedCorpus ReadTaggedJsonl(std::istream& in);
void SaveTaggedCorpus(const std::filesystem::path& path,
                      std::span<const TaggedComment> corpus);
TaggedCorpus LoadTaggedCorpus(const std::filesystem::path& path);

}  // namespace groupref

#endif  // GROUPREF_INTERCHANGE_H_
