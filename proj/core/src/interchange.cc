#include "groupref/interchange.h"

#include <istream>
#include <ostream>

#include "groupref/error.h"
#include "groupref/utf8.h"
#include "text_io.h"

namespace groupref {

using nlohmann::json;

json SpanToJson(const Span& span) {
  json j = {{"start", span.start},
            {"end", span.end},
            {"label", LabelName(span.label)},
            {"implicit", span.implicit}};
  if (span.confidence) j["confidence"] = *span.confidence;
  return j;
}

Span SpanFromJson(const json& j) {
  Span span;
  span.start = j.at("start").get<std::size_t>();
  span.end = j.at("end").get<std::size_t>();
  const auto label = ParseLabel(j.at("label").get<std::string>());
  if (!label) throw Error("bad-record", "unknown label " + j.at("label").dump());
  span.label = *label;
  span.implicit = j.value("implicit", false);
  if (auto it = j.find("confidence"); it != j.end() && !it->is_null()) {
    span.confidence = it->get<int>();
  }
  return span;
}

namespace {

std::string TaggedLine(const TaggedComment& tagged) {
  std::string spans = "[";
  for (std::size_t i = 0; i < tagged.spans.size(); ++i) {
    const Span& s = tagged.spans[i];
    internal::JsonLine line;
    line.Field("start", s.start)
        .Field("end", s.end)
        .Field("label", LabelName(s.label))
        .Field("implicit", s.implicit);
    if (s.confidence) line.Field("confidence", *s.confidence);
    if (i > 0) spans += ',';
    spans += line.Finish();
  }
  spans += ']';
  internal::JsonLine line;
  line.Field("comment_id", tagged.comment_id)
      .Field("text", tagged.text)
      .RawField("spans", spans);
  return line.Finish();
}

}  // namespace

json TaggedToJson(const TaggedComment& tagged) {
  return json::parse(TaggedLine(tagged));
}

TaggedComment TaggedFromJson(const json& j) {
  TaggedComment tagged;
  try {
    tagged.comment_id = j.at("comment_id").get<std::string>();
    tagged.text = j.at("text").get<std::string>();
    for (const auto& s : j.at("spans")) tagged.spans.push_back(SpanFromJson(s));
  } catch (const json::exception& e) {
    throw Error("bad-record", e.what());
  }
  if (auto problem = CheckSpans(utf8::Decode(tagged.text), tagged.spans)) {
    throw Error("bad-record", tagged.comment_id + ": " + *problem);
  }
  return tagged;
}

void WriteTaggedJsonl(std::ostream& out,
                      std::span<const TaggedComment> corpus) {
  for (const auto& tagged : corpus) out << TaggedLine(tagged) << '\n';
}

TaggedCorpus ReadTaggedJsonl(std::istream& in) {
  TaggedCorpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (utf8::Trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error("bad-record",
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
    corpus.push_back(TaggedFromJson(j));
  }
  return corpus;
}

void SaveTaggedCorpus(const std::filesystem::path& path,
                      std::span<const TaggedComment> corpus) {
  auto out = internal::OpenForWrite(path);
  WriteTaggedJsonl(out, corpus);
}

TaggedCorpus LoadTaggedCorpus(const std::filesystem::path& path) {
  auto in = internal::OpenForRead(path);
  return ReadTaggedJsonl(in);
}

}  // namespace groupref
