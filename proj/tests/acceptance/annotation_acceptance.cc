// Annotation service acceptance: scripted sessions against the HTTP
// endpoints, then import and re-serve.

#include <httplib.h>

#include <map>
#include <random>
#include <string>
#include <vector>

#include "groupref/annotation_service.h"
#include "groupref/interchange.h"
#include "groupref/utf8.h"
#include "harness.h"
#include "support/test_support.h"

namespace groupref::acceptance {
namespace {

using nlohmann::json;
namespace t = ::groupref::testing;

std::vector<AnnotationTask> FixtureTasks() {
  std::vector<AnnotationTask> tasks;
  int i = 0;
  for (const auto& ex : t::BundledFewShot().examples) {
    tasks.push_back({"t" + std::to_string(i++), ex.comment, ex.in_group,
                     ex.out_group, ex.parent, ex.live_score});
  }
  return tasks;
}

// Whole-token spans; sentinel tokens become implicit spans.
std::vector<Span> RandomAnnotation(std::mt19937_64& rng,
                                   const std::string& text) {
  const std::u32string s = utf8::Decode(text);
  std::uniform_int_distribution<int> coin(0, 9), label(0, 2), conf(1, 5);
  std::vector<Span> spans;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == U' ') ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != U' ') ++i;
    if (start == i || coin(rng) > 2) continue;
    spans.push_back(Span{start, i, kAllLabels[label(rng)],
                         s.compare(start, i - start, kSentinel32) == 0,
                         conf(rng)});
  }
  return spans;
}

void AnnotationRoundTrip(Check& check) {
  t::TempDir dir;
  const auto tasks = FixtureTasks();
  AnnotationStore store(tasks, dir.path() / "annotations.jsonl");
  AnnotationServer server(store);
  const int port = server.Start("127.0.0.1", 0);
  httplib::Client client("127.0.0.1", port);

  const auto served = client.Get("/tasks");
  check.Expect(served && served->status == 200 &&
                   json::parse(served->body).size() == tasks.size(),
               "GET /tasks");

  std::mt19937_64 rng(20);
  std::map<std::string, std::map<std::string, std::string>> submitted;
  for (int session = 0; session < 20; ++session) {
    const std::string annotator = "ann" + std::to_string(session);
    for (const auto& task : tasks) {
      AnnotationRecord record{task.comment_id, annotator,
                              RandomAnnotation(rng, task.text)};
      const json body = RecordToJson(record);
      auto res = client.Post("/annotations", body.dump(), "application/json");
      check.Expect(res && res->status == 201, "valid submission rejected");
      submitted[annotator][task.comment_id] = body["spans"].dump();

      const std::size_t length = utf8::Length(task.text);
      record.spans.push_back(Span{length, length + 1, TagLabel::kIn, false, 5});
      res = client.Post("/annotations", RecordToJson(record).dump(),
                        "application/json");
      check.Expect(res && res->status == 422,
                   "out-of-bounds submission accepted");
    }
  }
  const auto progress = client.Get("/progress");
  check.Expect(progress && json::parse(progress->body)["records"] ==
                               20 * tasks.size(),
               "GET /progress record count");
  server.Stop();

  const auto records = ImportAnnotations(dir.path() / "annotations.jsonl");
  const auto corpora = AnnotationsByAnnotator(records, tasks);
  check.Expect(corpora.size() == 20, "expected 20 annotators");
  for (const auto& [annotator, corpus] : corpora) {
    for (const auto& tc : corpus) {
      check.Expect(TaggedToJson(tc)["spans"].dump() ==
                       submitted[annotator][tc.comment_id],
                   "re-served spans differ for " + annotator + "/" +
                       tc.comment_id);
    }
  }
}

}  // namespace
}  // namespace groupref::acceptance

int main() {
  return groupref::acceptance::RunCriteria(
      {{"SECONDARY", "annotation round-trip", 30,
        groupref::acceptance::AnnotationRoundTrip}});
}
