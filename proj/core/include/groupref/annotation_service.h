#ifndef GROUPREF_ANNOTATION_SERVICE_H_
#define GROUPREF_ANNOTATION_SERVICE_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "groupref/corpus.h"
#include "groupref/interchange.h"
#include "groupref/lexicon.h"
#include "groupref/prompt.h"

namespace groupref {

// A comment served for human annotation.
struct AnnotationTask {
  std::string comment_id;
  std::string text;  // segmented body; offsets address this exact string
  std::string team;
  std::string opponent;
  std::optional<std::string> parent;
  std::string context;  // live score or WP description

  bool operator==(const AnnotationTask&) const = default;
};

nlohmann::json TaskToJson(const AnnotationTask& task);
// Throws Error("bad-task").
AnnotationTask TaskFromJson(const nlohmann::json& j);
void SaveTasks(const std::filesystem::path& path,
               std::span<const AnnotationTask> tasks);
std::vector<AnnotationTask> LoadTasks(const std::filesystem::path& path);

// Which context line a task carries.
enum class TaskContext { kNumericWp, kLinguisticWp, kNone };
// "numeric", "linguistic", "none"; throws Error("bad-context").
TaskContext ParseTaskContext(std::string_view name);

std::vector<AnnotationTask> MakeTasks(
    std::span<const GroundedComment> grounded, const Lexicon& lexicon,
    TaskContext context);

// One annotator's judgment of one task.
struct AnnotationRecord {
  std::string comment_id;
  std::string annotator;
  std::vector<Span> spans;  // confidence 1..5; absent means 5

  bool operator==(const AnnotationRecord&) const = default;
};

nlohmann::json RecordToJson(const AnnotationRecord& record);
// Throws Error("bad-record") on a malformed shape.
AnnotationRecord RecordFromJson(const nlohmann::json& j);

// Returns a validation message, or nullopt when the record addresses
// `task` correctly (sorted, non-overlapping, in-bounds spans; implicit
// spans on sentinels; confidence 1..5).
std::optional<std::string> ValidateRecord(const AnnotationRecord& record,
                                          const AnnotationTask& task);

struct Progress {
  std::size_t tasks = 0;
  std::size_t annotated = 0;  // tasks with at least one record
  std::size_t records = 0;
  std::map<std::string, std::size_t> per_annotator;
};
nlohmann::json ProgressToJson(const Progress& progress);

// Task registry plus an append-only annotations log. Submissions are
// serialized; each accepted record is one flushed JSON line.
class AnnotationStore {
 public:
  AnnotationStore(std::vector<AnnotationTask> tasks,
                  std::filesystem::path log_path);

  const std::vector<AnnotationTask>& tasks() const { return tasks_; }
  const AnnotationTask* FindTask(std::string_view comment_id) const;

  // Validates and appends; returns the rejection message on failure.
  // Missing confidences are stored as 5.
  std::optional<std::string> Submit(AnnotationRecord record);
  Progress GetProgress() const;

 private:
  std::vector<AnnotationTask> tasks_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::filesystem::path log_path_;
  mutable std::mutex mu_;
  std::map<std::string, std::size_t> per_task_;
  std::map<std::string, std::size_t> per_annotator_;
  std::size_t records_ = 0;
};

// Reads an annotations log. Throws Error("bad-json") on a corrupt line.
std::vector<AnnotationRecord> ImportAnnotations(
    const std::filesystem::path& log_path);

// One TaggedCorpus per annotator (sorted by annotator id); for repeated
// submissions the latest record wins. Texts come from `tasks`.
std::map<std::string, TaggedCorpus> AnnotationsByAnnotator(
    std::span<const AnnotationRecord> records,
    std::span<const AnnotationTask> tasks);

// HTTP front end: GET /tasks, POST /annotations, GET /progress.
class AnnotationServer {
 public:
  explicit AnnotationServer(AnnotationStore& store);
  ~AnnotationServer();
  AnnotationServer(const AnnotationServer&) = delete;
  AnnotationServer& operator=(const AnnotationServer&) = delete;

  // Binds (port 0 picks a free port) and serves on a background thread.
  // Returns the bound port; throws Error("bind-failed").
  int Start(const std::string& host, int port);
  // Blocks until Stop() is called from elsewhere.
  void Wait();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace groupref

#endif  // GROUPREF_ANNOTATION_SERVICE_H_
