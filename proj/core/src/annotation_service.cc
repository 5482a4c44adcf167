#include "groupref/annotation_service.h"

#include <fstream>

#include <httplib.h>

#include "groupref/error.h"
#include "groupref/utf8.h"
#include "text_io.h"

namespace groupref {

using nlohmann::json;

json TaskToJson(const AnnotationTask& task) {
  return {{"comment_id", task.comment_id},
          {"text", task.text},
          {"team", task.team},
          {"opponent", task.opponent},
          {"parent", task.parent ? json(*task.parent) : json(nullptr)},
          {"context", task.context}};
}

AnnotationTask TaskFromJson(const json& j) {
  try {
    AnnotationTask t;
    t.comment_id = j.at("comment_id").get<std::string>();
    t.text = j.at("text").get<std::string>();
    t.team = j.value("team", std::string());
    t.opponent = j.value("opponent", std::string());
    if (auto it = j.find("parent"); it != j.end() && !it->is_null()) {
      t.parent = it->get<std::string>();
    }
    t.context = j.value("context", std::string());
    return t;
  } catch (const json::exception& e) {
    throw Error("bad-task", e.what());
  }
}

void SaveTasks(const std::filesystem::path& path,
               std::span<const AnnotationTask> tasks) {
  auto out = internal::OpenForWrite(path);
  for (const auto& t : tasks) out << TaskToJson(t).dump() << '\n';
}

std::vector<AnnotationTask> LoadTasks(const std::filesystem::path& path) {
  auto in = internal::OpenForRead(path);
  std::vector<AnnotationTask> tasks;
  std::string line;
  while (std::getline(in, line)) {
    if (utf8::Trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error("bad-json", e.what());
    }
    tasks.push_back(TaskFromJson(j));
  }
  return tasks;
}

TaskContext ParseTaskContext(std::string_view name) {
  if (name == "numeric") return TaskContext::kNumericWp;
  if (name == "linguistic") return TaskContext::kLinguisticWp;
  if (name == "none") return TaskContext::kNone;
  throw Error("bad-context", "unknown task context '" + std::string(name) +
                                 "'");
}

std::vector<AnnotationTask> MakeTasks(
    std::span<const GroundedComment> grounded, const Lexicon& lexicon,
    TaskContext context) {
  std::vector<AnnotationTask> tasks;
  for (const auto& g : grounded) {
    const QueryContext q = MakeQuery(g, lexicon);
    AnnotationTask t{q.comment_id, q.comment, q.in_group, q.out_group,
                     q.parent, ""};
    if (context != TaskContext::kNone) {
      PromptCondition c;
      c.wp_mode = context == TaskContext::kNumericWp ? WpMode::kNumeric
                                                     : WpMode::kLinguistic;
      t.context =
          WinProbabilityLine(q.wp, q.in_group, q.out_group, c).value_or("");
    }
    tasks.push_back(std::move(t));
  }
  return tasks;
}

json RecordToJson(const AnnotationRecord& record) {
  json spans = json::array();
  for (const auto& s : record.spans) spans.push_back(SpanToJson(s));
  return {{"comment_id", record.comment_id},
          {"annotator", record.annotator},
          {"spans", spans}};
}

AnnotationRecord RecordFromJson(const json& j) {
  try {
    AnnotationRecord r;
    r.comment_id = j.at("comment_id").get<std::string>();
    r.annotator = j.at("annotator").get<std::string>();
    for (const auto& s : j.at("spans")) {
      if (s.at("start").is_number_integer() &&
          s.at("start").get<long long>() < 0) {
        throw Error("bad-record", "negative offset");
      }
      r.spans.push_back(SpanFromJson(s));
    }
    return r;
  } catch (const json::exception& e) {
    throw Error("bad-record", e.what());
  }
}

std::optional<std::string> ValidateRecord(const AnnotationRecord& record,
                                          const AnnotationTask& task) {
  if (record.comment_id != task.comment_id) return "comment_id mismatch";
  if (utf8::Trim(record.annotator).empty()) return "annotator is required";
  const std::u32string text = utf8::Decode(task.text);
  return CheckSpans(text, record.spans);
}

json ProgressToJson(const Progress& progress) {
  return {{"tasks", progress.tasks},
          {"annotated", progress.annotated},
          {"records", progress.records},
          {"per_annotator", progress.per_annotator}};
}

AnnotationStore::AnnotationStore(std::vector<AnnotationTask> tasks,
                                 std::filesystem::path log_path)
    : tasks_(std::move(tasks)), log_path_(std::move(log_path)) {
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    if (!index_.emplace(tasks_[i].comment_id, i).second) {
      throw Error("bad-task", "duplicate task " + tasks_[i].comment_id);
    }
  }
  // Resume counts from an existing log.
  if (std::filesystem::exists(log_path_)) {
    for (const auto& r : ImportAnnotations(log_path_)) {
      ++per_task_[r.comment_id];
      ++per_annotator_[r.annotator];
      ++records_;
    }
  }
}

const AnnotationTask* AnnotationStore::FindTask(
    std::string_view comment_id) const {
  auto it = index_.find(comment_id);
  return it == index_.end() ? nullptr : &tasks_[it->second];
}

std::optional<std::string> AnnotationStore::Submit(AnnotationRecord record) {
  const AnnotationTask* task = FindTask(record.comment_id);
  if (!task) return "unknown comment_id '" + record.comment_id + "'";
  if (auto problem = ValidateRecord(record, *task)) return problem;
  for (auto& s : record.spans) {
    if (!s.confidence) s.confidence = 5;
  }
  const std::string line = RecordToJson(record).dump() + "\n";
  std::lock_guard<std::mutex> lock(mu_);
  {
    if (log_path_.has_parent_path()) {
      std::filesystem::create_directories(log_path_.parent_path());
    }
    std::ofstream out(log_path_, std::ios::app | std::ios::binary);
    out << line;
    out.flush();
    if (!out) return "failed to persist the record";
  }
  ++per_task_[record.comment_id];
  ++per_annotator_[record.annotator];
  ++records_;
  return std::nullopt;
}

Progress AnnotationStore::GetProgress() const {
  std::lock_guard<std::mutex> lock(mu_);
  Progress p;
  p.tasks = tasks_.size();
  for (const auto& [id, n] : per_task_) {
    if (n > 0 && index_.count(id)) ++p.annotated;
  }
  p.records = records_;
  p.per_annotator = per_annotator_;
  return p;
}

std::vector<AnnotationRecord> ImportAnnotations(
    const std::filesystem::path& log_path) {
  auto in = internal::OpenForRead(log_path);
  std::vector<AnnotationRecord> records;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (utf8::Trim(line).empty()) continue;
    try {
      records.push_back(RecordFromJson(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error("bad-json", log_path.string() + ":" +
                                  std::to_string(number) + ": " + e.what());
    }
  }
  return records;
}

std::map<std::string, TaggedCorpus> AnnotationsByAnnotator(
    std::span<const AnnotationRecord> records,
    std::span<const AnnotationTask> tasks) {
  std::map<std::string, std::string_view> texts;
  for (const auto& t : tasks) texts.emplace(t.comment_id, t.text);
  // annotator -> comment id -> latest record
  std::map<std::string, std::map<std::string, const AnnotationRecord*>> latest;
  for (const auto& r : records) latest[r.annotator][r.comment_id] = &r;
  std::map<std::string, TaggedCorpus> out;
  for (const auto& [annotator, by_comment] : latest) {
    TaggedCorpus& corpus = out[annotator];
    for (const auto& t : tasks) {
      auto it = by_comment.find(t.comment_id);
      if (it == by_comment.end()) continue;
      corpus.push_back(
          TaggedComment{t.comment_id, t.text, it->second->spans});
    }
  }
  return out;
}

// ------------------------------------------------------------------ http

struct AnnotationServer::Impl {
  explicit Impl(AnnotationStore& s) : store(s) {}
  AnnotationStore& store;
  httplib::Server server;
  std::thread thread;
};

namespace {

void SendJson(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

}  // namespace

AnnotationServer::AnnotationServer(AnnotationStore& store)
    : impl_(std::make_unique<Impl>(store)) {
  auto& server = impl_->server;
  AnnotationStore* s = &store;
  server.Get("/tasks", [s](const httplib::Request&, httplib::Response& res) {
    json tasks = json::array();
    for (const auto& t : s->tasks()) tasks.push_back(TaskToJson(t));
    SendJson(res, 200, tasks);
  });
  server.Get("/progress",
             [s](const httplib::Request&, httplib::Response& res) {
               SendJson(res, 200, ProgressToJson(s->GetProgress()));
             });
  server.Post("/annotations",
              [s](const httplib::Request& req, httplib::Response& res) {
                AnnotationRecord record;
                try {
                  record = RecordFromJson(json::parse(req.body));
                } catch (const std::exception& e) {
                  SendJson(res, 400, {{"error", "bad-record"},
                                      {"message", e.what()}});
                  return;
                }
                if (auto problem = s->Submit(std::move(record))) {
                  SendJson(res, 422, {{"error", "validation"},
                                      {"message", *problem}});
                  return;
                }
                SendJson(res, 201, {{"status", "ok"}});
              });
}

AnnotationServer::~AnnotationServer() { Stop(); }

int AnnotationServer::Start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) {
    throw Error("bind-failed", "cannot bind " + host + ":" +
                                   std::to_string(port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void AnnotationServer::Wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}

void AnnotationServer::Stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace groupref
