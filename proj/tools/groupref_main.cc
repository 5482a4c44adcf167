// groupref: command-line driver for the grounding, tagging, scoring and
// analysis pipeline.

#include <cctype>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "groupref/analysis.h"
#include "groupref/annotation_service.h"
#include "groupref/config.h"
#include "groupref/corpus.h"
#include "groupref/interchange.h"
#include "groupref/lexicon.h"
#include "groupref/pipeline.h"
#include "groupref/report.h"
#include "groupref/scoring.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalFlags {
  std::string config;
  std::string out;
  bool force = false;
  std::optional<std::uint64_t> seed;
  bool mock_endpoint = false;
};

groupref::RunConfig LoadConfig(const GlobalFlags& flags) {
  if (flags.config.empty()) {
    throw groupref::Error("bad-config", "--config is required");
  }
  groupref::RunConfig config = groupref::RunConfig::Load(flags.config);
  if (!flags.out.empty()) config.paths.out = flags.out;
  if (flags.seed) {
    config.seed = *flags.seed;
    config.endpoint.seed = static_cast<std::int64_t>(*flags.seed);
  }
  if (flags.mock_endpoint) config.mock_endpoint = true;
  return config;
}

// Output directory: --out, else the config's, else the working directory.
fs::path OutDir(const GlobalFlags& flags) {
  if (!flags.out.empty()) return flags.out;
  if (!flags.config.empty()) return LoadConfig(flags).paths.out;
  return fs::current_path();
}

int RunStages(const GlobalFlags& flags,
              const std::vector<groupref::Stage>& stages) {
  const groupref::RunConfig config = LoadConfig(flags);
  groupref::PipelineOptions options;
  options.force = flags.force;
  options.log = [](std::string_view line) { std::cerr << line << '\n'; };
  groupref::RunPipeline(config, stages, options);
  return 0;
}

void WriteText(const fs::path& path, const std::string& body) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << body;
  if (!out) throw groupref::Error("io", "failed writing " + path.string());
}

std::vector<groupref::GroundedComment> ReadGrounded(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw groupref::Error("missing-artifact",
                          path.string() + " not found; run align first");
  }
  return groupref::ReadGroundedJsonl(in);
}

// Annotator ids become file names; keep them to a safe alphabet.
std::string SafeFileName(const std::string& id) {
  std::string out;
  for (unsigned char c : id) {
    out += std::isalnum(c) || c == '-' || c == '_' ? static_cast<char>(c) : '_';
  }
  return out.empty() ? "_" : out;
}

volatile std::sig_atomic_t g_stop = 0;
void HandleSignal(int) { g_stop = 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Win-probability grounded intergroup reference toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalFlags flags;
  app.add_option("--config", flags.config, "Run configuration (JSON)");
  app.add_option("--out", flags.out, "Output directory override");
  app.add_flag("--force", flags.force, "Re-run stages even if up to date");
  app.add_option("--seed", flags.seed, "Seed for bootstrap and endpoint");
  app.add_flag("--mock-endpoint", flags.mock_endpoint,
               "Tag with the offline lexicon mock instead of HTTP");

  std::vector<std::string> run_stages;
  auto* run = app.add_subcommand("run", "Run pipeline stages in order");
  run->add_option("--stages", run_stages,
                  "Subset of ingest,align,tag,score,analyze")
      ->delimiter(',');

  std::vector<CLI::App*> stage_commands;
  for (groupref::Stage s : groupref::kAllStages) {
    const std::string name(groupref::StageName(s));
    stage_commands.push_back(
        app.add_subcommand(name, "Run the " + name + " stage"));
  }

  std::vector<std::string> raters;
  std::string agree_gold;
  auto* agree = app.add_subcommand(
      "agree", "Fleiss kappa over annotators (and accuracy against gold)");
  agree->add_option("raters", raters, "Tagged JSON-lines files, one per rater")
      ->required()
      ->check(CLI::ExistingFile);
  agree->add_option("--gold", agree_gold, "Gold file for pairwise accuracy")
      ->check(CLI::ExistingFile);

  std::string system_a, system_b, boot_gold;
  std::size_t iterations = 1000;
  auto* bootstrap =
      app.add_subcommand("bootstrap", "Paired bootstrap between two systems");
  bootstrap->add_option("--system-a", system_a)->required()->check(
      CLI::ExistingFile);
  bootstrap->add_option("--system-b", system_b)->required()->check(
      CLI::ExistingFile);
  bootstrap->add_option("--gold", boot_gold)->required()->check(
      CLI::ExistingFile);
  bootstrap->add_option("--iterations", iterations)->capture_default_str();

  std::string density_input;
  int density_width = 5;
  auto* density = app.add_subcommand("density", "Comment density over WP");
  density->add_option("--grounded", density_input,
                      "Grounded corpus (default: <out>/grounded.jsonl)");
  density->add_option("--width", density_width)->capture_default_str();

  std::string export_grounded, export_output, export_context = "numeric";
  std::string export_lexicon;
  auto* export_tasks =
      app.add_subcommand("export-tasks", "Write annotation tasks");
  export_tasks->add_option("--grounded", export_grounded);
  export_tasks->add_option("--lexicon", export_lexicon);
  export_tasks->add_option("--context", export_context,
                           "numeric, linguistic or none")
      ->capture_default_str();
  export_tasks->add_option("--output", export_output,
                           "Default: <out>/tasks.jsonl");

  std::string serve_tasks, serve_log, serve_host = "127.0.0.1";
  int serve_port = 8080;
  auto* serve =
      app.add_subcommand("serve-annotation", "Serve annotation tasks");
  serve->add_option("--tasks", serve_tasks)->required()->check(
      CLI::ExistingFile);
  serve->add_option("--annotations", serve_log,
                    "Annotations log (default: <out>/annotations.jsonl)");
  serve->add_option("--host", serve_host)->capture_default_str();
  serve->add_option("--port", serve_port)->capture_default_str();

  std::string import_tasks, import_log;
  auto* import = app.add_subcommand(
      "import-annotations", "Split an annotations log into tagged corpora");
  import->add_option("--tasks", import_tasks)->required()->check(
      CLI::ExistingFile);
  import->add_option("--annotations", import_log)->required()->check(
      CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      std::vector<groupref::Stage> stages;
      for (const auto& s : run_stages) stages.push_back(groupref::ParseStage(s));
      if (stages.empty()) {
        stages.assign(std::begin(groupref::kAllStages),
                      std::end(groupref::kAllStages));
      }
      return RunStages(flags, stages);
    }
    for (std::size_t i = 0; i < stage_commands.size(); ++i) {
      if (stage_commands[i]->parsed()) {
        return RunStages(flags, {groupref::kAllStages[i]});
      }
    }

    if (agree->parsed()) {
      std::vector<groupref::TaggedCorpus> corpora;
      for (const auto& r : raters) {
        corpora.push_back(groupref::LoadTaggedCorpus(r));
      }
      const auto table = groupref::BuildAgreementTable(corpora);
      const auto kappa = groupref::FleissKappa(table);
      json out = {{"raters", table.raters},
                  {"items", table.counts.size()},
                  {"fleiss_kappa", kappa ? json(*kappa) : json(nullptr)}};
      if (!agree_gold.empty()) {
        const auto gold = groupref::LoadTaggedCorpus(agree_gold);
        json acc = json::array();
        for (std::size_t i = 0; i < corpora.size(); ++i) {
          acc.push_back({{"rater", raters[i]},
                         {"accuracy",
                          groupref::PairwiseAccuracy(corpora[i], gold)}});
        }
        out["accuracy"] = acc;
      }
      std::cout << out.dump(2) << '\n';
      return 0;
    }

    if (bootstrap->parsed()) {
      const std::uint64_t seed = flags.seed.value_or(0);
      const auto result = groupref::BootstrapCompare(
          groupref::LoadTaggedCorpus(system_a),
          groupref::LoadTaggedCorpus(system_b),
          groupref::LoadTaggedCorpus(boot_gold), iterations, seed);
      std::cout << json{{"p_value", result.p_value},
                        {"observed_delta", result.observed_delta},
                        {"mean_delta", result.mean_delta},
                        {"iterations", result.iterations},
                        {"seed", seed}}
                       .dump(2)
                << '\n';
      return 0;
    }

    if (density->parsed()) {
      const fs::path out_dir = OutDir(flags);
      const fs::path input = density_input.empty()
                                 ? out_dir / groupref::artifacts::kGrounded
                                 : fs::path(density_input);
      std::vector<double> wps;
      for (const auto& g : ReadGrounded(input)) wps.push_back(g.wp);
      const auto bins = groupref::CommentDensity(wps, density_width);
      WriteText(out_dir / "density.csv", groupref::DensityCsv(bins));
      WriteText(out_dir / "density.json", groupref::DensityJson(bins));
      std::cout << groupref::DensityCsv(bins);
      return 0;
    }

    if (export_tasks->parsed()) {
      const fs::path out_dir = OutDir(flags);
      const fs::path input = export_grounded.empty()
                                 ? out_dir / groupref::artifacts::kGrounded
                                 : fs::path(export_grounded);
      fs::path lexicon_path = export_lexicon;
      if (lexicon_path.empty()) lexicon_path = LoadConfig(flags).paths.lexicon;
      const auto lexicon = groupref::Lexicon::Load(lexicon_path);
      const auto tasks =
          groupref::MakeTasks(ReadGrounded(input), lexicon,
                              groupref::ParseTaskContext(export_context));
      const fs::path output = export_output.empty()
                                  ? out_dir / "tasks.jsonl"
                                  : fs::path(export_output);
      groupref::SaveTasks(output, tasks);
      std::cerr << "wrote " << tasks.size() << " tasks to " << output.string()
                << '\n';
      return 0;
    }

    if (serve->parsed()) {
      const fs::path log = serve_log.empty()
                               ? OutDir(flags) / "annotations.jsonl"
                               : fs::path(serve_log);
      groupref::AnnotationStore store(groupref::LoadTasks(serve_tasks), log);
      groupref::AnnotationServer server(store);
      const int port = server.Start(serve_host, serve_port);
      std::cerr << "serving " << store.tasks().size() << " tasks on http://"
                << serve_host << ':' << port << " (log: " << log.string()
                << ")\n";
      std::signal(SIGINT, HandleSignal);
      std::signal(SIGTERM, HandleSignal);
      while (!g_stop) {
        std::this_thread::sleep_for(std::chrono::milliseconds(200));
      }
      server.Stop();
      return 0;
    }

    if (import->parsed()) {
      const auto tasks = groupref::LoadTasks(import_tasks);
      const auto records = groupref::ImportAnnotations(import_log);
      const fs::path dir = OutDir(flags) / "annotations";
      for (const auto& [annotator, corpus] :
           groupref::AnnotationsByAnnotator(records, tasks)) {
        groupref::SaveTaggedCorpus(dir / (SafeFileName(annotator) + ".jsonl"), corpus);
        std::cerr << annotator << ": " << corpus.size() << " comments\n";
      }
      return 0;
    }
  } catch (const groupref::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
