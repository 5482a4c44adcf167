#ifndef GROUPREF_CONFIG_H_
#define GROUPREF_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "groupref/analysis.h"
#include "groupref/chat_client.h"
#include "groupref/corpus.h"
#include "groupref/prompt.h"

namespace groupref {

struct RunPaths {
  std::filesystem::path comments;  // JSON-lines comment dump
  std::filesystem::path threads;   // thread_id -> {team, game_id}
  std::filesystem::path plays;     // play CSV
  std::optional<std::filesystem::path> games;  // game_id -> teams
  std::filesystem::path lexicon;
  std::filesystem::path few_shot;
  std::optional<std::filesystem::path> gold;  // TaggedComment JSON-lines
  std::filesystem::path out;
};

// One JSON document driving every stage. Relative paths resolve against
// the directory holding the config file.
//
//   {"paths": {"comments", "threads", "plays", "games"?, "lexicon",
//              "few_shot", "gold"?, "out"},
//    "endpoint": {"base_url", "model", "api_key_env", "max_tokens",
//                 "timeout_ms", "retry": {...}, "seed"?, "mock": bool},
//    "condition": "numeric+ts" | {"wp_mode", "temperature_scaling",
//                                 "low_wp_phrasing"},
//    "tagging": {"parallelism", "lexicon_ensure"},
//    "analysis": {"window_width", "normalization": "all" | "referencing"
//                 | "both", "variables": [..]},
//    "bootstrap": {"iterations", "seed"},
//    "segmenter": {"abbreviations": [..]}}
struct RunConfig {
  RunPaths paths;
  EndpointConfig endpoint;
  bool mock_endpoint = false;
  PromptCondition condition;
  int parallelism = 4;
  bool lexicon_ensure = true;  // merge lexicon tags into model output
  int window_width = 5;
  std::vector<Normalization> normalizations = {Normalization::kAllComments};
  std::vector<ReferenceVariable> variables = DefaultVariables();
  std::size_t bootstrap_iterations = 1000;
  std::uint64_t seed = 0;
  SegmenterOptions segmenter;

  // Throws Error("bad-config") on a violated invariant or a missing input.
  void Validate() const;
  static RunConfig FromJson(const nlohmann::json& doc,
                            const std::filesystem::path& base_dir);
  static RunConfig Load(const std::filesystem::path& path);
};

}  // namespace groupref

#endif  // GROUPREF_CONFIG_H_
