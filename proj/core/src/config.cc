#include "groupref/config.h"

#include "groupref/error.h"
#include "text_io.h"

namespace groupref {

using nlohmann::json;

namespace {

std::filesystem::path Resolve(const std::filesystem::path& base,
                              const std::string& value) {
  const std::filesystem::path p(value);
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

void RequireFile(const std::filesystem::path& path, const char* what) {
  if (!std::filesystem::exists(path)) {
    throw Error("bad-config", std::string(what) + " not found: " +
                                  path.string());
  }
}

PromptCondition ConditionFromJson(const json& j) {
  if (j.is_string()) return PromptCondition::Parse(j.get<std::string>());
  PromptCondition c;
  const std::string mode = j.value("wp_mode", std::string("numeric"));
  c = PromptCondition::Parse(mode);
  c.temperature_scaling = j.value("temperature_scaling", false);
  const std::string phrasing =
      j.value("low_wp_phrasing", std::string("out-group-wins"));
  if (phrasing == "out-group-wins") {
    c.phrasing = LowWpPhrasing::kOutGroupWins;
  } else if (phrasing == "in-group-loses") {
    c.phrasing = LowWpPhrasing::kInGroupLoses;
  } else {
    throw Error("bad-config", "unknown low_wp_phrasing '" + phrasing + "'");
  }
  return c;
}

}  // namespace

void RunConfig::Validate() const {
  RequireFile(paths.comments, "comments");
  RequireFile(paths.threads, "thread map");
  RequireFile(paths.plays, "plays");
  if (paths.games) RequireFile(*paths.games, "games");
  RequireFile(paths.lexicon, "lexicon");
  RequireFile(paths.few_shot, "few-shot file");
  if (paths.gold) RequireFile(*paths.gold, "gold");
  if (paths.out.empty()) throw Error("bad-config", "paths.out is required");
  if (window_width < 1 || window_width > 100 || 100 % window_width != 0) {
    throw Error("bad-config", "analysis.window_width must divide 100");
  }
  if (parallelism < 1) {
    throw Error("bad-config", "tagging.parallelism must be >= 1");
  }
  if (bootstrap_iterations < 1) {
    throw Error("bad-config", "bootstrap.iterations must be >= 1");
  }
  if (normalizations.empty()) {
    throw Error("bad-config", "analysis.normalization selects nothing");
  }
}

RunConfig RunConfig::FromJson(const json& doc,
                              const std::filesystem::path& base_dir) {
  RunConfig c;
  try {
    const json& p = doc.at("paths");
    c.paths.comments = Resolve(base_dir, p.at("comments").get<std::string>());
    c.paths.threads = Resolve(base_dir, p.at("threads").get<std::string>());
    c.paths.plays = Resolve(base_dir, p.at("plays").get<std::string>());
    if (p.contains("games")) {
      c.paths.games = Resolve(base_dir, p.at("games").get<std::string>());
    }
    c.paths.lexicon = Resolve(base_dir, p.at("lexicon").get<std::string>());
    c.paths.few_shot = Resolve(base_dir, p.at("few_shot").get<std::string>());
    if (p.contains("gold")) {
      c.paths.gold = Resolve(base_dir, p.at("gold").get<std::string>());
    }
    c.paths.out = Resolve(base_dir, p.value("out", std::string("out")));

    if (auto it = doc.find("endpoint"); it != doc.end()) {
      c.endpoint = EndpointConfig::FromJson(*it);
      c.mock_endpoint = it->value("mock", false);
    }
    if (auto it = doc.find("condition"); it != doc.end()) {
      c.condition = ConditionFromJson(*it);
    }
    if (auto it = doc.find("tagging"); it != doc.end()) {
      c.parallelism = it->value("parallelism", c.parallelism);
      c.lexicon_ensure = it->value("lexicon_ensure", c.lexicon_ensure);
    }
    if (auto it = doc.find("analysis"); it != doc.end()) {
      c.window_width = it->value("window_width", c.window_width);
      const std::string norm = it->value("normalization", std::string("all"));
      if (norm == "both") {
        c.normalizations = {Normalization::kAllComments,
                            Normalization::kReferencingComments};
      } else {
        c.normalizations = {ParseNormalization(norm)};
      }
      if (auto v = it->find("variables"); v != it->end()) {
        c.variables.clear();
        for (const auto& name : *v) {
          c.variables.push_back(
              ReferenceVariable::Parse(name.get<std::string>()));
        }
      }
    }
    if (auto it = doc.find("bootstrap"); it != doc.end()) {
      c.bootstrap_iterations =
          it->value("iterations", c.bootstrap_iterations);
      c.seed = it->value("seed", c.seed);
    }
    if (auto it = doc.find("segmenter"); it != doc.end()) {
      if (auto a = it->find("abbreviations"); a != it->end()) {
        c.segmenter.abbreviations = a->get<std::vector<std::string>>();
      }
    }
  } catch (const json::exception& e) {
    throw Error("bad-config", e.what());
  }
  c.Validate();
  return c;
}

RunConfig RunConfig::Load(const std::filesystem::path& path) {
  const json doc = internal::LoadJsonFile(path);
  return FromJson(doc, std::filesystem::absolute(path).parent_path());
}

}  // namespace groupref
