#include "text_io.h"

#include <cstdio>
#include <cstdlib>

#include "groupref/error.h"

namespace groupref::internal {

std::string FormatDecimal(double value, int min_fraction) {
  // Fixed notation needs more than 17 digits for small magnitudes.
  char buf[400];
  for (int digits = min_fraction; digits <= 340; ++digits) {
    std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

std::string FormatFixed(double value, int fraction) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", fraction, value);
  std::string out = buf;
  if (out == "-0" || out.rfind("-0.", 0) == 0) {
    // Avoid "-0.0" for values that round to zero.
    bool all_zero = true;
    for (char c : out.substr(1)) {
      if (c != '0' && c != '.') all_zero = false;
    }
    if (all_zero) out.erase(0, 1);
  }
  return out;
}

JsonLine& JsonLine::Field(std::string_view key, const nlohmann::json& value) {
  return RawField(key, value.dump());
}

JsonLine& JsonLine::RawField(std::string_view key, std::string_view raw) {
  if (!first_) body_ += ',';
  first_ = false;
  body_ += nlohmann::json(std::string(key)).dump();
  body_ += ':';
  body_ += raw;
  return *this;
}

std::vector<std::string> ParseCsvLine(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else if (c != '\r') {
      current += c;
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

std::string CsvEscape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::ifstream OpenForRead(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream OpenForWrite(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io", "cannot open " + path.string() + " for writing");
  return out;
}

nlohmann::json LoadJsonFile(const std::filesystem::path& path) {
  auto in = OpenForRead(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("bad-json", path.string() + ": " + e.what());
  }
}

}  // namespace groupref::internal
