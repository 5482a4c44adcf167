#ifndef GROUPREF_SRC_TEXT_IO_H_
#define GROUPREF_SRC_TEXT_IO_H_

// Small serialization helpers shared by the .cc files; not installed.

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace groupref::internal {

// Shortest fixed-point rendering of `value` with at least `min_fraction`
// fractional digits that parses back to the same double.
std::string FormatDecimal(double value, int min_fraction);

// Fixed-precision rendering ("%.Nf") used for report tables.
std::string FormatFixed(double value, int fraction);

// Builds one JSON object line with fields in insertion order.
class JsonLine {
 public:
  JsonLine& Field(std::string_view key, const nlohmann::json& value);
  // `raw` must already be valid JSON.
  JsonLine& RawField(std::string_view key, std::string_view raw);
  std::string Finish() const { return body_ + "}"; }

 private:
  std::string body_ = "{";
  bool first_ = true;
};

std::vector<std::string> ParseCsvLine(std::string_view line);
std::string CsvEscape(std::string_view field);

std::ifstream OpenForRead(const std::filesystem::path& path);
std::ofstream OpenForWrite(const std::filesystem::path& path);
nlohmann::json LoadJsonFile(const std::filesystem::path& path);

}  // namespace groupref::internal

#endif  // GROUPREF_SRC_TEXT_IO_H_
