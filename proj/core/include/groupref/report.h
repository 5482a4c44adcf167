#ifndef GROUPREF_REPORT_H_
#define GROUPREF_REPORT_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "groupref/analysis.h"

namespace groupref {

// One fit per series variable; nullopt where the fit was impossible.
struct TrendTable {
  std::vector<std::optional<TrendFit>> fits;
  std::vector<std::string> notes;  // why a fit is missing
};

// Fits every variable of `series`, recording failures instead of throwing.
TrendTable FitAll(const WindowSeries& series);

// CSV renderings; rows ordered by variable, then window. Numbers use the
// shortest round-trip decimal form; empty fields mark undefined values.
//   windows.csv: variable,window_lower,midpoint,count,denominator,frequency,
//                fit,ci_low,ci_high
//   trends.csv:  feature,slope_x1e4,r2,slope,intercept,n,slope_se,
//                slope_ci_low_x1e4,slope_ci_high_x1e4
//   density.csv: window_lower,midpoint,count
// An empty corpus yields header-only files.
std::string WindowsCsv(const WindowSeries& series, const TrendTable& trends);
std::string TrendsCsv(const WindowSeries& series, const TrendTable& trends);
std::string DensityCsv(const std::vector<DensityBin>& density);

// JSON mirrors: arrays of objects keyed like the CSV headers.
std::string WindowsJson(const WindowSeries& series, const TrendTable& trends);
std::string TrendsJson(const WindowSeries& series, const TrendTable& trends);
std::string DensityJson(const std::vector<DensityBin>& density);

// Writes windows/trends/density as .csv and .json into `dir`. Throws
// Error("io") when the destination is not writable.
void ExportReport(const std::filesystem::path& dir, const WindowSeries& series,
                  const TrendTable& trends,
                  const std::vector<DensityBin>& density);

}  // namespace groupref

#endif  // GROUPREF_REPORT_H_
