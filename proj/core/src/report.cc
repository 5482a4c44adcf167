#include "groupref/report.h"

#include <cmath>
#include <fstream>

#include "groupref/error.h"
#include "text_io.h"

namespace groupref {

namespace {

// A cell rendered identically into CSV and JSON.
struct Cell {
  enum class Type { kEmpty, kNumber, kText };
  Type type = Type::kEmpty;
  std::string text;
};

Cell Text(std::string s) { return {Cell::Type::kText, std::move(s)}; }
Cell Count(std::size_t n) { return {Cell::Type::kNumber, std::to_string(n)}; }
Cell Number(double v) {
  if (!std::isfinite(v)) return {};
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  return {Cell::Type::kNumber, internal::FormatDecimal(v, 1)};
}
Cell Number(const std::optional<double>& v) { return v ? Number(*v) : Cell{}; }
Cell Fixed(double v, int digits) {
  if (!std::isfinite(v)) return {};
  return {Cell::Type::kNumber, internal::FormatFixed(v, digits)};
}

struct Table {
  std::vector<std::string> headers;
  std::vector<std::vector<Cell>> rows;

  std::string Csv() const {
    std::string out;
    for (std::size_t i = 0; i < headers.size(); ++i) {
      if (i) out += ',';
      out += headers[i];
    }
    out += '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        out += internal::CsvEscape(row[i].text);
      }
      out += '\n';
    }
    return out;
  }

  std::string Json() const {
    std::string out = "[";
    for (std::size_t r = 0; r < rows.size(); ++r) {
      internal::JsonLine line;
      for (std::size_t i = 0; i < headers.size(); ++i) {
        const Cell& c = rows[r][i];
        switch (c.type) {
          case Cell::Type::kEmpty:
            line.RawField(headers[i], "null");
            break;
          case Cell::Type::kNumber:
            line.RawField(headers[i], c.text);
            break;
          case Cell::Type::kText:
            line.Field(headers[i], c.text);
            break;
        }
      }
      out += r ? ",\n  " : "\n  ";
      out += line.Finish();
    }
    out += rows.empty() ? "]\n" : "\n]\n";
    return out;
  }
};

Table WindowsTable(const WindowSeries& series, const TrendTable& trends) {
  Table t{{"variable", "window_lower", "midpoint", "count", "denominator",
           "frequency", "fit", "ci_low", "ci_high"},
          {}};
  if (series.corpus_size() == 0) return t;
  for (std::size_t v = 0; v < series.variables.size(); ++v) {
    const std::optional<TrendFit>* fit =
        v < trends.fits.size() ? &trends.fits[v] : nullptr;
    for (std::size_t w = 0; w < series.windows(); ++w) {
      const WindowCell& cell = series.cells[v][w];
      std::vector<Cell> row = {Text(series.variables[v].Name()),
                               Number(series.lower[w]),
                               Number(series.midpoint[w]), Count(cell.count),
                               Count(cell.denominator),
                               Number(cell.frequency)};
      if (fit && fit->has_value()) {
        const double x = series.midpoint[w];
        const double y = (*fit)->Predict(x);
        const double half = (*fit)->BandHalfWidth(x);
        row.push_back(Number(y));
        row.push_back(Number(y - half));
        row.push_back(Number(y + half));
      } else {
        row.insert(row.end(), 3, Cell{});
      }
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

Table TrendsTableOf(const WindowSeries& series, const TrendTable& trends) {
  Table t{{"feature", "slope_x1e4", "r2", "slope", "intercept", "n",
           "slope_se", "slope_ci_low_x1e4", "slope_ci_high_x1e4"},
          {}};
  for (std::size_t v = 0; v < series.variables.size(); ++v) {
    if (v >= trends.fits.size() || !trends.fits[v]) continue;
    const TrendFit& f = *trends.fits[v];
    t.rows.push_back({Text(series.variables[v].Name()),
                      Fixed(f.slope * 1e4, 1), Fixed(f.r2, 2),
                      Number(f.slope), Number(f.intercept), Count(f.n),
                      Number(f.slope_se), Number(f.SlopeCiLow() * 1e4),
                      Number(f.SlopeCiHigh() * 1e4)});
  }
  return t;
}

Table DensityTable(const std::vector<DensityBin>& density) {
  Table t{{"window_lower", "midpoint", "count"}, {}};
  std::size_t total = 0;
  for (const auto& b : density) total += b.count;
  if (total == 0) return t;
  for (const auto& b : density) {
    t.rows.push_back({Number(b.lower), Number(b.midpoint), Count(b.count)});
  }
  return t;
}

void WriteFile(const std::filesystem::path& path, const std::string& body) {
  auto out = internal::OpenForWrite(path);
  out << body;
  out.flush();
  if (!out) throw Error("io", "failed writing " + path.string());
}

}  // namespace

TrendTable FitAll(const WindowSeries& series) {
  TrendTable table;
  for (std::size_t v = 0; v < series.variables.size(); ++v) {
    try {
      table.fits.push_back(FitTrend(series, v));
    } catch (const Error& e) {
      table.fits.push_back(std::nullopt);
      table.notes.push_back(series.variables[v].Name() + ": " + e.what());
    }
  }
  return table;
}

std::string WindowsCsv(const WindowSeries& series, const TrendTable& trends) {
  return WindowsTable(series, trends).Csv();
}
std::string TrendsCsv(const WindowSeries& series, const TrendTable& trends) {
  return TrendsTableOf(series, trends).Csv();
}
std::string DensityCsv(const std::vector<DensityBin>& density) {
  return DensityTable(density).Csv();
}
std::string WindowsJson(const WindowSeries& series, const TrendTable& trends) {
  return WindowsTable(series, trends).Json();
}
std::string TrendsJson(const WindowSeries& series, const TrendTable& trends) {
  return TrendsTableOf(series, trends).Json();
}
std::string DensityJson(const std::vector<DensityBin>& density) {
  return DensityTable(density).Json();
}

void ExportReport(const std::filesystem::path& dir, const WindowSeries& series,
                  const TrendTable& trends,
                  const std::vector<DensityBin>& density) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("io", "cannot create " + dir.string());
  WriteFile(dir / "windows.csv", WindowsCsv(series, trends));
  WriteFile(dir / "windows.json", WindowsJson(series, trends));
  WriteFile(dir / "trends.csv", TrendsCsv(series, trends));
  WriteFile(dir / "trends.json", TrendsJson(series, trends));
  WriteFile(dir / "density.csv", DensityCsv(density));
  WriteFile(dir / "density.json", DensityJson(density));
}

}  // namespace groupref
