#include "groupref/scoring.h"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include "groupref/error.h"
#include "text_io.h"

namespace groupref {
namespace {

std::size_t Distance(std::size_t a, std::size_t b) {
  return a > b ? a - b : b - a;
}

// Credits are multiples of 1/4; assignment works on integer quarters.
int Quarters(double credit) { return static_cast<int>(credit * 4.0 + 0.5); }

// Maximum-weight assignment on a dense rows x cols matrix of non-negative
// weights (Hungarian method on the padded square cost matrix).
int MaxAssignmentWeight(const std::vector<std::vector<int>>& weight) {
  const std::size_t rows = weight.size();
  if (rows == 0) return 0;
  const std::size_t cols = weight[0].size();
  if (cols == 0) return 0;
  const std::size_t n = std::max(rows, cols);
  constexpr int kMax = 4;
  auto cost = [&](std::size_t i, std::size_t j) -> long long {
    const int w = (i < rows && j < cols) ? weight[i][j] : 0;
    return kMax - w;
  };
  constexpr long long kInf = std::numeric_limits<long long>::max() / 4;
  std::vector<long long> u(n + 1, 0), v(n + 1, 0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<long long> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      long long delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const long long cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  int total = 0;
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t i = p[j] - 1;
    if (i < rows && j - 1 < cols) total += weight[i][j - 1];
  }
  return total;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::size_t Find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void Join(std::size_t a, std::size_t b) { parent[Find(a)] = Find(b); }
};

}  // namespace

double PairCredit(const Span& gold, const Span& predicted) {
  if (gold.label != predicted.label) return 0.0;
  const std::size_t d = std::max(Distance(gold.start, predicted.start),
                                 Distance(gold.end, predicted.end));
  if (d == 0) return 1.0;
  if (d <= kHalfCreditDistance) return 0.5;
  if (d <= kQuarterCreditDistance) return 0.25;
  return 0.0;
}

double CreditAssignment::total() const {
  double sum = 0.0;
  for (const auto& pair : pairs) sum += pair.credit;
  return sum;
}

CreditAssignment MatchSpans(std::span<const Span> gold,
                            std::span<const Span> predicted) {
  const std::size_t ng = gold.size();
  const std::size_t np = predicted.size();
  std::vector<std::vector<int>> w(ng, std::vector<int>(np, 0));
  UnionFind components(ng + np);
  for (std::size_t g = 0; g < ng; ++g) {
    for (std::size_t p = 0; p < np; ++p) {
      w[g][p] = Quarters(PairCredit(gold[g], predicted[p]));
      if (w[g][p] > 0) components.Join(g, ng + p);
    }
  }

  auto by_start = [](std::span<const Span> spans) {
    return [spans](std::size_t a, std::size_t b) {
      if (spans[a].start != spans[b].start) {
        return spans[a].start < spans[b].start;
      }
      return a < b;
    };
  };

  std::unordered_map<std::size_t, std::vector<std::size_t>> comp_gold;
  std::unordered_map<std::size_t, std::vector<std::size_t>> comp_pred;
  for (std::size_t g = 0; g < ng; ++g) {
    comp_gold[components.Find(g)].push_back(g);
  }
  for (std::size_t p = 0; p < np; ++p) {
    comp_pred[components.Find(ng + p)].push_back(p);
  }

  CreditAssignment result;
  std::vector<bool> pred_used(np, false);
  for (auto& [root, golds] : comp_gold) {
    auto& preds = comp_pred[root];
    if (preds.empty()) continue;
    std::sort(golds.begin(), golds.end(), by_start(gold));
    std::sort(preds.begin(), preds.end(), by_start(predicted));

    std::vector<bool> avail(preds.size(), true);
    auto optimum = [&](std::size_t from) {
      std::vector<std::size_t> cols;
      for (std::size_t k = 0; k < preds.size(); ++k) {
        if (avail[k]) cols.push_back(preds[k]);
      }
      std::vector<std::vector<int>> sub;
      for (std::size_t r = from; r < golds.size(); ++r) {
        std::vector<int> row;
        for (std::size_t c : cols) row.push_back(w[golds[r]][c]);
        sub.push_back(std::move(row));
      }
      return MaxAssignmentWeight(sub);
    };

    for (std::size_t r = 0; r < golds.size(); ++r) {
      const int target = optimum(r);
      if (target == 0) break;
      const std::size_t g = golds[r];
      for (std::size_t k = 0; k < preds.size(); ++k) {
        const int gain = w[g][preds[k]];
        if (!avail[k] || gain == 0) continue;
        avail[k] = false;
        if (gain + optimum(r + 1) == target) {
          result.pairs.push_back({g, preds[k], gain / 4.0});
          pred_used[preds[k]] = true;
          break;
        }
        avail[k] = true;
      }
    }
  }

  std::vector<bool> gold_used(ng, false);
  for (const auto& pair : result.pairs) gold_used[pair.gold] = true;
  std::sort(result.pairs.begin(), result.pairs.end(),
            [](const CreditPair& a, const CreditPair& b) {
              return a.gold < b.gold;
            });
  for (std::size_t g = 0; g < ng; ++g) {
    if (!gold_used[g]) result.unmatched_gold.push_back(g);
  }
  for (std::size_t p = 0; p < np; ++p) {
    if (!pred_used[p]) result.unmatched_predicted.push_back(p);
  }
  return result;
}

// ------------------------------------------------------------------ F1

LabelScore ScoreLabel(double credit, std::size_t predicted, std::size_t gold) {
  LabelScore s;
  s.credit = credit;
  s.predicted = predicted;
  s.gold_support = gold;
  if (predicted == 0) {
    s.precision = gold == 0 ? 1.0 : 0.0;
  } else {
    s.precision = credit / static_cast<double>(predicted);
  }
  if (gold == 0) {
    s.recall = predicted == 0 ? 1.0 : 0.0;
  } else {
    s.recall = credit / static_cast<double>(gold);
  }
  const double denom = s.precision + s.recall;
  s.f1 = denom > 0.0 ? 2.0 * s.precision * s.recall / denom : 0.0;
  return s;
}

namespace {

struct CommentTally {
  std::array<double, 3> credit{};
  std::array<std::size_t, 3> predicted{};
  std::array<std::size_t, 3> gold{};

  CommentTally& operator+=(const CommentTally& o) {
    for (std::size_t l = 0; l < 3; ++l) {
      credit[l] += o.credit[l];
      predicted[l] += o.predicted[l];
      gold[l] += o.gold[l];
    }
    return *this;
  }
};

CommentTally Tally(std::span<const Span> gold,
                   std::span<const Span> predicted) {
  CommentTally t;
  for (const auto& s : gold) ++t.gold[LabelIndex(s.label)];
  for (const auto& s : predicted) ++t.predicted[LabelIndex(s.label)];
  for (const auto& pair : MatchSpans(gold, predicted).pairs) {
    t.credit[LabelIndex(gold[pair.gold].label)] += pair.credit;
  }
  return t;
}

ScoreReport ReportFromTally(const CommentTally& t) {
  ScoreReport report;
  double weighted = 0.0;
  std::size_t support = 0;
  std::size_t predicted = 0;
  for (std::size_t l = 0; l < 3; ++l) {
    report.per_label[l] = ScoreLabel(t.credit[l], t.predicted[l], t.gold[l]);
    weighted += static_cast<double>(t.gold[l]) * report.per_label[l].f1;
    support += t.gold[l];
    predicted += t.predicted[l];
  }
  if (support > 0) {
    report.weighted_macro_f1 = weighted / static_cast<double>(support);
  } else {
    report.weighted_macro_f1 = predicted == 0 ? 1.0 : 0.0;
  }
  return report;
}

std::unordered_map<std::string, const TaggedComment*> IndexById(
    std::span<const TaggedComment> corpus) {
  std::unordered_map<std::string, const TaggedComment*> index;
  for (const auto& c : corpus) index.emplace(c.comment_id, &c);
  return index;
}

// Per-gold-comment tallies, in gold order.
std::vector<CommentTally> TallyCorpus(std::span<const TaggedComment> gold,
                                      std::span<const TaggedComment> predicted,
                                      std::size_t* missing) {
  const auto index = IndexById(predicted);
  std::vector<CommentTally> tallies;
  tallies.reserve(gold.size());
  for (const auto& g : gold) {
    auto it = index.find(g.comment_id);
    if (it == index.end()) {
      if (missing) ++*missing;
      tallies.push_back(Tally(g.spans, {}));
    } else {
      tallies.push_back(Tally(g.spans, it->second->spans));
    }
  }
  return tallies;
}

}  // namespace

ScoreReport F1Report(std::span<const TaggedComment> gold,
                     std::span<const TaggedComment> predicted) {
  std::size_t missing = 0;
  CommentTally total;
  for (const auto& t : TallyCorpus(gold, predicted, &missing)) total += t;
  ScoreReport report = ReportFromTally(total);
  report.comments = gold.size();
  report.parse_failures = missing;
  return report;
}

nlohmann::json ScoreReportToJson(const ScoreReport& report) {
  nlohmann::json labels = nlohmann::json::object();
  for (TagLabel label : kAllLabels) {
    const auto& s = report[label];
    labels[std::string(LabelName(label))] = {
        {"precision", s.precision}, {"recall", s.recall},
        {"f1", s.f1},               {"credit", s.credit},
        {"support", s.gold_support}, {"predicted", s.predicted}};
  }
  return {{"labels", labels},
          {"weighted_macro_f1", report.weighted_macro_f1},
          {"comments", report.comments},
          {"parse_failures", report.parse_failures}};
}

std::string RenderScoreTable(
    std::span<const std::pair<std::string, ScoreReport>> columns) {
  std::vector<std::string> row_names = {"[IN]", "[OUT]", "[OTHER]", "Overall"};
  std::size_t first_width = 7;
  std::vector<std::size_t> widths;
  for (const auto& [name, report] : columns) {
    widths.push_back(std::max<std::size_t>(name.size(), 5));
  }
  std::ostringstream out;
  auto pad_left = [](const std::string& s, std::size_t width) {
    return std::string(width > s.size() ? width - s.size() : 0, ' ') + s;
  };
  auto pad_right = [](const std::string& s, std::size_t width) {
    return s + std::string(width > s.size() ? width - s.size() : 0, ' ');
  };
  out << pad_right("", first_width);
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out << "  " << pad_left(columns[c].first, widths[c]);
  }
  out << '\n';
  for (std::size_t r = 0; r < row_names.size(); ++r) {
    out << pad_right(row_names[r], first_width);
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const ScoreReport& report = columns[c].second;
      const double f1 = r < 3 ? report.per_label[r].f1
                              : report.weighted_macro_f1;
      out << "  " << pad_left(internal::FormatFixed(100.0 * f1, 1), widths[c]);
    }
    out << '\n';
  }
  return out.str();
}

// ------------------------------------------------------------- agreement

AgreementUnit DominantUnit(std::span<const Span> spans) {
  if (spans.empty()) return AgreementUnit::kNone;
  std::array<std::size_t, 3> counts{};
  for (const auto& s : spans) ++counts[LabelIndex(s.label)];
  const auto best = std::max_element(counts.begin(), counts.end());
  return static_cast<AgreementUnit>(best - counts.begin());
}

AgreementTable BuildAgreementTable(std::span<const TaggedCorpus> raters) {
  AgreementTable table;
  table.raters = static_cast<int>(raters.size());
  if (raters.empty()) return table;
  std::vector<std::unordered_map<std::string, const TaggedComment*>> indexes;
  for (const auto& corpus : raters) indexes.push_back(IndexById(corpus));
  for (const auto& item : raters.front()) {
    std::vector<int> row(4, 0);
    bool everywhere = true;
    for (const auto& index : indexes) {
      auto it = index.find(item.comment_id);
      if (it == index.end()) {
        everywhere = false;
        break;
      }
      ++row[static_cast<std::size_t>(DominantUnit(it->second->spans))];
    }
    if (!everywhere) continue;
    table.counts.push_back(std::move(row));
    table.item_ids.push_back(item.comment_id);
  }
  return table;
}

std::optional<double> FleissKappa(const AgreementTable& table) {
  if (table.raters < 2) throw Error("bad-table", "need at least two raters");
  if (table.counts.empty()) throw Error("bad-table", "need at least one item");
  const std::size_t categories = table.counts.front().size();
  const double n = table.raters;
  const double items = static_cast<double>(table.counts.size());
  std::vector<double> column(categories, 0.0);
  double agreement_sum = 0.0;
  for (std::size_t i = 0; i < table.counts.size(); ++i) {
    const auto& row = table.counts[i];
    if (row.size() != categories) {
      throw Error("bad-table", "row " + std::to_string(i) + " has " +
                                   std::to_string(row.size()) + " columns");
    }
    long long sum = 0;
    long long squares = 0;
    for (std::size_t j = 0; j < categories; ++j) {
      if (row[j] < 0) throw Error("bad-table", "negative count");
      sum += row[j];
      squares += static_cast<long long>(row[j]) * row[j];
      column[j] += row[j];
    }
    if (sum != table.raters) {
      throw Error("bad-table", "row " + std::to_string(i) + " sums to " +
                                   std::to_string(sum) + ", expected " +
                                   std::to_string(table.raters));
    }
    agreement_sum += (static_cast<double>(squares) - n) / (n * (n - 1.0));
  }
  const double p_bar = agreement_sum / items;
  double p_e = 0.0;
  for (double c : column) {
    const double p = c / (items * n);
    p_e += p * p;
  }
  if (p_e >= 1.0) return std::nullopt;
  if (p_bar == 1.0) return 1.0;
  return (p_bar - p_e) / (1.0 - p_e);
}

double PairwiseAccuracy(std::span<const TaggedComment> annotator,
                        std::span<const TaggedComment> gold) {
  if (gold.empty()) return 1.0;
  const auto index = IndexById(annotator);
  double sum = 0.0;
  for (const auto& g : gold) {
    std::span<const Span> other;
    if (auto it = index.find(g.comment_id); it != index.end()) {
      other = it->second->spans;
    }
    const std::size_t denom = std::max(g.spans.size(), other.size());
    if (denom == 0) {
      sum += 1.0;
      continue;
    }
    sum += MatchSpans(g.spans, other).total() / static_cast<double>(denom);
  }
  return sum / static_cast<double>(gold.size());
}

// -------------------------------------------------------------- bootstrap

namespace {

// Unbiased draw from [0, n) with a fixed, library-independent mapping.
std::size_t Draw(std::mt19937_64& rng, std::size_t n) {
  const std::uint64_t range = n;
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return static_cast<std::size_t>(x % range);
}

}  // namespace

BootstrapResult BootstrapCompare(std::span<const TaggedComment> system_a,
                                 std::span<const TaggedComment> system_b,
                                 std::span<const TaggedComment> gold,
                                 std::size_t iterations, std::uint64_t seed) {
  if (iterations == 0) {
    throw Error("bad-iterations", "bootstrap needs at least one iteration");
  }
  const auto tally_a = TallyCorpus(gold, system_a, nullptr);
  const auto tally_b = TallyCorpus(gold, system_b, nullptr);

  auto macro = [](const std::vector<CommentTally>& tallies,
                  std::span<const std::size_t> sample) {
    CommentTally total;
    for (std::size_t i : sample) total += tallies[i];
    return ReportFromTally(total).weighted_macro_f1;
  };

  std::vector<std::size_t> all(gold.size());
  std::iota(all.begin(), all.end(), 0);
  BootstrapResult result;
  result.iterations = iterations;
  result.observed_delta = macro(tally_a, all) - macro(tally_b, all);
  const int winner = result.observed_delta > 0.0   ? 1
                     : result.observed_delta < 0.0 ? -1
                                                   : 0;

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> sample(gold.size());
  std::size_t losses = 0;
  double delta_sum = 0.0;
  for (std::size_t it = 0; it < iterations; ++it) {
    for (auto& s : sample) s = Draw(rng, gold.size());
    const double delta = gold.empty()
                             ? 0.0
                             : macro(tally_a, sample) - macro(tally_b, sample);
    delta_sum += delta;
    if (winner == 0 || delta * winner <= 0.0) ++losses;
  }
  result.mean_delta = delta_sum / static_cast<double>(iterations);
  result.p_value =
      static_cast<double>(losses) / static_cast<double>(iterations);
  return result;
}

}  // namespace groupref
