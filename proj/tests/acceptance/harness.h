#ifndef GROUPREF_TESTS_ACCEPTANCE_HARNESS_H_
#define GROUPREF_TESTS_ACCEPTANCE_HARNESS_H_

#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace groupref::acceptance {

// Collects failure messages for one criterion.
class Check {
 public:
  void Expect(bool condition, const std::string& message) {
    ++checks_;
    if (!condition && failures_.size() < 5) failures_.push_back(message);
    if (!condition) ++failed_;
  }
  bool ok() const { return failed_ == 0; }
  std::size_t checks() const { return checks_; }
  std::string Summary() const {
    std::ostringstream out;
    out << failed_ << " of " << checks_ << " checks failed";
    for (const auto& f : failures_) out << "; " << f;
    return out.str();
  }

 private:
  std::size_t checks_ = 0;
  std::size_t failed_ = 0;
  std::vector<std::string> failures_;
};

struct Criterion {
  std::string tier;  // PRIMARY or SECONDARY
  std::string name;
  double limit_seconds;
  std::function<void(Check&)> body;
};

// Runs every criterion and prints one line each. A criterion passes when all
// its checks hold and it finishes within its runtime limit. Returns the
// process exit status.
inline int RunCriteria(const std::vector<Criterion>& criteria) {
  int failed = 0;
  for (const auto& c : criteria) {
    Check check;
    const auto begin = std::chrono::steady_clock::now();
    std::string error;
    try {
      c.body(check);
    } catch (const std::exception& e) {
      error = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - begin)
                               .count();
    const bool in_time = seconds < c.limit_seconds;
    const bool pass = error.empty() && check.ok() && in_time;
    std::string detail = std::to_string(check.checks()) + " checks";
    if (!error.empty()) {
      detail = error;
    } else if (!check.ok()) {
      detail = check.Summary();
    } else if (!in_time) {
      detail = "runtime limit exceeded";
    }
    std::printf("%s [%s] %s (%.3f s, limit %.0f s): %s\n",
                pass ? "PASS" : "FAIL", c.tier.c_str(), c.name.c_str(),
                seconds, c.limit_seconds, detail.c_str());
    std::fflush(stdout);
    failed += pass ? 0 : 1;
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}

}  // namespace groupref::acceptance

#endif  // GROUPREF_TESTS_ACCEPTANCE_HARNESS_H_
