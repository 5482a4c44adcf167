#ifndef GROUPREF_ERROR_H_
#define GROUPREF_ERROR_H_

#include <stdexcept>
#include <string>

namespace groupref {

// Exception type used throughout the library. `code()` is a stable,
// machine-readable reason ("alignment-failed", "team-mismatch", ...) that
// callers and the CLI report verbatim; what() carries the human message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace groupref

#endif  // GROUPREF_ERROR_H_
