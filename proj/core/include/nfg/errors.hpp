#ifndef NFG_ERRORS_HPP
#define NFG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nfg {

// Failure categories, mapped to distinct process exit codes by the CLI.
enum class ErrorCode {
  kInvalidArgument,  // caller broke a documented precondition
  kIo,               // missing/unreadable file
  kParse,            // malformed graph or sample file
  kValidation,       // structurally invalid graph (e.g. no anchor prior)
  kDecompose,        // graph cannot be split into a spanning acyclic set
  kConvergence,      // solver failed or hit an iteration cap
  kOverflow,         // request exceeds a hard resource guard
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message)
      : Error(ErrorCode::kParse, "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace nfg

#endif  // NFG_ERRORS_HPP
