#ifndef DEPKIT_ERROR_HPP
#define DEPKIT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace depkit {

// Base error for everything the toolkit throws on bad input or bad state.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file (CoNLL-U, config, checkpoint, ...). Carries the line
// number when one is known; line 0 means "not line-addressable".
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, long line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

// Structurally well-formed input that violates a domain invariant.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& msg, const std::string& sent_id = "")
      : Error(sent_id.empty() ? msg : "sentence '" + sent_id + "': " + msg),
        sent_id_(sent_id) {}
  const std::string& sent_id() const { return sent_id_; }

 private:
  std::string sent_id_;
};

}  // namespace depkit

#endif
