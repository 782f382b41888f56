#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lsr {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input. Carries the sentence id (may be empty), the 1-based line
// number (0 when unknown) and a short rule name.
class ParseError : public Error {
 public:
  ParseError(std::string sentence_id, std::size_t line, std::string rule,
             const std::string& detail);

  const std::string& sentence_id() const { return sentence_id_; }
  std::size_t line() const { return line_; }
  const std::string& rule() const { return rule_; }

 private:
  std::string sentence_id_;
  std::size_t line_;
  std::string rule_;
};

// Invalid tag sequence. position is the 0-based index of the first offending
// tag (equal to the sequence length when the sequence ends illegally).
class DecodeError : public Error {
 public:
  DecodeError(std::size_t position, const std::string& detail);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// A broken internal invariant (a bug, not bad input).
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace lsr
