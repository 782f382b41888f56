#include "lsr/error.h"

namespace lsr {

namespace {

std::string parse_message(const std::string& sentence_id, std::size_t line, const std::string& rule,
                          const std::string& detail) {
  std::string where;
  if (line) where = "line " + std::to_string(line);
  if (!sentence_id.empty()) where += (where.empty() ? "" : ", ") + std::string("sentence ") + sentence_id;
  return (where.empty() ? "" : where + ": ") + rule + ": " + detail;
}

}  // namespace

ParseError::ParseError(std::string sentence_id, std::size_t line, std::string rule, const std::string& detail)
    : Error(parse_message(sentence_id, line, rule, detail)),
      sentence_id_(std::move(sentence_id)),
      line_(line),
      rule_(std::move(rule)) {}

DecodeError::DecodeError(std::size_t position, const std::string& detail)
    : Error("invalid tag sequence at position " + std::to_string(position) + ": " + detail), position_(position) {}

}  // namespace lsr
