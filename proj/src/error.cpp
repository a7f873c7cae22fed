#include "holicheck/error.hpp"

namespace holi {

namespace {
std::string at(SourcePos pos, const std::string& message) {
  return std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + message;
}
}  // namespace

ParseError::ParseError(SourcePos pos, std::string message, std::vector<std::string> expected)
    : Error(at(pos, "parse error: " + message)), pos_(pos), expected_(std::move(expected)) {}

TypeError::TypeError(SourcePos pos, const std::string& message)
    : Error(at(pos, "type error: " + message)), pos_(pos) {}

}  // namespace holi
