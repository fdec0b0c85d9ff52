#include "qsurr/errors.hpp"

namespace qsurr {

namespace {

std::string format_location(const std::string& message, std::size_t row,
                            std::size_t column) {
  if (row == 0) return message;
  std::string out = message + " (row " + std::to_string(row);
  if (column > 0) out += ", column " + std::to_string(column);
  out += ")";
  return out;
}

}  // namespace

parse_error::parse_error(const std::string& message, std::size_t row,
                         std::size_t column)
    : std::runtime_error(format_location(message, row, column)),
      row_(row),
      column_(column) {}

}  // namespace qsurr
