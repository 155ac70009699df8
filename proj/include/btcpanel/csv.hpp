#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "btcpanel/errors.hpp"

namespace btcpanel {

// Line-oriented CSV reader for the engine's fixed schemas. No quoting: none
// of the schemas carries free text with embedded commas. The whole stream is
// buffered first so parsing cannot depend on read chunk size.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in);
  explicit CsvReader(std::string buffer);

  // Reads the header line and checks it against the expected header verbatim.
  void expect_header(std::string_view expected);

  // Advances to the next data row; false at end of input. Blank trailing
  // lines are skipped.
  bool next_row();

  std::size_t line_number() const { return line_; }
  const std::vector<std::string_view>& fields() const { return fields_; }
  std::string_view raw_line() const { return current_; }

 private:
  std::string buffer_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
  std::string_view current_;
  std::vector<std::string_view> fields_;

  bool read_line();
};

std::optional<double> parse_decimal(std::string_view s);
std::optional<std::int64_t> parse_integer(std::string_view s);

// Shortest round-trippable decimal representation.
std::string format_decimal(double v);

struct Rejection {
  std::size_t line = 0;
  std::string reason;
  std::string raw;
};

template <typename T>
struct ParseResult {
  std::vector<T> rows;
  std::vector<Rejection> rejections;

  std::size_t input_rows() const { return rows.size() + rejections.size(); }
};

}  // namespace btcpanel
