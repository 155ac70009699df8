#include "btcpanel/csv.hpp"

#include <cmath>
#include <cstdio>
#include <iterator>

namespace btcpanel {

CsvReader::CsvReader(std::istream& in)
    : buffer_(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()) {}

CsvReader::CsvReader(std::string buffer) : buffer_(std::move(buffer)) {}

bool CsvReader::read_line() {
  if (pos_ >= buffer_.size()) return false;
  std::size_t end = buffer_.find('\n', pos_);
  std::size_t next;
  if (end == std::string::npos) {
    end = buffer_.size();
    next = end;
  } else {
    next = end + 1;
  }
  if (end > pos_ && buffer_[end - 1] == '\r') --end;
  current_ = std::string_view(buffer_).substr(pos_, end - pos_);
  pos_ = next;
  ++line_;
  return true;
}

void CsvReader::expect_header(std::string_view expected) {
  if (!read_line() || current_ != expected)
    throw SchemaError("malformed header: expected \"" + std::string(expected) +
                      "\", got \"" + std::string(current_) + "\"");
}

bool CsvReader::next_row() {
  while (read_line()) {
    if (current_.empty()) continue;
    fields_.clear();
    std::string_view rest = current_;
    for (;;) {
      std::size_t comma = rest.find(',');
      if (comma == std::string_view::npos) {
        fields_.push_back(rest);
        break;
      }
      fields_.push_back(rest.substr(0, comma));
      rest = rest.substr(comma + 1);
    }
    return true;
  }
  return false;
}

std::optional<double> parse_decimal(std::string_view s) {
  if (s.empty()) return std::nullopt;
  double v;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::int64_t> parse_integer(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::int64_t v;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string format_decimal(double v) {
  char buf[32];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back;
    auto [p, ec] = std::from_chars(buf, buf + std::char_traits<char>::length(buf), back);
    (void)p;
    if (ec == std::errc{} && back == v) break;
  }
  return buf;
}

}  // namespace btcpanel
