#pragma once

#include <concepts>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hedgeff/types.hpp"

namespace hedgeff {

/// Raised when a non-finite number would be written to a results file.
class NonFiniteOutput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal form ("%.17g"); throws NonFiniteOutput on NaN/Inf.
std::string format_real(real value, std::string_view column);

/// Minimal CSV emitter with a fixed header. Numbers are written so that the
/// same values always produce the same bytes.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header);

  template <class... Fields>
  void row(const Fields&... fields) {
    if (sizeof...(Fields) != header_.size()) {
      throw std::logic_error("CsvWriter: field count does not match header");
    }
    std::size_t col = 0;
    (put(fields, col++), ...);
    out_ << '\n';
  }

 private:
  void separator(std::size_t col) {
    if (col > 0) out_ << ',';
  }
  void put(real v, std::size_t col) {
    separator(col);
    out_ << format_real(v, header_[col]);
  }
  template <std::integral I>
  void put(I v, std::size_t col) {
    separator(col);
    out_ << std::to_string(v);
  }
  void put(std::string_view v, std::size_t col) {
    separator(col);
    out_ << v;
  }
  void put(const std::string& v, std::size_t col) { put(std::string_view(v), col); }
  void put(const char* v, std::size_t col) { put(std::string_view(v), col); }
  void put(const std::optional<real>& v, std::size_t col) {
    if (v) {
      put(*v, col);
    } else {
      separator(col);
    }
  }

  std::ostream& out_;
  std::vector<std::string> header_;
};

}  // namespace hedgeff
