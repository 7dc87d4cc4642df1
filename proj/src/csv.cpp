#include "hedgeff/csv.hpp"

#include <cmath>
#include <cstdio>

namespace hedgeff {

std::string format_real(real value, std::string_view column) {
  if (!std::isfinite(value)) {
    throw NonFiniteOutput("non-finite value in column '" + std::string(column) + "'");
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header)
    : out_(out), header_(header.begin(), header.end()) {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << header_[i];
  }
  out_ << '\n';
}

}  // namespace hedgeff
