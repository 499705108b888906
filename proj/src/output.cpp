#include "segmarket/output.hpp"

#include <cstdio>

#include "segmarket/errors.hpp"

namespace segmarket {

namespace {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void emit(const json& v, std::string& out) {
  switch (v.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {  // keys iterate sorted
        if (!first) out += ',';
        first = false;
        out += json(it.key()).dump();
        out += ':';
        emit(it.value(), out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        emit(v[i], out);
      }
      out += ']';
      break;
    }
    case json::value_t::number_float:
      out += format_double(v.get<double>());
      break;
    default:
      out += v.dump();
  }
}

}  // namespace

std::string canonical_json(const json& doc) {
  std::string out;
  emit(doc, out);
  out += '\n';
  return out;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ += ',';
    out_ += header[i];
  }
  out_ += '\n';
}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) {
    throw validation_error("bad_argument", "CSV row width mismatch");
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ += ',';
    out_ += cells[i];
  }
  out_ += '\n';
}

std::string CsvWriter::str() const { return out_; }

std::string CsvWriter::num(double v) { return format_double(v); }

}  // namespace segmarket
