#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace segmarket {

/// Serializes with sorted keys and every floating-point number printed at 17
/// significant digits, so identical results produce byte-identical files.
std::string canonical_json(const nlohmann::json& doc);

/// Minimal CSV assembly; fields are written verbatim (all values here are
/// numbers or plain identifiers, never quoted text).
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(const std::vector<std::string>& cells);
  std::string str() const;

  static std::string num(double v);

 private:
  std::size_t width_;
  std::string out_;
};

}  // namespace segmarket
