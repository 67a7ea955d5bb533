#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace rclt {

using Json = nlohmann::ordered_json;

/// Toolkit version string embedded in every report.
const char* version();

/// 17 significant digits; "inf", "-inf" and "nan" for non-finite values.
std::string format_number(double x);

/// RFC 4180 field quoting (only when the field needs it).
std::string csv_field(std::string_view field);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  CsvTable& row(std::vector<std::string> fields);
  std::size_t rows() const { return rows_.size(); }
  void write(std::ostream& out) const;
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Provenance record attached to each reported value.
Json provenance(std::string_view module, std::string_view operation, Json parameters);

/// Serialises with insertion-ordered keys and 17-digit floats. Non-finite
/// floats are written as strings.
std::string dump_json(const Json& value, int indent = 2);

}  // namespace rclt
