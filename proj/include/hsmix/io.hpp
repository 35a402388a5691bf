#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hsmix/estimate.hpp"
#include "hsmix/oracle.hpp"
#include "hsmix/series.hpp"

namespace hsmix {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "1.0.0";

Json to_json(const CoefficientEstimate& e);
Json to_json(const FreeEnergyReport& r);
Json to_json(const ConvergenceReport& r);
Json to_json(const SandwichReport& r);
Json to_json(const TreeGraphReport& r);
Json to_json(const DensityCurvePoint& p);

std::string bound_name(BoundKind kind);

// RFC 4180 quoting: fields holding a comma, quote or line break are quoted
// and embedded quotes doubled.
std::string csv_field(const std::string& s);
std::string csv_number(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add(std::vector<std::string> row);
  // Leading comment lines carry the resolved configuration.
  void write(std::ostream& out, const std::string& preamble = {}) const;
  Json to_json() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace hsmix
