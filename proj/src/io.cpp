#include "hsmix/io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "hsmix/error.hpp"

namespace hsmix {

Json to_json(const CoefficientEstimate& e) {
  Json j;
  j["value"] = e.value;
  j["std_error"] = e.std_error;
  j["samples"] = e.samples;
  Json t = Json::object();
  for (const auto& [k, v] : e.truncation) t[k] = v;
  j["truncation"] = t;
  return j;
}

std::string bound_name(BoundKind kind) { return kind == BoundKind::upper ? "upper" : "lower"; }

Json to_json(const FreeEnergyReport& r) {
  Json j;
  j["bound_kind"] = bound_name(r.bound_kind);
  j["value"] = r.value;
  j["std_error"] = r.std_error;
  j["tolerance"] = r.tolerance;
  j["ideal"] = r.ideal;
  j["free_volume"] = to_json(r.free_volume);
  j["F0"] = to_json(r.F0);
  j["A_term"] = to_json(r.A_term);
  j["F1"] = to_json(r.F1);
  j["F2"] = to_json(r.F2);
  Json t = Json::object();
  for (const auto& [k, v] : r.truncation) t[k] = v;
  j["truncation"] = t;
  return j;
}

Json to_json(const ConvergenceReport& r) {
  return Json{{"holds", r.holds()}, {"c1", r.c1},       {"c1_margin", r.c1_margin},     {"c2", r.c2},
              {"c2_margin", r.c2_margin}, {"cond1", r.cond1}, {"cond1_margin", r.cond1_margin}};
}

Json to_json(const SandwichReport& r) {
  return Json{{"skipped", r.skipped}, {"reason", r.reason}, {"lower", r.lower},        {"exact", r.exact},
              {"upper", r.upper},     {"tolerance", r.tolerance}, {"holds", r.holds}};
}

Json to_json(const TreeGraphReport& r) {
  return Json{{"n", r.n},
              {"trials", r.trials},
              {"violations", r.violations},
              {"max_ratio", r.max_ratio},
              {"exhaustive_violations", r.exhaustive_violations},
              {"max_ratio_exhaustive", r.max_ratio_exhaustive}};
}

Json to_json(const DensityCurvePoint& p) {
  return Json{{"R", p.R},
              {"shell_density", p.shell_density},
              {"effective_density", p.effective_density},
              {"a", p.a},
              {"log_small_branch", p.log_small_branch},
              {"log_big_branch", p.log_big_branch},
              {"log_bound", p.log_bound},
              {"bound", p.bound}};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvTable::add(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw invalid_argument("CSV row width does not match the header");
  rows_.push_back(std::move(row));
}

void CsvTable::write(std::ostream& out, const std::string& preamble) const {
  std::istringstream pre(preamble);
  for (std::string line; std::getline(pre, line);) out << "# " << line << "\r\n";
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
    out << "\r\n";
  };
  emit(header_);
  for (const auto& r : rows_) emit(r);
}

Json CsvTable::to_json() const {
  Json rows = Json::array();
  for (const auto& r : rows_) {
    Json o;
    for (std::size_t i = 0; i < header_.size(); ++i) o[header_[i]] = r[i];
    rows.push_back(o);
  }
  return rows;
}

}  // namespace hsmix
