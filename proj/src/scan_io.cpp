#include "pqcm/scan_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace pqcm::io {

using experiment::CountRecord;
using experiment::FidelityReport;
using experiment::PerComponent;
using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw FormatError(what + ": not a number: '" + s + "'");
  return v;
}

long long to_int(const std::string& s, const std::string& what) {
  long long v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw FormatError(what + ": not an integer: '" + s + "'");
  return v;
}

PerComponent triple(const std::string& s, const std::string& key) {
  const auto parts = split(s, ',');
  if (parts.size() != 3) throw FormatError(key + ": expected three comma-separated values");
  return {to_double(parts[0], key), to_double(parts[1], key), to_double(parts[2], key)};
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json optional_array(const std::array<std::optional<double>, 3>& a) {
  json j = json::array();
  for (const auto& v : a) j.push_back(v ? json(*v) : json(nullptr));
  return j;
}

std::array<std::optional<double>, 3> optional_array_from(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 3) throw FormatError(std::string(key) + ": expected 3-array");
  std::array<std::optional<double>, 3> out;
  for (std::size_t k = 0; k < 3; ++k)
    if (!j[k].is_null()) out[k] = j[k].get<double>();
  return out;
}

PerComponent array_from(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 3) throw FormatError(std::string(key) + ": expected 3-array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

void write_records_csv(std::ostream& os, std::span<const CountRecord> records) {
  os << "position_um,component_h,counts\n";
  for (const auto& r : records) {
    os << format_double(r.position) << ',' << static_cast<int>(r.component) << ',' << r.counts
       << '\n';
  }
}

std::vector<CountRecord> read_records_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || trim(line) != "position_um,component_h,counts") {
    throw FormatError("records CSV: missing header 'position_um,component_h,counts'");
  }
  std::vector<CountRecord> out;
  int lineNo = 1;
  while (std::getline(is, line)) {
    ++lineNo;
    if (trim(line).empty()) continue;
    const auto cols = split(line, ',');
    const std::string where = "records CSV line " + std::to_string(lineNo);
    if (cols.size() != 3) throw FormatError(where + ": expected 3 columns");
    CountRecord r;
    r.position = to_double(cols[0], where);
    r.component = experiment::component_from_int(static_cast<int>(to_int(cols[1], where)));
    r.counts = to_int(cols[2], where);
    if (r.counts < 0) throw FormatError(where + ": negative count");
    out.push_back(r);
  }
  return out;
}

std::string report_to_json(const FidelityReport& report, int indent) {
  json j;
  j["b"] = report.b;
  j["R"] = optional_array(report.R);
  j["b_err"] = report.bErr;
  j["R_err"] = optional_array(report.RErr);
  j["fidelity"] = report.fidelity;
  j["fidelity_err"] = report.fidelityError;
  return j.dump(indent);
}

FidelityReport report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("report JSON: ") + e.what());
  }
  FidelityReport r;
  try {
    r.b = array_from(j.at("b"), "b");
    r.R = optional_array_from(j.at("R"), "R");
    r.bErr = array_from(j.at("b_err"), "b_err");
    r.RErr = optional_array_from(j.at("R_err"), "R_err");
    r.fidelity = j.at("fidelity").get<double>();
    r.fidelityError = j.at("fidelity_err").get<double>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("report JSON: ") + e.what());
  }
  return r;
}

ScanRunConfig parse_scan_config(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineNo = 0;
  while (std::getline(is, line)) {
    ++lineNo;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw FormatError("config line " + std::to_string(lineNo) + ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    if (!kv.emplace(key, trim(t.substr(eq + 1))).second) {
      throw FormatError("config: duplicate key '" + key + "'");
    }
  }

  if (kv.count("points") && kv.count("range")) {
    throw FormatError("config: give either points or range, not both");
  }

  ScanRunConfig cfg;
  auto& s = cfg.scan;
  bool ratiosGiven = false;
  for (const auto& [key, value] : kv) {
    if (key == "scan") {
      if (value == "Z" || value == "z") {
        s.scanVariable = experiment::ScanVariable::Z;
      } else if (value == "X" || value == "x") {
        s.scanVariable = experiment::ScanVariable::X;
      } else {
        throw FormatError("config: scan must be Z or X");
      }
    } else if (key == "points") {
      s.points.clear();
      for (const auto& p : split(value, ',')) s.points.push_back(to_double(p, key));
    } else if (key == "range") {
      const auto parts = split(value, ':');
      if (parts.size() != 3) throw FormatError("config: range must be start:stop:count");
      const double a = to_double(parts[0], key), b = to_double(parts[1], key);
      const long long n = to_int(parts[2], key);
      if (n < 2) throw FormatError("config: range needs at least 2 points");
      s.points.clear();
      for (long long i = 0; i < n; ++i) s.points.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    } else if (key == "sigma_um") {
      s.coherenceSigma = to_double(value, key);
    } else if (key == "baselines") {
      s.baselines = triple(value, key);
    } else if (key == "ratios") {
      s.trueRatios = triple(value, key);
      ratiosGiven = true;
    } else if (key == "efficiencies") {
      s.efficiencies = triple(value, key);
    } else if (key == "shots") {
      s.shotsPerPoint = static_cast<int>(to_int(value, key));
    } else if (key == "seed") {
      s.rngSeed = static_cast<std::uint64_t>(to_int(value, key));
    } else if (key == "bootstrap") {
      cfg.bootstrapResamples = static_cast<int>(to_int(value, key));
    } else if (key == "shared_sigma") {
      if (value != "true" && value != "false") throw FormatError("config: shared_sigma must be true/false");
      cfg.sharedSigma = value == "true";
    } else {
      throw FormatError("config: unknown key '" + key + "'");
    }
  }
  if (!ratiosGiven) s.trueRatios = experiment::ideal_ratios(s.scanVariable).ratio;
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  return cfg;
}

ScanRunConfig load_scan_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config file '" + path + "'");
  return parse_scan_config(in);
}

}  // namespace pqcm::io
