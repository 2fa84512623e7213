#pragma once

// File formats for scan data:
//   * CountRecord lists as CSV with header `position_um,component_h,counts`.
//   * FidelityReport as JSON: {b, R, b_err, R_err, fidelity, fidelity_err},
//     each of b/R/b_err/R_err a 3-array indexed by h-1; undefined R is null.
//   * Scan configuration as flat `key = value` text, '#' starts a comment.

#include <iosfwd>
#include <string>
#include <vector>

#include "pqcm/experiment.hpp"

namespace pqcm::io {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_records_csv(std::ostream& os, std::span<const experiment::CountRecord> records);
std::vector<experiment::CountRecord> read_records_csv(std::istream& is);

std::string report_to_json(const experiment::FidelityReport& report, int indent = 2);
experiment::FidelityReport report_from_json(const std::string& text);

struct ScanRunConfig {
  experiment::ScanConfig scan;
  int bootstrapResamples = 200;
  bool sharedSigma = false;
};

/// Keys: scan (Z|X), points (comma list) or range (start:stop:count),
/// sigma_um, baselines, ratios, efficiencies (comma lists of three, h=1..3),
/// shots, seed, bootstrap, shared_sigma. `ratios` defaults to the ideal
/// values for the scan variable.
ScanRunConfig parse_scan_config(std::istream& is);
ScanRunConfig load_scan_config(const std::string& path);

}  // namespace pqcm::io
