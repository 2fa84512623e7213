#include "pqcm/scan_io.hpp"

#include <sstream>

#include <gtest/gtest.h>

using namespace pqcm;
using namespace pqcm::experiment;

TEST(scan_io, records_csv_round_trip) {
  ScanConfig cfg;
  cfg.points = {-40.0, -12.345678901234567, 0.0, 1e-9, 33.3};
  cfg.rngSeed = 3;
  const auto rec = simulate_scan(cfg);
  std::stringstream ss;
  io::write_records_csv(ss, rec);
  EXPECT_EQ(ss.str().substr(0, 30), "position_um,component_h,counts");
  EXPECT_EQ(io::read_records_csv(ss), rec);
}

TEST(scan_io, records_csv_errors) {
  std::istringstream noHeader("1,3,10\n");
  EXPECT_THROW(io::read_records_csv(noHeader), io::FormatError);
  std::istringstream badCols("position_um,component_h,counts\n1,3\n");
  EXPECT_THROW(io::read_records_csv(badCols), io::FormatError);
  std::istringstream badLabel("position_um,component_h,counts\n1,4,10\n");
  EXPECT_THROW(io::read_records_csv(badLabel), std::invalid_argument);
  std::istringstream negative("position_um,component_h,counts\n1,3,-2\n");
  EXPECT_THROW(io::read_records_csv(negative), io::FormatError);
  std::istringstream notNumber("position_um,component_h,counts\nabc,3,2\n");
  EXPECT_THROW(io::read_records_csv(notNumber), io::FormatError);
}

TEST(scan_io, report_json_round_trip) {
  FidelityReport r;
  r.b = {19.87654321, 0.0, 20.123456789012345};
  r.R = {1.0123, std::nullopt, 2.987654321};
  r.bErr = {0.1, 0.0, 0.2};
  r.RErr = {0.01, std::nullopt, 0.03};
  r.fidelity = 0.8331234567890123;
  r.fidelityError = 0.0016;
  const std::string js = io::report_to_json(r);
  EXPECT_NE(js.find("\"fidelity_err\""), std::string::npos);
  EXPECT_NE(js.find("null"), std::string::npos);
  EXPECT_EQ(io::report_from_json(js), r);
  EXPECT_EQ(io::report_to_json(io::report_from_json(js)), js);
}

TEST(scan_io, report_json_errors) {
  EXPECT_THROW(io::report_from_json("{"), io::FormatError);
  EXPECT_THROW(io::report_from_json(R"({"b":[1,2],"R":[1,2,3],"b_err":[0,0,0],"R_err":[0,0,0],"fidelity":1,"fidelity_err":0})"),
               io::FormatError);
  EXPECT_THROW(io::report_from_json(R"({"b":[1,2,3]})"), io::FormatError);
}

TEST(scan_io, parse_config) {
  std::istringstream in(
      "# comment\n"
      "scan = X\n"
      "points = -2, -1, 0, 1, 2   # trailing comment\n"
      "sigma_um = 3.5\n"
      "baselines = 10,0,20\n"
      "efficiencies = 0.5, 1, 0.9\n"
      "shots = 50\n"
      "seed = 12\n"
      "bootstrap = 150\n"
      "shared_sigma = true\n");
  const auto cfg = io::parse_scan_config(in);
  EXPECT_EQ(cfg.scan.scanVariable, ScanVariable::X);
  EXPECT_EQ(cfg.scan.points, (std::vector<double>{-2, -1, 0, 1, 2}));
  EXPECT_EQ(cfg.scan.coherenceSigma, 3.5);
  EXPECT_EQ(cfg.scan.baselines, (PerComponent{10, 0, 20}));
  EXPECT_EQ(cfg.scan.efficiencies, (PerComponent{0.5, 1, 0.9}));
  EXPECT_EQ(cfg.scan.trueRatios, ideal_ratios(ScanVariable::X).ratio);
  EXPECT_EQ(cfg.scan.shotsPerPoint, 50);
  EXPECT_EQ(cfg.scan.rngSeed, 12u);
  EXPECT_EQ(cfg.bootstrapResamples, 150);
  EXPECT_TRUE(cfg.sharedSigma);
}

TEST(scan_io, parse_config_range_and_defaults) {
  std::istringstream in("range = -40:40:9\nratios = 1, 0, 2.5\n");
  const auto cfg = io::parse_scan_config(in);
  ASSERT_EQ(cfg.scan.points.size(), 9u);
  EXPECT_EQ(cfg.scan.points.front(), -40.0);
  EXPECT_EQ(cfg.scan.points[4], 0.0);
  EXPECT_EQ(cfg.scan.points.back(), 40.0);
  EXPECT_EQ(cfg.scan.scanVariable, ScanVariable::Z);
  EXPECT_EQ(cfg.scan.trueRatios, (PerComponent{1, 0, 2.5}));
  EXPECT_FALSE(cfg.sharedSigma);
}

TEST(scan_io, parse_config_errors) {
  const char* bad[] = {
      "range = -1:1:5\ncolour = blue\n",
      "range = -1:1:5\nrange = -2:2:5\n",
      "range = -1:1:5\npoints = 1,2,3\n",
      "range = -1:1\n",
      "range = -1:1:5\nscan = Y\n",
      "range = -1:1:5\nbaselines = 1,2\n",
      "range = -1:1:5\nshots = many\n",
      "range = -1:1:5\nshots = 0\n",
      "range = -1:1:5\nsigma_um = -1\n",
      "range = -1:1:5\nshared_sigma = yes\n",
      "scan = Z\n",
      "just some words\n",
  };
  for (const char* text : bad) {
    std::istringstream in(text);
    EXPECT_THROW(io::parse_scan_config(in), io::FormatError) << text;
  }
  EXPECT_THROW(io::load_scan_config("/nonexistent/file.cfg"), io::FormatError);
}
