#include "pqcm/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "pqcm/experiment.hpp"
#include "pqcm/scan_io.hpp"

namespace pqcm::cli {

using nlohmann::json;

namespace {

std::string fixed6(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

double parse_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InvalidSpec(what + ": not a number: '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw InvalidSpec(what + ": not a number: '" + s + "'");
  return v;
}

std::string basis_label(std::size_t idx) {
  std::string s(3, '0');
  for (int b = 0; b < 3; ++b)
    if (idx & (std::size_t{1} << (2 - b))) s[static_cast<std::size_t>(b)] = '1';
  return s;
}

void emit_rows(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& rows) {
  out << "quantity,value\n";
  for (const auto& [k, v] : rows) out << k << ',' << v << '\n';
}

}  // namespace

InputState parse_state_spec(const std::string& spec) {
  const double r = std::numbers::sqrt2 / 2;
  if (spec == "H") return {StateVector{1.0, 0.0}, RealQubit::H(), spec};
  if (spec == "V") return {StateVector{0.0, 1.0}, RealQubit::V(), spec};
  if (spec == "plus") return {StateVector{r, r}, RealQubit::plus(), spec};
  if (spec == "minus") return {StateVector{r, -r}, RealQubit(r, -r), spec};

  // theta=<rad>,phi=<rad>
  std::optional<double> theta, phi;
  std::istringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InvalidSpec("unknown state '" + spec + "'");
    const std::string key = item.substr(0, eq);
    const double value = parse_number(item.substr(eq + 1), key);
    if (key == "theta" && !theta) {
      theta = value;
    } else if (key == "phi" && !phi) {
      phi = value;
    } else {
      throw InvalidSpec("unknown or repeated key '" + key + "' in state '" + spec + "'");
    }
  }
  if (!theta || !phi) throw InvalidSpec("state '" + spec + "' needs both theta and phi");
  InputState s{bloch_ket(*theta, *phi), std::nullopt, spec};
  const double s2 = std::sin(*phi);
  if (std::abs(s2 * std::sin(*theta / 2)) < 1e-15) {
    const double beta = std::cos(*phi) * std::sin(*theta / 2);
    s.real = RealQubit(std::cos(*theta / 2), beta);
  }
  return s;
}

OutputFormat parse_format(const std::string& name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  throw InvalidSpec("unknown format '" + name + "' (expected csv or json)");
}

fock::Geometry parse_geometry(const std::string& name) {
  if (name == "two-mode") return fock::Geometry::TwoMode;
  if (name == "collinear") return fock::Geometry::Collinear;
  throw InvalidSpec("unknown geometry '" + name + "' (expected two-mode or collinear)");
}

int cmd_clone(const CloneOptions& opts, std::ostream& out, std::ostream& err) {
  InputState in;
  try {
    in = parse_state_spec(opts.state);
  } catch (const std::invalid_argument& e) {
    err << "clone: " << e.what() << '\n';
    return kExitValidation;
  }
  try {
    const CloneTriple pqcm = pqcm_1to3(in.ket);
    const MixedCloneTriple univ = universal_1to3(in.ket);
    const double fid = opts.universal ? univ.perQubitFidelity[0] : pqcm.perQubitFidelity[0];
    const double success = opts.universal ? univ.successProbability : pqcm.successProbability;

    if (opts.format == OutputFormat::Json) {
      json j;
      j["state"] = in.label;
      j["machine"] = opts.universal ? "universal" : "phase-covariant";
      json amps = json::array();
      for (std::size_t i = 0; i < 8; ++i) {
        amps.push_back({{"basis", basis_label(i)}, {"re", pqcm.state[i].real()}, {"im", pqcm.state[i].imag()}});
      }
      j["output_amplitudes"] = amps;
      j["success_probability"] = success;
      j["per_clone_fidelity"] = opts.universal ? univ.perQubitFidelity : pqcm.perQubitFidelity;
      j["fidelity"] = fid;
      j["universal_fidelity"] = univ.perQubitFidelity[0];
      out << j.dump(2) << '\n';
      return kExitOk;
    }
    std::vector<std::pair<std::string, std::string>> rows;
    rows.emplace_back("state", in.label);
    rows.emplace_back("machine", opts.universal ? "universal" : "phase-covariant");
    for (std::size_t i = 0; i < 8; ++i) {
      rows.emplace_back("amp_re_" + basis_label(i), fixed6(pqcm.state[i].real()));
      rows.emplace_back("amp_im_" + basis_label(i), fixed6(pqcm.state[i].imag()));
    }
    rows.emplace_back("success_probability", fixed6(success));
    const auto& per = opts.universal ? univ.perQubitFidelity : pqcm.perQubitFidelity;
    rows.emplace_back("fidelity_S", fixed6(per[0]));
    rows.emplace_back("fidelity_A", fixed6(per[1]));
    rows.emplace_back("fidelity_B", fixed6(per[2]));
    rows.emplace_back("fidelity", fixed6(fid));
    rows.emplace_back("universal_fidelity", fixed6(univ.perQubitFidelity[0]));
    emit_rows(out, rows);
    return kExitOk;
  } catch (const std::domain_error& e) {
    err << "clone: " << e.what() << '\n';
    return kExitNumerical;
  }
}

int cmd_bounds(int maxM, OutputFormat format, std::ostream& out, std::ostream& err) {
  if (maxM < 2) {
    err << "bounds: --max-m must be at least 2\n";
    return kExitValidation;
  }
  const double limUniv = bound(BoundKind::Estimation, 1, 1).value;
  const double limCov = bound(BoundKind::PhaseEstimation, 1, 1).value;
  if (format == OutputFormat::Json) {
    json rows = json::array();
    for (int m = 1; m <= maxM; ++m) {
      rows.push_back({{"M", m},
                      {"F_univ", bound(BoundKind::Universal, 1, m).value},
                      {"F_cov", bound(BoundKind::PhaseCovariant, 1, m).value}});
    }
    rows.push_back({{"M", "inf"}, {"F_univ", limUniv}, {"F_cov", limCov}});
    out << rows.dump(2) << '\n';
    return kExitOk;
  }
  out << "M,F_univ,F_cov\n";
  for (int m = 1; m <= maxM; ++m) {
    out << m << ',' << fixed6(bound(BoundKind::Universal, 1, m).value) << ','
        << fixed6(bound(BoundKind::PhaseCovariant, 1, m).value) << '\n';
  }
  out << "inf," << fixed6(limUniv) << ',' << fixed6(limCov) << '\n';
  return kExitOk;
}

int cmd_fock(const FockOptions& opts, std::ostream& out, std::ostream& err) {
  InputState in;
  try {
    in = parse_state_spec(opts.state);
  } catch (const std::invalid_argument& e) {
    err << "fock: " << e.what() << '\n';
    return kExitValidation;
  }
  if (!in.real) {
    err << "fock: input polarization must have real amplitudes (x-z plane)\n";
    return kExitValidation;
  }
  try {
    const auto report = fock::qubit_fock_crosscheck(*in.real, opts.geometry, opts.psi);
    fock::FockVector single;
    if (opts.geometry == fock::Geometry::TwoMode) {
      single = *fock::run_two_mode_pipeline(in.ket).selected.state;
    } else {
      fock::OpaConfig cfg;
      cfg.geometry = fock::Geometry::Collinear;
      cfg.collinearPhase = opts.psi;
      single = fock::collinear_first_order(opts.psi, cfg);
    }
    const Complex a30 = single.amplitude(single.occupation({{0, 0, 0, 3}}));
    const Complex a12 = single.amplitude(single.occupation({{0, 0, 0, 1}, {0, 0, 1, 2}}));
    const char* geometry = opts.geometry == fock::Geometry::TwoMode ? "two-mode" : "collinear";

    if (opts.format == OutputFormat::Json) {
      json j;
      j["state"] = in.label;
      j["geometry"] = geometry;
      j["psi"] = opts.psi;
      j["amplitude_3_0"] = {a30.real(), a30.imag()};
      j["amplitude_1_2"] = {a12.real(), a12.imag()};
      j["probabilities"] = report.fockProbabilities;
      j["branch_probability"] = report.branchProbability;
      j["fidelity"] = report.fockFidelity;
      j["qubit_probabilities"] = report.qubitProbabilities;
      j["qubit_fidelity"] = report.qubitFidelity;
      j["relative_sign"] = report.derivedRelativeSign;
      j["matches_printed_sign"] = report.matchesPrintedSign;
      j["crosscheck"] = report.pass ? "pass" : "fail";
      j["crosscheck_detail"] = report.message;
      out << j.dump(2) << '\n';
    } else {
      std::vector<std::pair<std::string, std::string>> rows = {
          {"state", in.label},
          {"geometry", geometry},
          {"amp_re_3_0", fixed6(a30.real())},
          {"amp_im_3_0", fixed6(a30.imag())},
          {"amp_re_1_2", fixed6(a12.real())},
          {"amp_im_1_2", fixed6(a12.imag())},
          {"prob_3_0", fixed6(report.fockProbabilities[0])},
          {"prob_1_2", fixed6(report.fockProbabilities[1])},
          {"branch_probability", fixed6(report.branchProbability)},
          {"fidelity", fixed6(report.fockFidelity)},
          {"relative_sign", report.derivedRelativeSign < 0 ? "-" : "+"},
          {"crosscheck", report.pass ? "pass" : "fail"}};
      emit_rows(out, rows);
    }
    if (!report.pass) {
      err << "fock: crosscheck failed: " << report.message << '\n';
      return kExitNumerical;
    }
    return kExitOk;
  } catch (const std::domain_error& e) {
    err << "fock: " << e.what() << '\n';
    return kExitNumerical;
  }
}

int cmd_scan(const ScanOptions& opts, std::ostream& out, std::ostream& err) {
  io::ScanRunConfig cfg;
  try {
    cfg = io::load_scan_config(opts.configPath);
  } catch (const io::FormatError& e) {
    err << "scan: " << e.what() << '\n';
    return kExitValidation;
  }
  if (opts.seed) cfg.scan.rngSeed = *opts.seed;
  if (cfg.bootstrapResamples < 100) {
    err << "scan: bootstrap must be at least 100 resamples\n";
    return kExitValidation;
  }

  const auto records = experiment::simulate_scan(cfg.scan);
  if (opts.outPrefix) {
    std::ofstream csv(*opts.outPrefix + ".csv");
    if (!csv) {
      err << "scan: cannot write " << *opts.outPrefix << ".csv\n";
      return kExitValidation;
    }
    io::write_records_csv(csv, records);
  }

  experiment::FitOptions fitOpts;
  fitOpts.shotsPerPoint = cfg.scan.shotsPerPoint;
  fitOpts.efficiencies = cfg.scan.efficiencies;
  fitOpts.sharedSigma = cfg.sharedSigma;
  experiment::FidelityReport report;
  try {
    report = experiment::analyze_scan(records, fitOpts, cfg.bootstrapResamples,
                                      experiment::stream_seed(cfg.scan.rngSeed, 0xB007u));
  } catch (const experiment::FitError& e) {
    err << "scan: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::domain_error& e) {
    err << "scan: " << e.what() << '\n';
    return kExitNumerical;
  }

  const std::string js = io::report_to_json(report);
  if (opts.outPrefix) {
    std::ofstream jf(*opts.outPrefix + ".json");
    jf << js << '\n';
  }
  if (opts.format == OutputFormat::Json) {
    out << js << '\n';
  } else {
    io::write_records_csv(out, records);
  }
  return kExitOk;
}

}  // namespace pqcm::cli
