// pqcm: command-line front end for the cloning simulator.
//
//   pqcm clone  --state plus [--universal] [--format csv|json]
//   pqcm bounds --max-m 10 [--format csv|json]
//   pqcm fock   --state H [--geometry two-mode|collinear] [--psi 0.3]
//   pqcm scan   config.txt [--out prefix] [--seed 42] [--format json|csv]

#include <iostream>

#include <CLI11.hpp>

#include "pqcm/commands.hpp"

int main(int argc, char** argv) {
  using namespace pqcm::cli;

  CLI::App app{"1->3 phase-covariant cloning simulator"};
  app.require_subcommand(1);

  std::string format = "csv";
  std::string scanFormat = "json";

  CloneOptions clone;
  auto* cloneCmd = app.add_subcommand("clone", "Run the qubit-level cloner on one input state");
  cloneCmd->add_option("--state", clone.state, "H, V, plus, minus, or \"theta=<rad>,phi=<rad>\"");
  cloneCmd->add_flag("--universal", clone.universal, "Depolarize the anti-clone first (universal cloner)");
  cloneCmd->add_option("--format", format, "csv or json");

  int maxM = 10;
  auto* boundsCmd = app.add_subcommand("bounds", "Table of optimal 1->M fidelities");
  boundsCmd->add_option("--max-m", maxM, "Largest M in the table");
  boundsCmd->add_option("--format", format, "csv or json");

  FockOptions fockOpts;
  std::string geometry = "two-mode";
  auto* fockCmd = app.add_subcommand("fock", "Photonic pipeline and qubit cross-check");
  fockCmd->add_option("--state", fockOpts.state, "Input polarization (real amplitudes)");
  fockCmd->add_option("--geometry", geometry, "two-mode or collinear");
  fockCmd->add_option("--psi", fockOpts.psi, "Seed phase for the collinear geometry (rad)");
  fockCmd->add_option("--format", format, "csv or json");

  ScanOptions scan;
  std::string outPrefix;
  std::uint64_t seed = 0;
  auto* scanCmd = app.add_subcommand("scan", "Simulate and fit a coincidence scan");
  scanCmd->add_option("config", scan.configPath, "key = value scan configuration")->required();
  auto* outOpt = scanCmd->add_option("--out", outPrefix, "Write <prefix>.csv and <prefix>.json");
  auto* seedOpt = scanCmd->add_option("--seed", seed, "Override the configured RNG seed");
  scanCmd->add_option("--format", scanFormat, "stdout format: json (report) or csv (records)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*cloneCmd) {
      clone.format = parse_format(format);
      return cmd_clone(clone, std::cout, std::cerr);
    }
    if (*boundsCmd) return cmd_bounds(maxM, parse_format(format), std::cout, std::cerr);
    if (*fockCmd) {
      fockOpts.geometry = parse_geometry(geometry);
      fockOpts.format = parse_format(format);
      return cmd_fock(fockOpts, std::cout, std::cerr);
    }
    if (*scanCmd) {
      if (*outOpt) scan.outPrefix = outPrefix;
      if (*seedOpt) scan.seed = seed;
      scan.format = parse_format(scanFormat);
      return cmd_scan(scan, std::cout, std::cerr);
    }
  } catch (const InvalidSpec& e) {
    std::cerr << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}
