#pragma once

// Subcommand implementations behind the `pqcm` executable. Each returns the
// process exit code: 0 success, 1 validation error, 2 numerical failure.

#include <iosfwd>
#include <optional>
#include <string>

#include "pqcm/cloning.hpp"
#include "pqcm/fock.hpp"

namespace pqcm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;

enum class OutputFormat { Csv, Json };

class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct InputState {
  StateVector ket;
  std::optional<RealQubit> real;  // set when the amplitudes are real
  std::string label;
};

/// Named states H, V, plus, minus, or "theta=<rad>,phi=<rad>".
InputState parse_state_spec(const std::string& spec);

OutputFormat parse_format(const std::string& name);
fock::Geometry parse_geometry(const std::string& name);

struct CloneOptions {
  std::string state = "plus";
  bool universal = false;
  OutputFormat format = OutputFormat::Csv;
};
int cmd_clone(const CloneOptions& opts, std::ostream& out, std::ostream& err);

int cmd_bounds(int maxM, OutputFormat format, std::ostream& out, std::ostream& err);

struct FockOptions {
  std::string state = "plus";
  fock::Geometry geometry = fock::Geometry::TwoMode;
  double psi = 0.0;
  OutputFormat format = OutputFormat::Csv;
};
int cmd_fock(const FockOptions& opts, std::ostream& out, std::ostream& err);

struct ScanOptions {
  std::string configPath;
  std::optional<std::string> outPrefix;  // writes <prefix>.csv and <prefix>.json
  std::optional<std::uint64_t> seed;     // overrides the config seed
  OutputFormat format = OutputFormat::Json;
};
int cmd_scan(const ScanOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace pqcm::cli
