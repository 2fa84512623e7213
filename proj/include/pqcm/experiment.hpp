#pragma once

// Coincidence-counting model of the cloning measurement: delay (Z) and
// beam-splitter position (X) scans, Poisson shot noise, Gaussian peak fits,
// and the fidelity estimator with parametric-bootstrap errors.
//
// The data-parallel kernels (simulate_scan, bootstrap_error,
// run_recovery_trials) use OpenMP. Each work item draws from its own RNG
// stream derived from (seed, item index) and results are merged in index
// order, so output does not depend on the thread count. The *_serial
// variants are the reference implementations the tests compare against.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pqcm::experiment {

/// h = 1: |phi phi_perp phi_perp>, h = 2: |phi phi phi_perp>, h = 3: |phi phi phi>.
enum class ComponentLabel : int { H1 = 1, H2 = 2, H3 = 3 };

inline constexpr std::array<ComponentLabel, 3> kComponents = {ComponentLabel::H1, ComponentLabel::H2,
                                                              ComponentLabel::H3};

constexpr std::size_t index_of(ComponentLabel h) { return static_cast<std::size_t>(h) - 1; }
ComponentLabel component_from_int(int h);

enum class ScanVariable { Z, X };

using PerComponent = std::array<double, 3>;  // indexed by h - 1

struct ScanConfig {
  ScanVariable scanVariable = ScanVariable::Z;
  std::vector<double> points;  // micrometres
  double coherenceSigma = 10.0;
  PerComponent baselines{20.0, 0.0, 20.0};  // counts per shot, before efficiency
  PerComponent trueRatios{1.0, 0.0, 3.0};
  int shotsPerPoint = 400;
  PerComponent efficiencies{1.0, 1.0, 1.0};
  std::uint64_t rngSeed = 0;

  void validate() const;
};

struct CountRecord {
  double position = 0.0;
  ComponentLabel component = ComponentLabel::H3;
  std::int64_t counts = 0;

  bool operator==(const CountRecord&) const = default;
};

/// eta_h * b_h * (1 + (R_h - 1) exp(-x^2 / (2 sigma^2))), per shot.
double expected_rate(const ScanConfig& cfg, ComponentLabel h, double position);

struct RatioMap {
  PerComponent ratio{};
  /// Baselines relative to b_3 (b_2 = 0 means the component is absent).
  PerComponent relativeBaseline{};
};

/// Ideal peak/baseline ratios: R for the Z scan, V* for the X scan.
RatioMap ideal_ratios(ScanVariable kind);

struct RatioDerivation {
  ScanVariable kind = ScanVariable::Z;
  PerComponent onRate{};   // machine on (Z ~ 0) or indistinguishable photons (X ~ 0)
  PerComponent offRate{};  // |Z| or |X| >> c tau_coh
  PerComponent ratio{};    // on/off, 0 where both rates vanish
  bool consistent = false; // matches ideal_ratios(kind) within 1e-10
  std::string note;
};

/// Computes scan ratios from the Fock pipeline with temporally tagged
/// photons: tagged photons do not interfere, which models the far-delay limit.
RatioDerivation derive_ratios_from_fock(ScanVariable kind = ScanVariable::Z);

std::vector<CountRecord> simulate_scan(const ScanConfig& cfg);
std::vector<CountRecord> simulate_scan_serial(const ScanConfig& cfg);

/// Expected counts per record (rate * shots), in simulate_scan order.
std::vector<double> expected_counts(const ScanConfig& cfg);

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FitOptions {
  int shotsPerPoint = 400;
  PerComponent efficiencies{1.0, 1.0, 1.0};
  /// Fit one sigma for all bright components instead of one each.
  bool sharedSigma = false;
  int maxIterations = 200;
  double relativeTolerance = 1e-10;
};

struct ComponentFit {
  ComponentLabel component = ComponentLabel::H3;
  bool dark = false;  // every count zero: b = 0, R undefined
  double b = 0.0;
  std::optional<double> R;
  double sigma = 0.0;
  double bErr = 0.0;
  std::optional<double> RErr;
  double sigmaErr = 0.0;
  double chi2 = 0.0;
  int iterations = 0;
};

struct ScanFit {
  std::array<ComponentFit, 3> components;
};

/// Weighted Levenberg-Marquardt fit of one component's scan. `observed` holds
/// counts (doubles so noiseless expectations can be fitted directly).
ComponentFit fit_component(std::span<const double> positions, std::span<const double> observed,
                           ComponentLabel h, const FitOptions& options);

/// Fits every component present in the records. Requires >= 5 distinct
/// positions per bright component.
ScanFit fit_scan(std::span<const CountRecord> records, const FitOptions& options);

/// (3 b3 R3 + 2 b2 R2 + b1 R1) / (3 b3 R3 + 3 b2 R2 + 3 b1 R1).
double estimate_fidelity(const PerComponent& b, const PerComponent& R);

/// Estimator on fitted values; dark components contribute zero.
double fidelity_from_fit(const ScanFit& fit);

double bootstrap_error(std::span<const CountRecord> records, int nResamples, std::uint64_t seed,
                       const FitOptions& options);
double bootstrap_error_serial(std::span<const CountRecord> records, int nResamples,
                              std::uint64_t seed, const FitOptions& options);

struct FidelityReport {
  PerComponent b{};
  std::array<std::optional<double>, 3> R{};
  PerComponent bErr{};
  std::array<std::optional<double>, 3> RErr{};
  double fidelity = 0.0;
  double fidelityError = 0.0;

  bool operator==(const FidelityReport&) const = default;
};

/// fit_scan + estimate + bootstrap in one call.
FidelityReport analyze_scan(std::span<const CountRecord> records, const FitOptions& options,
                            int nResamples, std::uint64_t seed);

struct TrialOutcome {
  bool ok = false;  // fit and bootstrap succeeded
  double fidelity = 0.0;
  double error = 0.0;
};

/// Independent simulate -> fit -> bootstrap trials, trial t using seed
/// cfg.rngSeed + t. Parallel over trials.
std::vector<TrialOutcome> run_recovery_trials(const ScanConfig& cfg, int nTrials, int nResamples);
std::vector<TrialOutcome> run_recovery_trials_serial(const ScanConfig& cfg, int nTrials,
                                                     int nResamples);

/// Seed for work item `stream` of a run seeded with `seed`.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace pqcm::experiment
