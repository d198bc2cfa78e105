#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mertens/dense_linalg.hpp"
#include "mertens/matrix_builder.hpp"
#include "mertens/sieve.hpp"

namespace mertens {

struct Limits {
  std::uint64_t sieve_limit = kDefaultMaxSieveLimit;
  std::size_t max_dim = kDefaultMaxDim;
};

/// Shared read-only state for a batch of experiments: a Mertens table
/// covering every n the batch touches, plus the configured limits.
class ExperimentContext {
 public:
  ExperimentContext(std::uint64_t max_n, Limits limits = {});

  const MertensTable& table() const noexcept { return *table_; }
  const Limits& limits() const noexcept { return limits_; }
  std::int64_t mertens(std::uint64_t n) const;

 private:
  Limits limits_;
  std::shared_ptr<const MertensTable> table_;
};

enum class SpectrumKind { M, Kinv };

std::string to_string(SpectrumKind kind);
SpectrumKind parse_spectrum_kind(const std::string& text);

/// Throws DomainError unless n = r^2, r >= 1; returns r.
std::uint64_t perfect_square_root(std::uint64_t n);

// ---------------------------------------------------------------------------
// Identity verification

struct CheckResult {
  std::string name;
  double discrepancy = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  bool report_only = false;
  std::string detail;
};

struct VerificationReport {
  std::uint64_t n = 0;
  std::int64_t mertens_n = 0;
  std::vector<CheckResult> checks;

  bool all_passed() const noexcept;
  const CheckResult* find(const std::string& name) const noexcept;
};

/// Tolerances for the identity suite.
struct VerifyTolerances {
  double i1_float = 1e-9;
  double i2_relative = 1e-8;
  double i3 = 1e-8;
  double o1 = 1e-6;
  double w1_relative = 1e-12;
};

/// Checks I1 (exact and float), I2, I3, O1, E1, B1, B2, W1, SYM and reports det U.
/// Numerical failures are reported as failed checks rather than thrown.
VerificationReport verify_identities(std::uint64_t n, const ExperimentContext& ctx,
                                     const VerifyTolerances& tol = {});

/// First mismatch between the S-indexed and kernel-indexed U, if any.
struct ConstructionMismatch {
  std::size_t row = 0;
  std::size_t col = 0;
  double s_indexed = 0.0;
  double kernel_indexed = 0.0;
};
std::optional<ConstructionMismatch> compare_u_constructions(std::uint64_t n,
                                                            std::size_t max_dim = kDefaultMaxDim);

/// max_{i,j} |Mertens(i,j) - M(floor(n / (s_i s_j)))|.
double entrywise_mertens_deviation(const MatrixFamily& family, const ExperimentContext& ctx);

// ---------------------------------------------------------------------------
// Spectra and sweeps

SpectrumResult top_spectrum(std::uint64_t n, SpectrumKind kind, std::size_t count,
                            const ExperimentContext& ctx);

inline constexpr std::size_t kSweepSlots = 8;

enum class LogBase { natural, ten };
double log_in_base(double x, LogBase base);
std::string to_string(LogBase base);

struct SweepRecord {
  std::uint64_t k = 0;
  std::uint64_t n = 0;
  SpectrumKind kind = SpectrumKind::M;
  std::array<std::optional<double>, kSweepSlots> eig{};
  double spectral_norm = 0.0;
  double frobenius_norm = 0.0;
  std::int64_t mertens_n = 0;
  double w_norm_sq = 0.0;
  std::optional<double> bound_rhs;  // Kinv only
  double norm_over_sqrt_n = 0.0;
  double norm_over_log_n = 0.0;
  std::string status = "ok";  // "ok" or "error:<code>"

  bool ok() const noexcept { return status == "ok"; }
};

struct SweepConfig {
  std::uint64_t k_min = 2;
  std::uint64_t k_max = 2;
  std::uint64_t step = 1;
  SpectrumKind kind = SpectrumKind::M;
  std::size_t workers = 1;
  LogBase log_base = LogBase::natural;
};

SweepRecord sweep_one(std::uint64_t k, SpectrumKind kind, LogBase log_base,
                      const ExperimentContext& ctx);

/// One record per k in ascending order, whatever the worker count. A failing k
/// yields an error record; the sweep continues.
std::vector<SweepRecord> sweep(const SweepConfig& config, const ExperimentContext& ctx);

// ---------------------------------------------------------------------------
// Fit curve

struct FitCurveConfig {
  double amplitude = 1.05;
  double angular_frequency = 14.14;
  double phase = 2.2;
  double reference_amplitude = 0.36;
  double reference_phase = 1.69;
  LogBase log_base = LogBase::natural;
};

struct FitSample {
  double n = 0.0;
  double overlay = 0.0;
  double reference_term = 0.0;
};

inline constexpr double kFitCurveMinN = 16.0;

/// overlay = A cos(omega log n - phase) sqrt(ln ln ln n); reference = A0 cos(omega log n - phase0).
/// DomainError for any n < 16.
std::vector<FitSample> fit_overlay(std::span<const double> n_grid,
                                   const FitCurveConfig& config = {});

/// `points` values geometrically spaced on [n_min, n_max].
std::vector<double> log_spaced_grid(double n_min, double n_max, std::size_t points);

// ---------------------------------------------------------------------------
// Conjecture probe

struct ProbeSummary {
  std::size_t records = 0;
  double max_norm_over_log_n = 0.0;
  std::uint64_t argmax_n = 0;
  double ratio_trend = 0.0;  // least-squares slope of ||K^-1||/ln n against ln n
  double alpha = 0.0;        // ||K^-1|| ~ C n^alpha
  double log_c = 0.0;
};

/// Report-only statistics over ok Kinv records. DomainError with fewer than 10.
ProbeSummary conjecture_probe(std::span<const SweepRecord> records);

}  // namespace mertens
