#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mertens/dense_linalg.hpp"
#include "mertens/experiments.hpp"
#include "mertens/kernel_ops.hpp"
#include "mertens/matrix.hpp"

namespace mertens {

inline constexpr std::string_view kVersion = "mertens-spectra 1.0.0";

/// Shortest decimal that parses back to the same double.
std::string format_shortest(double v);
std::string format_optional(const std::optional<double>& v);
/// Inverse of format_shortest. Throws DomainError on malformed text.
double parse_double(std::string_view text);

/// `# config: <config>` then `# version: ...`.
void write_provenance(std::ostream& os, const std::string& config);

// Matrix dump v1: `# mertens-matrix v1 kind=<kind> n=<n> dim=<m>` then m CSV rows.
struct MatrixDump {
  std::string kind;
  std::uint64_t n = 0;
  Matrix matrix;
};
void write_matrix_dump(std::ostream& os, std::string_view kind, std::uint64_t n,
                       const Matrix& m);
MatrixDump read_matrix_dump(std::istream& is);

inline constexpr std::string_view kSweepHeader =
    "k,n,kind,eig1,eig2,eig3,eig4,eig5,eig6,eig7,eig8,spectral_norm,frobenius_norm,"
    "mertens_n,w_norm_sq,bound_rhs,norm_over_sqrt_n,norm_over_log_n,status";
void write_sweep_csv(std::ostream& os, std::span<const SweepRecord> records,
                     const std::string& config);

/// `# mertens-eigvecs v1 n=<n> kind=<kind> dim=<m> count=<c>` then c rows of m values.
void write_eigvec_sidecar(std::ostream& os, std::uint64_t n, std::string_view kind,
                          const SpectrumResult& spectrum);

inline constexpr std::string_view kKernelReportHeader =
    "epsilon,delta,hs_norm,bound,two_grid_error";
void write_kernel_report(std::ostream& os, std::span<const KernelReportRow> rows,
                         const std::string& config);

void write_fit_curve(std::ostream& os, std::span<const FitSample> samples,
                     const std::string& config);

}  // namespace mertens
