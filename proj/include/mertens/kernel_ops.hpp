#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace mertens {

/// f(t) = 1/(2t) on (0, 1/2], 2(1-t) on (1/2, 1]. DomainError outside (0, 1].
double f_eval(double t);

/// floor(x), except that values within a relative 1e-11 below an integer are
/// taken to be that integer. Grid products f(i/2r) f(j/2r) are rationals whose
/// integer cases must not be lost to rounding of the inputs.
double snapped_floor(double x) noexcept;

enum class KernelVariant { u, k, k_eps };

struct KernelSpec {
  KernelVariant variant = KernelVariant::k;
  double epsilon = 0.0;  // used by k_eps only
};

/// u = floor(f(s) f(t)); k and k_eps scale by (f(s) f(t))^{-1/2} and ^{-1/2-eps}.
/// Where the floor vanishes the kernel is 0.
double kernel_eval(const KernelSpec& spec, double s, double t);

/// One-dimensional composite Gauss-Legendre rule on [lower, 1]: half of the
/// cells power-graded on [lower, 1/2] toward `lower`, half uniform on [1/2, 1].
struct AxisRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

struct QuadratureGrid {
  std::size_t cells_per_axis = 256;  // even, >= 4
  double grading = 2.0;              // >= 1
  double lower = 0.0;                // integrate over [lower, 1]^2

  AxisRule axis_rule() const;
  QuadratureGrid coarsened() const;
};

inline constexpr std::size_t kGaussOrder = 8;

/// Grid with the recommended grading max(2, 1/eps) for the k_eps singularity.
QuadratureGrid default_grid(double epsilon, std::size_t cells = 256);

struct QuadratureResult {
  double value = 0.0;
  double two_grid_error = 0.0;  // |Q(grid) - Q(grid with half the cells)|
  bool flagged = false;         // two_grid_error > 5% of value
};

/// sqrt of the integral of g(s,t)^2 over the grid's square, with its two-grid estimate.
QuadratureResult l2_norm(const std::function<double(double, double)>& g,
                         const QuadratureGrid& grid);

/// Hilbert-Schmidt norm of k_eps. DomainError unless variant is k_eps and
/// eps lies in (0, 1/2).
QuadratureResult hs_norm(const KernelSpec& spec, const QuadratureGrid& grid);

/// Closed form of the integral of f^{1-2 eps} over (0,1]: 1/(4 eps) + 1/(4 (1-eps)).
double bound_integral(double epsilon);

/// ||k_{eps1} - k_{eps2}|| over [delta, 1]^2; std::nullopt for eps2 means the
/// unregularised kernel k.
QuadratureResult hs_distance_truncated(double eps1, std::optional<double> eps2, double delta,
                                       std::size_t cells = 256, double grading = 2.0);

/// Max |kernel_eval(k, i/2r, j/2r) - K(i,j)| with K built from the kernel-indexed U.
double discretization_check(std::uint64_t n);

struct KernelReportRow {
  double epsilon = 0.0;
  std::optional<double> delta;  // empty for full-domain rows
  double value = 0.0;
  std::optional<double> bound;
  double two_grid_error = 0.0;
};

}  // namespace mertens
