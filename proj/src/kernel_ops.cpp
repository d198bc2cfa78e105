#include "mertens/kernel_ops.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <span>
#include <string>

#include "mertens/errors.hpp"
#include "mertens/matrix_builder.hpp"

namespace mertens {

namespace {

constexpr double kSnapTolerance = 1e-11;

void check_unit_interval(double t) {
  if (!(t > 0.0 && t <= 1.0)) {
    throw DomainError("f is defined on (0, 1], got " + std::to_string(t));
  }
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

// Gauss-Legendre nodes and weights on [-1, 1], ascending.
struct ReferenceRule {
  std::array<double, kGaussOrder> nodes;
  std::array<double, kGaussOrder> weights;
};

const ReferenceRule& reference_rule() {
  static const ReferenceRule rule = [] {
    using gauss = boost::math::quadrature::gauss<double, kGaussOrder>;
    const auto& abscissa = gauss::abscissa();  // non-negative half
    const auto& weight = gauss::weights();
    ReferenceRule r{};
    const std::size_t half = kGaussOrder / 2;
    for (std::size_t k = 0; k < half; ++k) {
      r.nodes[half - 1 - k] = -abscissa[k];
      r.weights[half - 1 - k] = weight[k];
      r.nodes[half + k] = abscissa[k];
      r.weights[half + k] = weight[k];
    }
    return r;
  }();
  return rule;
}

void append_cell(AxisRule& rule, double a, double b) {
  const auto& ref = reference_rule();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (std::size_t k = 0; k < kGaussOrder; ++k) {
    rule.nodes.push_back(mid + half * ref.nodes[k]);
    rule.weights.push_back(half * ref.weights[k]);
  }
}

// Integral of g^2 over the square, evaluated row by row in a fixed order.
double integrate_square(const std::function<double(double, double)>& g, const AxisRule& axis) {
  const std::size_t m = axis.nodes.size();
  std::vector<double> row(m);
  std::vector<double> rows(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double s = axis.nodes[i];
    for (std::size_t j = 0; j < m; ++j) {
      const double v = g(s, axis.nodes[j]);
      row[j] = axis.weights[j] * v * v;
    }
    rows[i] = axis.weights[i] * pairwise_sum(row);
  }
  return pairwise_sum(rows);
}

void check_epsilon_window(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw DomainError("epsilon must lie in (0, 1/2) for an integrable k_eps, got " +
                      std::to_string(epsilon));
  }
}

}  // namespace

double f_eval(double t) {
  check_unit_interval(t);
  return t <= 0.5 ? 1.0 / (2.0 * t) : 2.0 * (1.0 - t);
}

double snapped_floor(double x) noexcept {
  const double fl = std::floor(x);
  const double next = fl + 1.0;
  if (next - x <= kSnapTolerance * std::max(1.0, x)) return next;
  return fl;
}

double kernel_eval(const KernelSpec& spec, double s, double t) {
  const double fs = f_eval(s);
  const double ft = f_eval(t);
  // every factor goes through the product so k(s,t) == k(t,s) bit for bit
  const double prod = fs * ft;
  const double level = snapped_floor(prod);
  switch (spec.variant) {
    case KernelVariant::u:
      return level;
    case KernelVariant::k:
      if (level == 0.0) return 0.0;
      return level / std::sqrt(prod);
    case KernelVariant::k_eps: {
      if (level == 0.0) return 0.0;
      return level * std::pow(prod, -0.5 - spec.epsilon);
    }
  }
  return 0.0;
}

AxisRule QuadratureGrid::axis_rule() const {
  if (cells_per_axis < 4 || cells_per_axis % 2 != 0) {
    throw DomainError("cells_per_axis must be even and >= 4");
  }
  if (!(grading >= 1.0)) throw DomainError("grading exponent must be >= 1");
  if (!(lower >= 0.0 && lower < 0.5)) throw DomainError("lower edge must lie in [0, 1/2)");

  const std::size_t half = cells_per_axis / 2;
  AxisRule rule;
  rule.nodes.reserve(cells_per_axis * kGaussOrder);
  rule.weights.reserve(cells_per_axis * kGaussOrder);
  const double span_low = 0.5 - lower;
  auto graded = [&](std::size_t c) {
    return lower + span_low * std::pow(static_cast<double>(c) / static_cast<double>(half), grading);
  };
  for (std::size_t c = 0; c < half; ++c) append_cell(rule, graded(c), graded(c + 1));
  for (std::size_t c = 0; c < half; ++c) {
    const double a = 0.5 + 0.5 * static_cast<double>(c) / static_cast<double>(half);
    const double b = 0.5 + 0.5 * static_cast<double>(c + 1) / static_cast<double>(half);
    append_cell(rule, a, b);
  }
  return rule;
}

QuadratureGrid QuadratureGrid::coarsened() const {
  QuadratureGrid coarse = *this;
  coarse.cells_per_axis = cells_per_axis / 2;
  if (coarse.cells_per_axis % 2 != 0) coarse.cells_per_axis += 1;
  coarse.cells_per_axis = std::max<std::size_t>(coarse.cells_per_axis, 4);
  return coarse;
}

QuadratureGrid default_grid(double epsilon, std::size_t cells) {
  QuadratureGrid grid;
  grid.cells_per_axis = cells;
  grid.grading = std::max(2.0, 1.0 / epsilon);
  return grid;
}

QuadratureResult l2_norm(const std::function<double(double, double)>& g,
                         const QuadratureGrid& grid) {
  const double fine = std::sqrt(integrate_square(g, grid.axis_rule()));
  const double coarse = std::sqrt(integrate_square(g, grid.coarsened().axis_rule()));
  QuadratureResult result;
  result.value = fine;
  result.two_grid_error = std::abs(fine - coarse);
  result.flagged = result.two_grid_error > 0.05 * std::abs(fine);
  return result;
}

QuadratureResult hs_norm(const KernelSpec& spec, const QuadratureGrid& grid) {
  if (spec.variant != KernelVariant::k_eps) {
    throw DomainError("Hilbert-Schmidt norm is only computed for the regularised kernel k_eps");
  }
  check_epsilon_window(spec.epsilon);
  return l2_norm([&](double s, double t) { return kernel_eval(spec, s, t); }, grid);
}

double bound_integral(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw DomainError("bound_integral needs epsilon in (0, 1), got " + std::to_string(epsilon));
  }
  return 1.0 / (4.0 * epsilon) + 1.0 / (4.0 * (1.0 - epsilon));
}

QuadratureResult hs_distance_truncated(double eps1, std::optional<double> eps2, double delta,
                                       std::size_t cells, double grading) {
  if (!(delta > 0.0 && delta < 0.25)) {
    throw DomainError("delta must lie in (0, 1/4), got " + std::to_string(delta));
  }
  check_epsilon_window(eps1);
  if (eps2) check_epsilon_window(*eps2);

  const KernelSpec a{KernelVariant::k_eps, eps1};
  const KernelSpec b = eps2 ? KernelSpec{KernelVariant::k_eps, *eps2} : KernelSpec{KernelVariant::k, 0.0};
  QuadratureGrid grid;
  grid.cells_per_axis = cells;
  grid.grading = grading;
  grid.lower = delta;
  return l2_norm([&](double s, double t) { return kernel_eval(a, s, t) - kernel_eval(b, s, t); },
                 grid);
}

double discretization_check(std::uint64_t n) {
  const SymmetricMatrix u = build_u_kernel(n);
  const std::uint64_t r = isqrt(n);
  const auto grid = kernel_grid(r);
  std::vector<double> d;
  d.reserve(grid.size());
  for (const auto& g : grid) d.push_back(g.to_double());
  const SymmetricMatrix k = build_k(u, d);

  const KernelSpec spec{KernelVariant::k, 0.0};
  const double two_r = 2.0 * static_cast<double>(r);
  double worst = 0.0;
  for (std::size_t i = 0; i < k.dim(); ++i) {
    const double s = static_cast<double>(i + 1) / two_r;
    for (std::size_t j = 0; j < k.dim(); ++j) {
      const double t = static_cast<double>(j + 1) / two_r;
      worst = std::max(worst, std::abs(kernel_eval(spec, s, t) - k(i, j)));
    }
  }
  return worst;
}

}  // namespace mertens
