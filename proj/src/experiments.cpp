#include "mertens/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "mertens/errors.hpp"
#include "mertens/rational.hpp"

namespace mertens {

namespace {

std::string error_code(const std::exception& e) {
  if (dynamic_cast<const CapacityError*>(&e)) return "error:capacity";
  if (dynamic_cast<const SingularMatrixError*>(&e)) return "error:singular";
  if (dynamic_cast<const ConvergenceError*>(&e)) return "error:no_convergence";
  if (dynamic_cast<const DomainError*>(&e)) return "error:domain";
  return "error:internal";
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

CheckResult make_check(std::string name, double discrepancy, double tolerance,
                       std::string detail = {}) {
  CheckResult c;
  c.name = std::move(name);
  c.discrepancy = discrepancy;
  c.tolerance = tolerance;
  c.passed = discrepancy <= tolerance;
  c.detail = std::move(detail);
  return c;
}

CheckResult failed_check(std::string name, const std::exception& e) {
  CheckResult c;
  c.name = std::move(name);
  c.discrepancy = std::numeric_limits<double>::infinity();
  c.passed = false;
  c.detail = error_code(e) + ": " + e.what();
  return c;
}

// Eigenvalues sorted by decreasing magnitude, positive first on ties.
std::vector<double> by_magnitude(std::vector<double> values) {
  std::stable_sort(values.begin(), values.end(), [](double a, double b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
    return a > b;
  });
  return values;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  LineFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

}  // namespace

ExperimentContext::ExperimentContext(std::uint64_t max_n, Limits limits)
    : limits_(limits),
      table_(std::make_shared<const MertensTable>(
          build_mertens_table(std::max<std::uint64_t>(max_n, 1), limits.sieve_limit))) {}

std::int64_t ExperimentContext::mertens(std::uint64_t n) const {
  return mertens_at(n, *table_, limits_.sieve_limit);
}

std::string to_string(SpectrumKind kind) { return kind == SpectrumKind::M ? "M" : "Kinv"; }

SpectrumKind parse_spectrum_kind(const std::string& text) {
  if (text == "M") return SpectrumKind::M;
  if (text == "Kinv") return SpectrumKind::Kinv;
  throw DomainError("unknown matrix kind '" + text + "' (expected M or Kinv)");
}

std::uint64_t perfect_square_root(std::uint64_t n) {
  const std::uint64_t r = isqrt(n);
  if (n == 0 || r * r != n) {
    throw DomainError(std::to_string(n) + " is not a positive perfect square");
  }
  return r;
}

bool VerificationReport::all_passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed || c.report_only; });
}

const CheckResult* VerificationReport::find(const std::string& name) const noexcept {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::optional<ConstructionMismatch> compare_u_constructions(std::uint64_t n,
                                                            std::size_t max_dim) {
  const SymmetricMatrix by_values = build_u(divisor_value_set(n), max_dim);
  const SymmetricMatrix by_kernel = build_u_kernel(n, max_dim);
  if (by_values.dim() != by_kernel.dim()) {
    return ConstructionMismatch{by_values.dim(), by_kernel.dim(), -1.0, -1.0};
  }
  // Kernel index i pairs with the i-th element of S in increasing order
  // (f decreasing along the grid, n/s decreasing along S).
  for (std::size_t i = 0; i < by_values.dim(); ++i) {
    for (std::size_t j = 0; j < by_values.dim(); ++j) {
      if (by_values(i, j) != by_kernel(i, j)) {
        return ConstructionMismatch{i, j, by_values(i, j), by_kernel(i, j)};
      }
    }
  }
  return std::nullopt;
}

double entrywise_mertens_deviation(const MatrixFamily& family, const ExperimentContext& ctx) {
  const auto& values = family.s.values;
  double worst = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = 0; j < values.size(); ++j) {
      const unsigned __int128 denom = static_cast<unsigned __int128>(values[i]) * values[j];
      const auto arg = static_cast<std::uint64_t>(family.s.n / denom);
      const double expected = static_cast<double>(ctx.mertens(arg));
      worst = std::max(worst, std::abs(family.m(i, j) - expected));
    }
  }
  return worst;
}

VerificationReport verify_identities(std::uint64_t n, const ExperimentContext& ctx,
                                     const VerifyTolerances& tol) {
  const std::uint64_t r = perfect_square_root(n);
  VerificationReport report;
  report.n = n;
  report.mertens_n = ctx.mertens(n);
  const auto mertens_n = static_cast<double>(report.mertens_n);

  MatrixFamily family;
  try {
    family = build_family(n, ctx.limits().max_dim);
  } catch (const std::exception& e) {
    report.checks.push_back(failed_check("BUILD", e));
    return report;
  }
  const std::size_t dim = family.s.size();

  {
    const bool symmetric = family.u.matrix().is_exactly_symmetric() &&
                           family.t.matrix().is_exactly_symmetric() &&
                           family.k.matrix().is_exactly_symmetric() &&
                           family.k_inverse.matrix().is_exactly_symmetric() &&
                           family.m.matrix().is_exactly_symmetric();
    report.checks.push_back(make_check("SYM", symmetric ? 0.0 : 1.0, 0.0,
                                       "exact scan of U, T, K, K^-1, Mertens matrix"));
  }

  if (dim <= kRationalMaxDim) {
    try {
      const auto exact = rational_solve(RationalMatrix::from_integer_matrix(family.u.matrix()),
                                        std::vector<mpq_class>(dim, mpq_class(1)));
      mpq_class sum = 0;
      for (const auto& v : exact.x) sum += v;
      const mpq_class diff = abs(sum - mpq_class(report.mertens_n));
      report.checks.push_back(make_check("I1-exact", diff.get_d(), 0.0,
                                         "u^T U^-1 u = " + sum.get_str()));
      CheckResult det;
      det.name = "DET";
      det.report_only = true;
      det.passed = abs(exact.determinant) == 1;
      det.detail = "det U = " + exact.determinant.get_str();
      report.checks.push_back(det);
    } catch (const std::exception& e) {
      report.checks.push_back(failed_check("I1-exact", e));
    }
  } else {
    CheckResult skipped;
    skipped.name = "I1-exact";
    skipped.report_only = true;
    skipped.detail = "skipped: dim " + std::to_string(dim) + " above rational cost guard";
    report.checks.push_back(skipped);
  }

  try {
    const auto x = solve(lu_factor(family.u), family.weights.u);
    const double quad = std::accumulate(x.begin(), x.end(), 0.0);
    report.checks.push_back(make_check("I1-float", std::abs(quad - mertens_n), tol.i1_float,
                                       "u^T U^-1 u = " + format_double(quad)));
  } catch (const std::exception& e) {
    report.checks.push_back(failed_check("I1-float", e));
  }

  {
    const auto& w = family.weights.w;
    const auto kw = multiply(family.k_inverse.matrix(), w);
    const double quad = std::inner_product(w.begin(), w.end(), kw.begin(), 0.0);
    report.checks.push_back(make_check("I2", std::abs(quad - mertens_n),
                                       tol.i2_relative * std::max(1.0, std::abs(mertens_n)),
                                       "w^T K^-1 w = " + format_double(quad)));
  }

  report.checks.push_back(make_check("I3", std::abs(family.m(0, 0) - mertens_n), tol.i3,
                                     "Mertens(1,1) = " + format_double(family.m(0, 0))));

  report.checks.push_back(make_check("O1", entrywise_mertens_deviation(family, ctx), tol.o1,
                                     "max |Mertens(i,j) - M(floor(n/(s_i s_j)))|"));

  try {
    const auto mismatch = compare_u_constructions(n, ctx.limits().max_dim);
    std::string detail = "S-indexed U equals kernel-indexed U";
    if (mismatch) {
      std::ostringstream os;
      os << "first mismatch at (" << mismatch->row + 1 << "," << mismatch->col + 1
         << "): S-indexed " << mismatch->s_indexed << " vs kernel-indexed "
         << mismatch->kernel_indexed;
      detail = os.str();
    }
    report.checks.push_back(make_check("E1", mismatch ? 1.0 : 0.0, 0.0, detail));
  } catch (const std::exception& e) {
    report.checks.push_back(failed_check("E1", e));
  }

  const double abs_m = std::abs(mertens_n);
  try {
    const double two = spectral_norm(family.m);
    const double frob = frobenius_norm(family.m);
    const double slack = 1e-12 * std::max(1.0, frob);
    const double violation = std::max({0.0, abs_m - two, two - frob});
    std::ostringstream os;
    os << "|M(n)| = " << abs_m << " <= ||M||_2 = " << format_double(two)
       << " <= ||M||_F = " << format_double(frob);
    report.checks.push_back(make_check("B1", violation, slack, os.str()));
  } catch (const std::exception& e) {
    report.checks.push_back(failed_check("B1", e));
  }

  try {
    const double kinv = spectral_norm(family.k_inverse);
    const double w_sq = family.weights.w_norm_sq();
    double harmonic = 0.0;
    for (std::uint64_t j = 1; j <= r; ++j)
      harmonic += static_cast<double>(j) + static_cast<double>(n) / static_cast<double>(j);
    const double w_cap = harmonic / std::sqrt(static_cast<double>(n));
    const double rhs = kinv * w_sq;
    const double slack = 1e-12 * std::max(1.0, rhs);
    const double violation = std::max({0.0, abs_m - rhs, w_sq - w_cap});
    std::ostringstream os;
    os << "|M(n)| = " << abs_m << " <= ||K^-1||_2 ||w||^2 = " << format_double(rhs)
       << "; ||w||^2 = " << format_double(w_sq) << " <= " << format_double(w_cap);
    report.checks.push_back(make_check("B2", violation, slack, os.str()));
  } catch (const std::exception& e) {
    report.checks.push_back(failed_check("B2", e));
  }

  {
    const double expected = static_cast<double>(r) * static_cast<double>(r + 1) /
                            (2.0 * std::sqrt(static_cast<double>(n)));
    const double got = family.weights.w_minus_norm_sq();
    report.checks.push_back(make_check("W1", std::abs(got - expected),
                                       tol.w1_relative * std::max(1.0, expected),
                                       "||w-||^2 = " + format_double(got)));
  }
  return report;
}

SpectrumResult top_spectrum(std::uint64_t n, SpectrumKind kind, std::size_t count,
                            const ExperimentContext& ctx) {
  perfect_square_root(n);
  const auto s = divisor_value_set(n);
  check_dim(s.size(), ctx.limits().max_dim);
  const SymmetricMatrix u = build_u(s, ctx.limits().max_dim);
  const SymmetricMatrix a = kind == SpectrumKind::M
                                ? build_m(u, build_t(s.size()))
                                : build_k_inverse(u, build_weights(s).d);
  return sym_eig(a, std::min(count, a.dim()));
}

double log_in_base(double x, LogBase base) {
  return base == LogBase::natural ? std::log(x) : std::log10(x);
}

std::string to_string(LogBase base) { return base == LogBase::natural ? "e" : "10"; }

SweepRecord sweep_one(std::uint64_t k, SpectrumKind kind, LogBase log_base,
                      const ExperimentContext& ctx) {
  SweepRecord rec;
  rec.k = k;
  rec.n = k * k;
  rec.kind = kind;
  try {
    rec.mertens_n = ctx.mertens(rec.n);
    const auto s = divisor_value_set(rec.n);
    check_dim(s.size(), ctx.limits().max_dim);
    const SymmetricMatrix u = build_u(s, ctx.limits().max_dim);
    const WeightVectors weights = build_weights(s);
    const SymmetricMatrix a = kind == SpectrumKind::M ? build_m(u, build_t(s.size()))
                                                      : build_k_inverse(u, weights.d);
    const auto values = by_magnitude(sym_eigenvalues(a));
    for (std::size_t i = 0; i < kSweepSlots && i < values.size(); ++i) rec.eig[i] = values[i];
    rec.spectral_norm = std::abs(values.front());
    rec.frobenius_norm = frobenius_norm(a);
    rec.w_norm_sq = weights.w_norm_sq();
    if (kind == SpectrumKind::Kinv) rec.bound_rhs = rec.spectral_norm * rec.w_norm_sq;
    const double n = static_cast<double>(rec.n);
    rec.norm_over_sqrt_n = rec.spectral_norm / std::sqrt(n);
    rec.norm_over_log_n = rec.spectral_norm / log_in_base(n, log_base);
  } catch (const std::exception& e) {
    SweepRecord failed;
    failed.k = k;
    failed.n = k * k;
    failed.kind = kind;
    failed.status = error_code(e);
    return failed;
  }
  return rec;
}

std::vector<SweepRecord> sweep(const SweepConfig& config, const ExperimentContext& ctx) {
  if (config.k_min < 2 || config.k_max < config.k_min || config.step == 0) {
    throw DomainError("sweep needs 2 <= k_min <= k_max and step >= 1");
  }
  std::vector<std::uint64_t> ks;
  for (std::uint64_t k = config.k_min; k <= config.k_max; k += config.step) ks.push_back(k);

  std::vector<SweepRecord> records(ks.size());
  const std::size_t workers = std::clamp<std::size_t>(config.workers, 1, ks.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < ks.size(); i = next++) {
      records[i] = sweep_one(ks[i], config.kind, config.log_base, ctx);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return records;
}

std::vector<FitSample> fit_overlay(std::span<const double> n_grid, const FitCurveConfig& config) {
  std::vector<FitSample> out;
  out.reserve(n_grid.size());
  for (double n : n_grid) {
    if (!(n >= kFitCurveMinN)) {
      throw DomainError("fit curve needs n >= 16 (ln ln ln n must be positive), got " +
                        format_double(n));
    }
    const double log_n = log_in_base(n, config.log_base);
    FitSample sample;
    sample.n = n;
    sample.overlay = config.amplitude *
                     std::cos(config.angular_frequency * log_n - config.phase) *
                     std::sqrt(std::log(std::log(std::log(n))));
    sample.reference_term =
        config.reference_amplitude * std::cos(config.angular_frequency * log_n -
                                              config.reference_phase);
    out.push_back(sample);
  }
  return out;
}

std::vector<double> log_spaced_grid(double n_min, double n_max, std::size_t points) {
  if (points == 0 || !(n_min > 0.0) || !(n_max >= n_min)) {
    throw DomainError("log-spaced grid needs 0 < n_min <= n_max and points >= 1");
  }
  std::vector<double> grid(points);
  if (points == 1) {
    grid[0] = n_min;
    return grid;
  }
  const double a = std::log(n_min);
  const double b = std::log(n_max);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
  }
  grid.front() = n_min;
  grid.back() = n_max;
  return grid;
}

ProbeSummary conjecture_probe(std::span<const SweepRecord> records) {
  std::vector<double> log_n;
  std::vector<double> log_norm;
  std::vector<double> ratio;
  ProbeSummary summary;
  for (const auto& rec : records) {
    if (!rec.ok()) continue;
    const double ln = std::log(static_cast<double>(rec.n));
    const double q = rec.spectral_norm / ln;
    log_n.push_back(ln);
    log_norm.push_back(std::log(rec.spectral_norm));
    ratio.push_back(q);
    if (q > summary.max_norm_over_log_n || summary.records == 0) {
      summary.max_norm_over_log_n = q;
      summary.argmax_n = rec.n;
    }
    ++summary.records;
  }
  if (summary.records < 10) {
    throw DomainError("conjecture probe needs at least 10 successful records, got " +
                      std::to_string(summary.records));
  }
  const LineFit power = least_squares(log_n, log_norm);
  summary.alpha = power.slope;
  summary.log_c = power.intercept;
  summary.ratio_trend = least_squares(log_n, ratio).slope;
  return summary;
}

}  // namespace mertens
