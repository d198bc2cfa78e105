#include "mertens/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "mertens/errors.hpp"
#include "mertens/experiments.hpp"
#include "mertens/io.hpp"
#include "mertens/kernel_ops.hpp"
#include "mertens/matrix_builder.hpp"
#include "mertens/sieve.hpp"

namespace mertens::cli {

namespace {

constexpr const char* kMaxDimEnv = "MERTENS_SPECTRA_MAX_DIM";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::size_t default_max_dim() {
  if (const char* env = std::getenv(kMaxDimEnv); env && *env) {
    try {
      std::size_t pos = 0;
      const unsigned long long v = std::stoull(env, &pos);
      if (pos == std::string(env).size() && v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw UsageError(std::string(kMaxDimEnv) + " must be a positive integer, got '" + env + "'");
  }
  return kDefaultMaxDim;
}

LogBase parse_log_base(const std::string& text) {
  if (text == "e") return LogBase::natural;
  if (text == "10") return LogBase::ten;
  throw UsageError("--log-base must be 'e' or '10'");
}

// Writes to `path`, or to `fallback` when path is empty.
template <typename Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw UsageError("cannot open '" + path + "' for writing");
  write(file);
  if (!file) throw UsageError("failed writing '" + path + "'");
}

std::string limits_config(const Limits& limits) {
  return "max_dim=" + std::to_string(limits.max_dim) +
         " sieve_limit=" + std::to_string(limits.sieve_limit);
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_shortest(values[i]);
  }
  return out;
}

void print_report(const VerificationReport& report, std::ostream& out) {
  for (const auto& c : report.checks) {
    const char* verdict = c.report_only ? "INFO" : (c.passed ? "PASS" : "FAIL");
    out << "n=" << report.n << ' ' << c.name << ' ' << verdict
        << " discrepancy=" << format_shortest(c.discrepancy)
        << " tolerance=" << format_shortest(c.tolerance);
    if (!c.detail.empty()) out << " | " << c.detail;
    out << '\n';
  }
}

struct Options {
  Limits limits;
  // shared numeric inputs
  std::uint64_t n = 0;
  std::uint64_t k_min = 0;
  std::uint64_t k_max = 0;
  std::uint64_t step = 1;
  std::string kind;
  std::string out_path;
  std::string log_base = "e";
  std::size_t workers = 1;
  std::size_t top = 8;
  bool eigvecs = false;
  std::string eigvecs_out;
  std::string table_out;
  // fit-curve
  double n_min = 0.0;
  double n_max = 0.0;
  std::size_t points = 0;
  FitCurveConfig fit;
  // kernels
  std::vector<double> epsilons;
  std::vector<double> deltas;
  std::size_t cells = 256;
  double grading = 0.0;
};

int cmd_mertens(const Options& o, std::ostream& out) {
  const std::int64_t value = mertens_at(o.n, o.limits.sieve_limit);
  if (!o.table_out.empty()) {
    if (o.n == 0) throw UsageError("--table needs --n >= 1");
    const MertensTable table = build_mertens_table(o.n, o.limits.sieve_limit);
    emit(o.table_out, out, [&](std::ostream& os) {
      write_provenance(os, "mertens n=" + std::to_string(o.n) + " " + limits_config(o.limits));
      os << "n,mu,mertens\n";
      for (std::uint64_t m = 1; m <= o.n; ++m)
        os << m << ',' << table.mu(m) << ',' << table.mertens(m) << '\n';
    });
  }
  out << value << '\n';
  return kSuccess;
}

int cmd_matrix(const Options& o, std::ostream& out) {
  if (o.n == 0) throw UsageError("--n must be >= 1");
  const auto s = divisor_value_set(o.n);
  check_dim(s.size(), o.limits.max_dim);
  Matrix m;
  if (o.kind == "Uk") {
    m = build_u_kernel(o.n, o.limits.max_dim).matrix();
  } else if (o.kind == "T") {
    m = build_t(s.size()).matrix();
  } else if (o.kind == "D") {
    m = build_d(build_weights(s).d).matrix();
  } else {
    const SymmetricMatrix u = build_u(s, o.limits.max_dim);
    const auto d = build_weights(s).d;
    if (o.kind == "U") m = u.matrix();
    else if (o.kind == "K") m = build_k(u, d).matrix();
    else if (o.kind == "Kinv") m = build_k_inverse(u, d).matrix();
    else if (o.kind == "M") m = build_m(u, build_t(s.size())).matrix();
    else throw UsageError("unknown --kind '" + o.kind + "'");
  }
  emit(o.out_path, out, [&](std::ostream& os) { write_matrix_dump(os, o.kind, o.n, m); });
  return kSuccess;
}

int cmd_spectrum(const Options& o, std::ostream& out) {
  if (o.n == 0) throw UsageError("--n must be >= 1");
  const SpectrumKind kind = parse_spectrum_kind(o.kind);
  const ExperimentContext ctx(1, o.limits);
  const SpectrumResult spectrum = top_spectrum(o.n, kind, o.top, ctx);
  nlohmann::ordered_json j;
  j["n"] = o.n;
  j["kind"] = to_string(kind);
  j["eigenvalues"] = spectrum.eigenvalues;
  j["residual_max"] = spectrum.residual_max();
  if (o.eigvecs) {
    const std::string path = o.eigvecs_out.empty()
                                 ? "eigvecs-n" + std::to_string(o.n) + "-" + to_string(kind) + ".txt"
                                 : o.eigvecs_out;
    emit(path, out, [&](std::ostream& os) {
      write_eigvec_sidecar(os, o.n, to_string(kind), spectrum);
    });
    j["eigvecs"] = path;
  }
  out << j.dump() << '\n';
  return kSuccess;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  SweepConfig config;
  config.k_min = o.k_min;
  config.k_max = o.k_max;
  config.step = o.step;
  config.kind = parse_spectrum_kind(o.kind);
  config.workers = o.workers;
  config.log_base = parse_log_base(o.log_base);
  if (config.k_min < 2 || config.k_max < config.k_min || config.step == 0) {
    throw UsageError("sweep needs 2 <= --k-min <= --k-max and --step >= 1");
  }
  const ExperimentContext ctx(config.k_max * config.k_max, o.limits);
  const auto records = sweep(config, ctx);

  const std::string provenance =
      "sweep k_min=" + std::to_string(config.k_min) + " k_max=" + std::to_string(config.k_max) +
      " step=" + std::to_string(config.step) + " matrix=" + to_string(config.kind) +
      " log_base=" + to_string(config.log_base) + " " + limits_config(o.limits);
  emit(o.out_path, out, [&](std::ostream& os) { write_sweep_csv(os, records, provenance); });

  const auto failures = std::count_if(records.begin(), records.end(),
                                      [](const SweepRecord& r) { return !r.ok(); });
  if (config.kind == SpectrumKind::Kinv && records.size() - failures >= 10) {
    const ProbeSummary p = conjecture_probe(records);
    err << "probe: records=" << p.records << " alpha=" << format_shortest(p.alpha)
        << " max_norm_over_ln_n=" << format_shortest(p.max_norm_over_log_n)
        << " at n=" << p.argmax_n << " ratio_trend=" << format_shortest(p.ratio_trend) << '\n';
  }
  if (failures > 0) {
    err << "sweep: " << failures << " of " << records.size() << " rows failed\n";
    // a numerical breakdown outranks rows that merely exceeded a limit
    const bool numerical = std::any_of(records.begin(), records.end(), [](const SweepRecord& r) {
      return r.status == "error:singular" || r.status == "error:no_convergence" ||
             r.status == "error:internal";
    });
    return numerical ? kNumericalFailure : kUsageError;
  }
  return kSuccess;
}

int cmd_verify(const Options& o, std::ostream& out) {
  std::vector<std::uint64_t> ns;
  if (o.n != 0) {
    ns.push_back(o.n);
  } else {
    if (o.k_min < 1 || o.k_max < o.k_min) {
      throw UsageError("verify needs --n or 1 <= --k-min <= --k-max");
    }
    for (std::uint64_t k = o.k_min; k <= o.k_max; ++k) ns.push_back(k * k);
  }
  for (auto n : ns) perfect_square_root(n);
  const ExperimentContext ctx(*std::max_element(ns.begin(), ns.end()), o.limits);
  std::size_t passed = 0;
  for (auto n : ns) {
    const auto report = verify_identities(n, ctx);
    print_report(report, out);
    if (report.all_passed()) ++passed;
  }
  out << "verify: " << passed << "/" << ns.size() << " values of n passed\n";
  return passed == ns.size() ? kSuccess : kVerificationFailure;
}

int cmd_fit_curve(const Options& o, std::ostream& out) {
  FitCurveConfig config = o.fit;
  config.log_base = parse_log_base(o.log_base);
  const auto grid = log_spaced_grid(o.n_min, o.n_max, o.points);
  const auto samples = fit_overlay(grid, config);
  std::ostringstream provenance;
  provenance << "fit-curve n_min=" << format_shortest(o.n_min)
             << " n_max=" << format_shortest(o.n_max) << " points=" << o.points
             << " amplitude=" << format_shortest(config.amplitude)
             << " omega=" << format_shortest(config.angular_frequency)
             << " phase=" << format_shortest(config.phase)
             << " ref_amplitude=" << format_shortest(config.reference_amplitude)
             << " ref_phase=" << format_shortest(config.reference_phase)
             << " log_base=" << to_string(config.log_base);
  emit(o.out_path, out, [&](std::ostream& os) { write_fit_curve(os, samples, provenance.str()); });
  return kSuccess;
}

int cmd_kernel_hs(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<KernelReportRow> rows;
  for (double eps : o.epsilons) {
    QuadratureGrid grid = default_grid(eps, o.cells);
    if (o.grading > 0.0) grid.grading = o.grading;
    const auto q = hs_norm({KernelVariant::k_eps, eps}, grid);
    if (q.flagged) {
      err << "warning: epsilon=" << format_shortest(eps) << " two-grid error "
          << format_shortest(q.two_grid_error) << " exceeds 5% of the norm\n";
    }
    rows.push_back({eps, std::nullopt, q.value, bound_integral(eps), q.two_grid_error});
  }
  const std::string provenance = "kernel-hs epsilon=" + join(o.epsilons) +
                                 " cells=" + std::to_string(o.cells) +
                                 " grading=" + (o.grading > 0.0 ? format_shortest(o.grading) : "auto");
  emit(o.out_path, out, [&](std::ostream& os) { write_kernel_report(os, rows, provenance); });
  return kSuccess;
}

int cmd_kernel_distance(const Options& o, std::ostream& out) {
  std::vector<KernelReportRow> rows;
  const double grading = o.grading > 0.0 ? o.grading : 2.0;
  for (double eps : o.epsilons) {
    for (double delta : o.deltas) {
      const auto q = hs_distance_truncated(eps, std::nullopt, delta, o.cells, grading);
      rows.push_back({eps, delta, q.value, std::nullopt, q.two_grid_error});
    }
  }
  const std::string provenance = "kernel-distance eps_list=" + join(o.epsilons) +
                                 " delta_list=" + join(o.deltas) +
                                 " cells=" + std::to_string(o.cells) +
                                 " grading=" + format_shortest(grading);
  emit(o.out_path, out, [&](std::ostream& os) { write_kernel_report(os, rows, provenance); });
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Mertens matrix spectra laboratory", "mertens"};
  app.require_subcommand(1);
  app.fallthrough();

  try {
    o.limits.max_dim = default_max_dim();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  app.add_option("--sieve-limit", o.limits.sieve_limit, "maximum sieve bound")
      ->check(CLI::PositiveNumber);
  app.add_option("--max-dim", o.limits.max_dim,
                 "maximum dense matrix dimension (env MERTENS_SPECTRA_MAX_DIM)")
      ->check(CLI::PositiveNumber);

  auto* mertens = app.add_subcommand("mertens", "print M(N)");
  mertens->add_option("--n", o.n, "argument N")->required();
  mertens->add_option("--table", o.table_out, "also write n,mu,mertens for 1..N as CSV");

  auto* matrix = app.add_subcommand("matrix", "dump a matrix in the v1 format");
  matrix->add_option("--n", o.n)->required()->check(CLI::PositiveNumber);
  matrix->add_option("--kind", o.kind)
      ->required()
      ->check(CLI::IsMember({"U", "Uk", "T", "D", "K", "Kinv", "M"}));
  matrix->add_option("--out", o.out_path);

  auto* spectrum = app.add_subcommand("spectrum", "top eigenvalues as JSON");
  spectrum->add_option("--n", o.n)->required()->check(CLI::PositiveNumber);
  spectrum->add_option("--matrix", o.kind)->required()->check(CLI::IsMember({"M", "Kinv"}));
  spectrum->add_option("--top", o.top, "number of eigenvalues")->check(CLI::PositiveNumber);
  spectrum->add_flag("--eigvecs", o.eigvecs, "write the eigenvector sidecar");
  spectrum->add_option("--eigvecs-out", o.eigvecs_out, "sidecar path");

  auto* sweep_cmd = app.add_subcommand("sweep", "spectra over n = k^2");
  sweep_cmd->add_option("--k-min", o.k_min)->required();
  sweep_cmd->add_option("--k-max", o.k_max)->required();
  sweep_cmd->add_option("--step", o.step);
  sweep_cmd->add_option("--matrix", o.kind)->required()->check(CLI::IsMember({"M", "Kinv"}));
  sweep_cmd->add_option("--out", o.out_path)->required();
  sweep_cmd->add_option("--workers", o.workers)->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--log-base", o.log_base)->check(CLI::IsMember({"e", "10"}));

  auto* verify = app.add_subcommand("verify", "identity suite");
  auto* verify_n = verify->add_option("--n", o.n)->check(CLI::PositiveNumber);
  auto* verify_kmin = verify->add_option("--k-min", o.k_min);
  auto* verify_kmax = verify->add_option("--k-max", o.k_max);
  verify_n->excludes(verify_kmin)->excludes(verify_kmax);
  verify_kmin->needs(verify_kmax);
  verify_kmax->needs(verify_kmin);

  auto* fit = app.add_subcommand("fit-curve", "sample the oscillation overlay");
  fit->add_option("--n-min", o.n_min)->required();
  fit->add_option("--n-max", o.n_max)->required();
  fit->add_option("--points", o.points)->required()->check(CLI::PositiveNumber);
  fit->add_option("--amplitude", o.fit.amplitude);
  fit->add_option("--omega", o.fit.angular_frequency);
  fit->add_option("--phase", o.fit.phase);
  fit->add_option("--ref-amplitude", o.fit.reference_amplitude);
  fit->add_option("--ref-phase", o.fit.reference_phase);
  fit->add_option("--log-base", o.log_base)->check(CLI::IsMember({"e", "10"}));
  fit->add_option("--out", o.out_path)->required();

  auto* kernel_hs = app.add_subcommand("kernel-hs", "Hilbert-Schmidt norms of k_eps");
  kernel_hs->add_option("--epsilon", o.epsilons)->required()->delimiter(',');
  kernel_hs->add_option("--cells", o.cells);
  kernel_hs->add_option("--grading", o.grading, "grading exponent (default max(2, 1/eps))");
  kernel_hs->add_option("--out", o.out_path);

  auto* kernel_distance =
      app.add_subcommand("kernel-distance", "truncated L2 distances ||k_eps - k||");
  kernel_distance->add_option("--eps-list", o.epsilons)->required()->delimiter(',');
  kernel_distance->add_option("--delta-list", o.deltas)->required()->delimiter(',');
  kernel_distance->add_option("--cells", o.cells);
  kernel_distance->add_option("--grading", o.grading);
  kernel_distance->add_option("--out", o.out_path)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "usage error: " << msg << '\n';
    return kUsageError;
  }

  try {
    if (*mertens) return cmd_mertens(o, out);
    if (*matrix) return cmd_matrix(o, out);
    if (*spectrum) return cmd_spectrum(o, out);
    if (*sweep_cmd) return cmd_sweep(o, out, err);
    if (*verify) return cmd_verify(o, out);
    if (*fit) return cmd_fit_curve(o, out);
    if (*kernel_hs) return cmd_kernel_hs(o, out, err);
    if (*kernel_distance) return cmd_kernel_distance(o, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const CapacityError& e) {
    err << "capacity error: " << e.what() << '\n';
    return kUsageError;
  } catch (const SingularMatrixError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const ConvergenceError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kUsageError;
}

}  // namespace mertens::cli
