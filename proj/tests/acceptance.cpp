// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mertens/cli.hpp"
#include "mertens/dense_linalg.hpp"
#include "mertens/experiments.hpp"
#include "mertens/io.hpp"
#include "mertens/kernel_ops.hpp"
#include "mertens/matrix_builder.hpp"

using namespace mertens;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool passed = true;
  std::string detail;
};

int failures = 0;

void criterion(const std::string& id, double time_limit_s, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome result;
  try {
    result = body();
  } catch (const std::exception& e) {
    result = {false, std::string("exception: ") + e.what()};
  }
  const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  if (time_limit_s > 0 && elapsed > time_limit_s) {
    result.passed = false;
    result.detail += " [over time limit " + format_shortest(time_limit_s) + " s]";
  }
  if (!result.passed) ++failures;
  std::ostringstream line;
  line.precision(3);
  line << std::fixed << id << ' ' << (result.passed ? "PASS" : "FAIL") << ' ' << result.detail
       << " (" << elapsed << " s)";
  std::cout << line.str() << std::endl;
}

// Worst value of a named check over k = k_lo..k_hi, failing on the first miss.
Outcome check_range(const std::vector<VerificationReport>& reports,
                    const std::vector<std::string>& names) {
  Outcome out;
  std::vector<double> worst(names.size(), 0.0);
  for (const auto& report : reports) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      const CheckResult* c = report.find(names[i]);
      if (c == nullptr || !c->passed) {
        out.passed = false;
        out.detail = "n=" + std::to_string(report.n) + " " + names[i] +
                     (c ? " discrepancy=" + format_shortest(c->discrepancy) + " " + c->detail
                        : " missing");
        return out;
      }
      worst[i] = std::max(worst[i], c->discrepancy);
    }
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    out.detail += names[i] + " max_discrepancy=" + format_shortest(worst[i]) + " ";
  }
  out.detail += "over " + std::to_string(reports.size()) + " values of n";
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

int main() {
  const ExperimentContext ctx(40 * 40);
  std::vector<VerificationReport> reports;

  criterion("A1", 30.0, [&] {
    for (std::uint64_t k = 2; k <= 40; ++k) reports.push_back(verify_identities(k * k, ctx));
    return check_range(reports, {"I1-exact", "I1-float"});
  });

  criterion("A2", 0, [&] { return check_range(reports, {"I2"}); });

  criterion("A3", 0, [&] { return check_range(reports, {"B1", "B2"}); });

  criterion("A4", 0, [&] {
    Outcome out = check_range(reports, {"O1"});
    const auto s = divisor_value_set(4);
    const auto m4 = build_m(build_u(s), build_t(s.size()));
    const Matrix hand = Matrix::from_rows({{-1, 0, 1}, {0, 1, 0}, {1, 0, 0}});
    const double dev = max_abs_difference(m4.matrix(), hand);
    if (dev > 1e-12) out.passed = false;
    out.detail += "; n=4 hand matrix deviation=" + format_shortest(dev);
    return out;
  });

  criterion("A5", 0, [&] {
    for (std::uint64_t k = 2; k <= 60; ++k) {
      if (const auto miss = compare_u_constructions(k * k)) {
        return Outcome{false, "first counterexample n=" + std::to_string(k * k) + " entry (" +
                                  std::to_string(miss->row) + "," + std::to_string(miss->col) +
                                  ") S-indexed=" + format_shortest(miss->s_indexed) +
                                  " kernel-indexed=" + format_shortest(miss->kernel_indexed)};
      }
    }
    return Outcome{true, "S-indexed and kernel-indexed U agree for k=2..60"};
  });

  criterion("A6", 60.0, [&] {
    Outcome out;
    for (double eps : {0.05, 0.1, 0.25, 0.4}) {
      const auto hs = hs_norm({KernelVariant::k_eps, eps}, default_grid(eps));
      const double bound = bound_integral(eps);
      const double excess = std::abs(4 * eps * bound - 1.0);
      const bool ok = hs.value <= 1.01 * bound && excess <= 2.1 * eps / (1 - eps);
      out.passed = out.passed && ok;
      out.detail += "eps=" + format_shortest(eps) + " hs=" + format_shortest(hs.value) +
                    " bound=" + format_shortest(bound) + (ok ? "" : " MISS") + "; ";
    }
    return out;
  });

  criterion("A7", 0, [&] {
    const ExperimentContext small(4);
    const double m4 = top_spectrum(4, SpectrumKind::M, 1, small).eigenvalues.at(0);
    const double k4 = top_spectrum(4, SpectrumKind::Kinv, 1, small).eigenvalues.at(0);
    const bool ok = std::abs(std::abs(m4) - 1.618) <= 0.001 && std::abs(std::abs(k4) - 2.170) <= 0.01;
    return Outcome{ok, "||M_4||=" + format_shortest(std::abs(m4)) +
                           " ||K_4^-1||=" + format_shortest(std::abs(k4))};
  });

  criterion("A8", 600.0, [&] {
    SweepConfig config;
    config.k_min = 10;
    config.k_max = 120;
    config.kind = SpectrumKind::Kinv;
    config.workers = 1;
    const ExperimentContext wide(config.k_max * config.k_max);
    const auto records = sweep(config, wide);
    const auto failed = std::count_if(records.begin(), records.end(),
                                      [](const SweepRecord& r) { return !r.ok(); });
    if (failed > 0) return Outcome{false, std::to_string(failed) + " sweep rows failed"};
    const ProbeSummary p = conjecture_probe(records);
    return Outcome{p.alpha < 0.5, "alpha=" + format_shortest(p.alpha) + " (gate alpha < 0.5)" +
                                      " max ||K^-1||/ln n=" + format_shortest(p.max_norm_over_log_n) +
                                      " at n=" + std::to_string(p.argmax_n)};
  });

  criterion("A9", 0, [&] {
    const fs::path dir = fs::temp_directory_path() / "mertens-acceptance";
    fs::create_directories(dir);
    std::vector<std::string> outputs;
    for (const char* workers : {"1", "2", "3", "8"}) {
      const fs::path path = dir / (std::string("sweep-w") + workers + ".csv");
      std::ostringstream out, err;
      const int code = cli::run({"sweep", "--k-min", "2", "--k-max", "60", "--matrix", "Kinv",
                                 "--workers", workers, "--out", path.string()},
                                out, err);
      if (code != 0) return Outcome{false, "sweep exited " + std::to_string(code) + ": " + err.str()};
      outputs.push_back(slurp(path));
    }
    const bool same = std::all_of(outputs.begin(), outputs.end(),
                                  [&](const std::string& s) { return s == outputs.front(); });
    return Outcome{same && !outputs.front().empty(),
                   std::string(same ? "identical" : "differing") + " CSVs for workers 1,2,3,8 (" +
                       std::to_string(outputs.front().size()) + " bytes)"};
  });

  std::cout << (failures == 0 ? "acceptance: all criteria passed"
                              : "acceptance: " + std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
