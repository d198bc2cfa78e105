#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mertens/errors.hpp"
#include "mertens/experiments.hpp"
#include "mertens/io.hpp"

using namespace mertens;

TEST_CASE("verify_identities at n = 4") {
  const ExperimentContext ctx(4);
  const auto report = verify_identities(4, ctx);
  CHECK(report.mertens_n == -1);
  CHECK(report.all_passed());
  for (const char* name : {"SYM", "I1-exact", "I1-float", "I2", "I3", "O1", "E1", "B1", "B2", "W1"}) {
    const auto* c = report.find(name);
    REQUIRE_MESSAGE(c != nullptr, name);
    CHECK_MESSAGE(c->passed, name);
  }
  CHECK(report.find("I1-exact")->discrepancy == 0.0);
  CHECK(report.find("DET")->report_only);
  CHECK(report.find("DET")->detail == "det U = -1");
}

TEST_CASE("verify_identities at n = 1 and n = 1600") {
  const ExperimentContext ctx(1600);
  const auto one = verify_identities(1, ctx);
  CHECK(one.mertens_n == 1);
  CHECK(one.all_passed());
  const auto big = verify_identities(1600, ctx);
  CHECK(big.all_passed());
  CHECK(big.find("I1-exact")->discrepancy == 0.0);
}

TEST_CASE("verify_identities rejects non-squares") {
  const ExperimentContext ctx(100);
  CHECK_THROWS_AS(verify_identities(10, ctx), DomainError);
  CHECK_THROWS_AS(verify_identities(0, ctx), DomainError);
}

TEST_CASE("verify_identities reports build failures as failed checks") {
  const ExperimentContext ctx(400, Limits{kDefaultMaxSieveLimit, 10});
  const auto report = verify_identities(400, ctx);
  CHECK_FALSE(report.all_passed());
  REQUIRE(report.find("BUILD") != nullptr);
  CHECK(report.find("BUILD")->detail.rfind("error:capacity", 0) == 0);
}

TEST_CASE("construction equality reports no counterexample up to k = 60") {
  for (std::uint64_t r = 1; r <= 60; ++r) REQUIRE_FALSE(compare_u_constructions(r * r).has_value());
}

TEST_CASE("top_spectrum") {
  const ExperimentContext ctx(16);
  const auto kinv = top_spectrum(4, SpectrumKind::Kinv, 8, ctx);
  REQUIRE(kinv.eigenvalues.size() == 3);
  CHECK(kinv.eigenvalues[0] == doctest::Approx(2.170).epsilon(0.005));
  CHECK(kinv.eigenvalues[1] == doctest::Approx(-1.481).epsilon(0.007));
  CHECK(kinv.eigenvalues[2] == doctest::Approx(0.311).epsilon(0.03));

  const auto m1 = top_spectrum(1, SpectrumKind::M, 8, ctx);
  CHECK(m1.eigenvalues == std::vector<double>{1});

  const auto m4 = top_spectrum(4, SpectrumKind::M, 8, ctx);
  REQUIRE(m4.eigenvalues.size() == 3);
  CHECK(m4.eigenvalues[0] == doctest::Approx(-(1 + std::sqrt(5.0)) / 2));
  CHECK(m4.eigenvalues[1] == doctest::Approx(1.0));
  CHECK(m4.eigenvalues[2] == doctest::Approx((std::sqrt(5.0) - 1) / 2));

  CHECK_THROWS_AS(top_spectrum(5, SpectrumKind::M, 8, ctx), DomainError);
}

TEST_CASE("top_spectrum agrees with a full decomposition") {
  const ExperimentContext ctx(625);
  const auto f = build_family(625);
  const auto full = sym_eig(f.m, f.m.dim());
  const auto top = top_spectrum(625, SpectrumKind::M, 8, ctx);
  for (std::size_t i = 0; i < 8; ++i) CHECK(top.eigenvalues[i] == full.eigenvalues[i]);
}

TEST_CASE("sweep over k = 2, 3") {
  const ExperimentContext ctx(9);
  SweepConfig config;
  config.k_min = 2;
  config.k_max = 3;
  const auto records = sweep(config, ctx);
  REQUIRE(records.size() == 2);
  CHECK(records[0].n == 4);
  CHECK(records[1].n == 9);
  CHECK(records[0].spectral_norm == doctest::Approx(1.618).epsilon(0.001));
  CHECK(records[0].eig[2].has_value());
  CHECK_FALSE(records[0].eig[3].has_value());
  CHECK_FALSE(records[0].bound_rhs.has_value());
}

TEST_CASE("sweep record invariants and hard bounds") {
  const ExperimentContext ctx(45 * 45);
  for (SpectrumKind kind : {SpectrumKind::M, SpectrumKind::Kinv}) {
    SweepConfig config;
    config.k_min = 2;
    config.k_max = 45;
    config.kind = kind;
    config.workers = 3;
    const auto records = sweep(config, ctx);
    REQUIRE(records.size() == 44);
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& rec = records[i];
      REQUIRE(rec.ok());
      REQUIRE(rec.k == config.k_min + i);
      REQUIRE(rec.n == rec.k * rec.k);
      REQUIRE(rec.mertens_n == ctx.mertens(rec.n));
      REQUIRE(std::abs(rec.spectral_norm - std::abs(*rec.eig[0])) <= 1e-12);
      for (std::size_t s = 1; s < kSweepSlots; ++s) {
        if (!rec.eig[s]) continue;
        REQUIRE(std::abs(*rec.eig[s]) <= std::abs(*rec.eig[s - 1]));
      }
      REQUIRE(rec.spectral_norm <= rec.frobenius_norm);
      if (kind == SpectrumKind::M) {
        REQUIRE(static_cast<double>(std::abs(rec.mertens_n)) <= rec.spectral_norm);
      } else {
        REQUIRE(rec.bound_rhs.has_value());
        REQUIRE(static_cast<double>(std::abs(rec.mertens_n)) <= *rec.bound_rhs);
      }
    }
  }
}

TEST_CASE("sweep output does not depend on the worker count") {
  const ExperimentContext ctx(30 * 30);
  SweepConfig config;
  config.k_min = 2;
  config.k_max = 30;
  config.kind = SpectrumKind::Kinv;
  std::ostringstream one, many;
  write_sweep_csv(one, sweep(config, ctx), "test");
  config.workers = 5;
  write_sweep_csv(many, sweep(config, ctx), "test");
  CHECK(one.str() == many.str());
}

TEST_CASE("sweep records per-k failures and continues") {
  const ExperimentContext ctx(100, Limits{kDefaultMaxSieveLimit, 11});
  SweepConfig config;
  config.k_min = 5;
  config.k_max = 7;
  const auto records = sweep(config, ctx);
  REQUIRE(records.size() == 3);
  CHECK(records[0].ok());
  CHECK(records[1].ok());
  CHECK(records[2].status == "error:capacity");

  config.k_min = 1;
  CHECK_THROWS_AS(sweep(config, ctx), DomainError);
}

TEST_CASE("fit overlay") {
  const double small[] = {16.0};
  const auto at16 = fit_overlay(small);
  CHECK(std::abs(at16[0].overlay) <= 1.05 * std::sqrt(std::log(std::log(std::log(16.0)))));
  CHECK(std::abs(at16[0].overlay) <= 0.17);

  const double hundred[] = {100.0};
  const auto at100 = fit_overlay(hundred);
  CHECK(at100[0].overlay == doctest::Approx(0.681).epsilon(0.005 / 0.681));
  // 0.36 cos(14.14 ln 100 - 1.69), evaluated independently
  CHECK(at100[0].reference_term == doctest::Approx(0.29808232662314327).epsilon(1e-12));

  const double bad[] = {15.9};
  CHECK_THROWS_AS(fit_overlay(bad), DomainError);
}

TEST_CASE("fit overlay matches a direct reimplementation") {
  const auto grid = log_spaced_grid(16, 1e8, 500);
  CHECK(grid.front() == 16.0);
  CHECK(grid.back() == 1e8);
  const auto samples = fit_overlay(grid);
  for (const auto& s : samples) {
    const double ln = std::log(s.n);
    const double overlay = 1.05 * std::cos(14.14 * ln - 2.2) * std::sqrt(std::log(std::log(ln)));
    const double reference = 0.36 * std::cos(14.14 * ln - 1.69);
    REQUIRE(std::abs(s.overlay - overlay) <= 1e-12);
    REQUIRE(std::abs(s.reference_term - reference) <= 1e-12);
  }

  FitCurveConfig ten;
  ten.log_base = LogBase::ten;
  const double x[] = {1000.0};
  CHECK(fit_overlay(x, ten)[0].reference_term ==
        doctest::Approx(0.36 * std::cos(14.14 * 3.0 - 1.69)).epsilon(1e-12));
}

TEST_CASE("conjecture probe") {
  std::vector<SweepRecord> constant, logarithmic;
  for (std::uint64_t k = 10; k < 22; ++k) {
    SweepRecord rec;
    rec.k = k;
    rec.n = k * k;
    rec.kind = SpectrumKind::Kinv;
    rec.spectral_norm = 2.5;
    constant.push_back(rec);
    rec.spectral_norm = std::log(static_cast<double>(rec.n));
    logarithmic.push_back(rec);
  }
  const auto flat = conjecture_probe(constant);
  CHECK(flat.records == 12);
  CHECK(std::abs(flat.alpha) <= 1e-14);

  const auto ln = conjecture_probe(logarithmic);
  CHECK(ln.max_norm_over_log_n == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(ln.ratio_trend) <= 1e-14);

  constant.resize(9);
  CHECK_THROWS_AS(conjecture_probe(constant), DomainError);
}
