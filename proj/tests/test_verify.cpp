#include <catch_amalgamated.hpp>

#include "pnspec/verify.hpp"

using namespace pnspec;

TEST_CASE("sign calibration is unique") {
  const auto rep = calibrate(calibration_reference_case(), 1);
  CHECK(rep.chosen.s_k == 1);
  CHECK(rep.chosen.s_0 == -1);
  REQUIRE(rep.candidates.size() == 4);
  int qualifying = 0;
  for (const auto& c : rep.candidates) {
    if (c.qualifies) ++qualifying;
    // Each wrong pair fails at least one criterion by a wide margin.
    if (!c.qualifies) CHECK(std::max(c.nijenhuis_residual, c.kks_orientation) > 1e-2);
  }
  CHECK(qualifying == 1);
  const auto again = calibrate(calibration_reference_case(), 1);
  for (std::size_t i = 0; i < 4; ++i) CHECK(again.candidates[i].nijenhuis_residual == rep.candidates[i].nijenhuis_residual);
}

TEST_CASE("C+ pattern on su(n)") {
  for (std::size_t n : {2, 3, 4}) CHECK(c_plus_pattern_residual(build_algebra(Family::A, n), 10, 5) <= 1e-12);
  CHECK_THROWS_AS(c_plus_pattern_residual(build_algebra(Family::C, 2), 1, 1), UsageError);
}

TEST_CASE("vertex probe") {
  for (const auto& p : std::vector<CaseParams>{{CaseFamily::AIII, 2, 4}, {CaseFamily::CI, 0, 2}, {CaseFamily::DIII, 0, 3},
                                               {CaseFamily::BDI, 0, 3}, {CaseFamily::BDI, 0, 4}}) {
    const auto cs = build_case(p);
    INFO(cs.name());
    const auto vp = vertex_probe(cs);
    CHECK(vp.vertex_residual <= 1e-10);
    CHECK(vp.identity_residual <= 1e-10);
    CHECK(vp.points == vp.vertices.size());
  }
}

TEST_CASE("suite passes and reports in the JSON schema") {
  SuiteOptions opt;
  opt.samples = 12;
  opt.fd_points = 4;
  opt.lenard_points = 3;
  opt.jacobi_triples = 3;
  opt.coset_points = 3;
  for (const auto& p : std::vector<CaseParams>{{CaseFamily::AIII, 1, 3}, {CaseFamily::CI, 0, 2}, {CaseFamily::DIII, 0, 3},
                                               {CaseFamily::BDI, 0, 4}}) {
    const auto cs = build_case(p);
    INFO(cs.name());
    const auto rep = run_suite(cs, opt);
    for (const auto& c : rep.checks) {
      INFO(c.name << " " << c.max_residual);
      CHECK(c.pass);
    }
    CHECK(rep.passed());
    const auto j = to_json(rep);
    CHECK(j["case"] == cs.name());
    CHECK(j["calibration"]["s_K"] == 1);
    CHECK(j["calibration"]["s_0"] == -1);
    CHECK(j["samples"] == 12);
    CHECK(j["checks"].is_array());
    CHECK(j["checks"][0].contains("max_residual"));
    CHECK(j["checks"][0].contains("skipped"));
    CHECK(j["ranges"].contains("pencil"));
    if (cs.family() == CaseFamily::BDI) {
      CHECK(rep.find("spin_minor") != nullptr);
      CHECK(rep.find("connection")->skipped > 0);
    }
  }
}

TEST_CASE("zero tolerance makes the suite fail") {
  SuiteOptions opt;
  opt.samples = 3;
  opt.fd_points = 1;
  opt.lenard_points = 1;
  opt.jacobi_triples = 1;
  opt.tolerances["master_equation"] = 0.0;
  const auto rep = run_suite(build_case({CaseFamily::CI, 0, 2}), opt);
  CHECK_FALSE(rep.passed());
  CHECK_FALSE(rep.find("master_equation")->pass);
}

TEST_CASE("DIII range measurement") {
  const auto nf = measure_diii_range(3, 300, 1, Calibration{});
  CHECK(nf.observed.min >= -1e-9);
  CHECK(nf.observed.max <= 2.0 + 1e-9);
  CHECK(nf.matches == "[0,2]");
  CHECK(nf.distance_half < nf.distance_printed);
}
