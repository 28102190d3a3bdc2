// Acceptance run: one PASS/FAIL line per criterion, detail lines indented.
// Optional argument: polytope samples per case (default 100000).

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "pnspec/verify.hpp"

using namespace pnspec;

namespace {

struct Criterion {
  std::string title;
  bool pass = true;
  std::vector<std::string> details;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::vector<CaseParams> acceptance_cases() {
  return {{CaseFamily::AIII, 1, 2}, {CaseFamily::AIII, 1, 3}, {CaseFamily::AIII, 2, 4},
          {CaseFamily::CI, 0, 1},   {CaseFamily::CI, 0, 2},   {CaseFamily::CI, 0, 3},
          {CaseFamily::DIII, 0, 2}, {CaseFamily::DIII, 0, 3}, {CaseFamily::DIII, 0, 4},
          {CaseFamily::BDI, 0, 3},  {CaseFamily::BDI, 0, 4},  {CaseFamily::BDI, 0, 5}};
}

double residual(const VerificationReport& rep, const char* name) {
  const auto* c = rep.find(name);
  return c ? c->max_residual : INFINITY;
}

std::size_t evaluated(const VerificationReport& rep, const char* name) {
  const auto* c = rep.find(name);
  return c ? c->evaluated : 0;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t polytope_samples = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 100000;
  using clock = std::chrono::steady_clock;

  std::vector<Criterion> crit(10);
  crit[0].title = "pencil-chain agreement";
  crit[1].title = "eigenvalue doubling";
  crit[2].title = "master equation and connection";
  crit[3].title = "compatibility (Jacobi of the pencil)";
  crit[4].title = "involution of chain eigenvalues";
  crit[5].title = "interlacing, polytopes, vertex probe";
  crit[6].title = "convention fidelity";
  crit[7].title = "spin representation";
  crit[8].title = "Lenard recursion and trace identity";
  crit[9].title = "DIII normalization finding";

  Calibration cal;
  bool calibrated = false;
  try {
    const auto cr = calibrate(calibration_reference_case(), 1);
    cal = cr.chosen;
    calibrated = true;
    for (const auto& c : cr.candidates) {
      crit[2].details.push_back(fmt("     candidate s_K=%+.0f s_0=%+.0f", c.signs.s_k, c.signs.s_0) +
                                fmt(": nijenhuis %.2e, kks %.2e", c.nijenhuis_residual, c.kks_orientation) +
                                (c.qualifies ? " (chosen)" : ""));
    }
  } catch (const ConventionError& e) {
    crit[2].details.push_back(e.what());
  }
  crit[2].require(calibrated, "sign calibration unique");

  for (std::size_t n = 2; n <= 5; ++n) {
    const double r = c_plus_pattern_residual(build_algebra(Family::A, n), 20, 1);
    crit[6].require(r <= 1e-12, "su(" + std::to_string(n) + ") C+ closed form " + fmt("%.2e", r));
  }

  for (const auto& p : acceptance_cases()) {
    const auto t0 = clock::now();
    const CaseSpec cs = build_case(p);
    SuiteOptions opt;
    opt.samples = 100;
    opt.seed = 1;
    opt.calibration = cal;
    const auto rep = run_suite(cs, opt);
    const double seconds = std::chrono::duration<double>(clock::now() - t0).count();
    const std::string name = cs.name() + " ";

    crit[0].require(residual(rep, "pencil_chain") <= 1e-7 && evaluated(rep, "pencil_chain") == 100 && seconds < 60.0,
                    name + fmt("max |diff| %.2e, %.1f s", residual(rep, "pencil_chain"), seconds));
    crit[1].require(residual(rep, "doubling") <= 1e-8 && residual(rep, "pencil_imag") <= 1e-8,
                    name + fmt("pair gap %.2e, imag %.2e", residual(rep, "doubling"), residual(rep, "pencil_imag")));
    crit[2].require(residual(rep, "master_equation") <= 1e-8 && evaluated(rep, "master_equation") == 100,
                    name + fmt("master equation %.2e", residual(rep, "master_equation")));
    if (evaluated(rep, "connection") > 0) {
      crit[2].require(residual(rep, "connection") <= 1e-8, name + fmt("block connection %.2e", residual(rep, "connection")));
    } else {
      crit[2].details.push_back("     " + name + "block connection not applicable (full form only)");
    }
    crit[3].require(residual(rep, "jacobi_bruhat") <= 1e-5 && residual(rep, "jacobi_pencil") <= 1e-5 &&
                        evaluated(rep, "jacobi_pencil") == 20,
                    name + fmt("t=0 %.2e, t=1 %.2e", residual(rep, "jacobi_bruhat"), residual(rep, "jacobi_pencil")));
    crit[4].require(residual(rep, "involution_bruhat") <= 1e-5 && residual(rep, "involution_kks") <= 1e-5 &&
                        evaluated(rep, "involution_kks") >= 50,
                    name + fmt("bruhat %.2e, kks %.2e", residual(rep, "involution_bruhat"), residual(rep, "involution_kks")) +
                        " over " + std::to_string(evaluated(rep, "involution_kks")) + " regular points");
    crit[5].require(residual(rep, "vertex_probe") <= 1e-10 && residual(rep, "identity_coset") <= 1e-10,
                    name + fmt("vertex probe %.2e, identity %.2e", residual(rep, "vertex_probe"),
                               residual(rep, "identity_coset")));
    crit[6].require(cs.rho_compatibility <= 1e-10, name + fmt("J vs ad_rho on h-perp %.2e", cs.rho_compatibility));
    crit[8].require(residual(rep, "lenard") <= 1e-5 && residual(rep, "trace_identity") <= 1e-9 &&
                        evaluated(rep, "lenard") > 0,
                    name + fmt("lenard %.2e, trace %.2e", residual(rep, "lenard"), residual(rep, "trace_identity")));
    if (cs.family() == CaseFamily::BDI) {
      const bool ok = residual(rep, "clifford") <= 1e-13 && residual(rep, "spin_homomorphism") <= 1e-10 &&
                      residual(rep, "last_rotation") <= 1e-12 && residual(rep, "spin_weights") <= 1e-10 &&
                      residual(rep, "spin_minor") <= 1e-9;
      crit[7].require(ok, name + fmt("clifford %.1e, hom %.1e", residual(rep, "clifford"),
                                     residual(rep, "spin_homomorphism")) +
                              fmt(", last rotation %.1e, weights %.1e", residual(rep, "last_rotation"),
                                  residual(rep, "spin_weights")) +
                              fmt(", minors %.1e", residual(rep, "spin_minor")));
    }

    const auto tp = clock::now();
    std::size_t violations = 0;
    double min_margin = INFINITY;
    for (std::size_t i = 0; i < polytope_samples; ++i) {
      const auto pt = random_point(cs, sample_seed(2, i));
      const auto poly = polytope_membership(cs, chain_spectrum(cs, pt.m, {1e-9, false}), 1e-9);
      violations += poly.violations;
      min_margin = std::min(min_margin, poly.min_margin);
    }
    const double psec = std::chrono::duration<double>(clock::now() - tp).count();
    crit[5].require(violations == 0, name + std::to_string(violations) + " violations in " +
                                         std::to_string(polytope_samples) + " samples" +
                                         fmt(", min margin %.2e, %.1f s", min_margin, psec));
    std::fflush(stdout);
  }

  const auto nf = measure_diii_range(3, 10000, 1, cal);
  crit[9].details.push_back(fmt("     diii:n=3 pencil range [%.9f, %.9f] over 10000 samples", nf.observed.min,
                                nf.observed.max));
  crit[9].details.push_back(fmt("     endpoint distance to [0,2] %.3e, to [-1,3] %.3e", nf.distance_half,
                                nf.distance_printed));
  crit[9].require(std::isfinite(nf.observed.min) && std::abs(nf.distance_half - nf.distance_printed) > 0.5,
                  "range matches " + nf.matches);

  bool all = true;
  for (std::size_t i = 0; i < crit.size(); ++i) {
    std::printf("%s criterion %zu: %s\n", crit[i].pass ? "PASS" : "FAIL", i + 1, crit[i].title.c_str());
    for (const auto& d : crit[i].details) std::printf("    %s\n", d.c_str());
    all = all && crit[i].pass;
  }
  return all ? 0 : 1;
}
