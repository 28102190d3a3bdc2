#pragma once

// Sign calibration, the per-case verification suite, torus-fixed-point
// probing and the DIII normalization measurement.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "pnspec/errors.hpp"
#include "pnspec/hermsym.hpp"
#include "pnspec/liealg.hpp"
#include "pnspec/numkernel.hpp"
#include "pnspec/poisson.hpp"
#include "pnspec/spectrum.hpp"
#include "pnspec/spinrep.hpp"

namespace pnspec {

struct CheckResult {
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  std::size_t skipped = 0;
  std::size_t evaluated = 0;
};

struct Range {
  double min = INFINITY;
  double max = -INFINITY;
  void add(double x) {
    min = std::min(min, x);
    max = std::max(max, x);
  }
};

struct VerificationReport {
  std::string case_name;
  CaseParams params;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  Calibration calibration;
  std::vector<CheckResult> checks;
  std::map<std::string, Range> ranges;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
  }

  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

inline nlohmann::json params_json(const CaseParams& p) {
  nlohmann::json j;
  switch (p.family) {
    case CaseFamily::AIII:
      j["family"] = "aiii";
      j["k"] = p.k;
      j["n"] = p.n;
      break;
    case CaseFamily::CI:
      j["family"] = "ci";
      j["n"] = p.n;
      break;
    case CaseFamily::DIII:
      j["family"] = "diii";
      j["n"] = p.n;
      break;
    case CaseFamily::BDI:
      j["family"] = "bdi";
      j["m"] = p.n + 2;
      break;
  }
  return j;
}

inline nlohmann::json to_json(const VerificationReport& r) {
  nlohmann::json j;
  j["case"] = r.case_name;
  j["params"] = params_json(r.params);
  j["seed"] = r.seed;
  j["samples"] = r.samples;
  j["calibration"] = {{"s_K", r.calibration.s_k}, {"s_0", r.calibration.s_0}};
  j["checks"] = nlohmann::json::array();
  for (const auto& c : r.checks) {
    j["checks"].push_back({{"name", c.name},
                           {"max_residual", c.max_residual},
                           {"tolerance", c.tolerance},
                           {"pass", c.pass},
                           {"skipped", c.skipped}});
  }
  j["ranges"] = nlohmann::json::object();
  for (const auto& [label, rg] : r.ranges) j["ranges"][label] = {{"min", rg.min}, {"max", rg.max}};
  j["pass"] = r.passed();
  return j;
}

using Tolerances = std::map<std::string, double>;

inline Tolerances default_tolerances() {
  return {
      {"group_constraint", 1e-11}, {"orbit_spectrum", 1e-10},   {"idempotents", 1e-10},
      {"rho_compatibility", 1e-10}, {"identity_coset", 1e-10},  {"coset_invariance", 1e-9},
      {"antisymmetry", 1e-11},     {"range_inclusion", 1e-9},   {"master_equation", 1e-8},
      {"connection", 1e-10},       {"pencil_chain", 1e-7},      {"doubling", 1e-8},
      {"pencil_imag", 1e-8},       {"trace_identity", 1e-9},    {"polytope", 1e-9},
      {"involution_bruhat", 1e-5}, {"involution_kks", 1e-5},    {"eigen_covector", 1e-5},
      {"jacobi_bruhat", 1e-5},     {"jacobi_pencil", 1e-5},     {"jacobi_kks", 1e-6},
      {"lenard", 1e-5},            {"spin_minor", 1e-9},        {"vertex_probe", 1e-10},
      {"clifford", 1e-13},         {"spin_homomorphism", 1e-10}, {"last_rotation", 1e-12},
      {"spin_weights", 1e-10},     {"spin_triangular", 1e-10},
  };
}

// ---------------------------------------------------------------------------
// Calibration

struct CalibrationCandidate {
  Calibration signs;
  double nijenhuis_residual = 0.0;  // |N v - ([-J v, m] + v)|
  double kks_orientation = 0.0;     // |PK x - t([X, m])|
  bool qualifies = false;
};

struct CalibrationReport {
  Calibration chosen;
  std::vector<CalibrationCandidate> candidates;
};

/// Max |t(N v) - t([-J v, m] + v)| over random tangent directions.
inline double master_equation_residual(const CaseSpec& cs, const BracketPair& bp, std::uint64_t seed,
                                       std::size_t directions) {
  double worst = 0.0;
  const RMatrix n = bp.nijenhuis();
  for (std::size_t k = 0; k < directions; ++k) {
    const CMatrix v = random_tangent(cs, bp.point.m, sample_seed(seed, 1000 + k));
    const auto t = cs.alg.coords(v);
    const auto lhs = n * t;
    const auto rhs = cs.alg.coords(nijenhuis_formula(cs, bp.point.m, v));
    for (std::size_t a = 0; a < t.size(); ++a) worst = std::max(worst, std::abs(lhs[a] - rhs[a]));
  }
  return worst;
}

/// The Hamiltonian vector field of F_X under PK must be the infinitesimal
/// action [X, m]: max |PK x - t([X, m])| over random X.
inline double kks_orientation_residual(const CaseSpec& cs, const CMatrix& m, int s_k, std::uint64_t seed,
                                       std::size_t directions) {
  const RMatrix pk = kks_matrix(cs, m, s_k);
  double worst = 0.0;
  for (std::size_t k = 0; k < directions; ++k) {
    const auto x = gaussian_coefficients(cs.alg.dim(), sample_seed(seed, 2000 + k));
    const auto lhs = pk * x;
    const auto rhs = cs.alg.coords(commutator(cs.alg.from_coords(x), m));
    for (std::size_t a = 0; a < x.size(); ++a) worst = std::max(worst, std::abs(lhs[a] - rhs[a]));
  }
  return worst;
}

/// Discrete search over (s_K, s_0) in {±1}^2. A pair qualifies when both the
/// master-equation residual and the KKS orientation residual are below tol;
/// throws ConventionError unless exactly one qualifies.
inline CalibrationReport calibrate(const CaseSpec& reference, std::uint64_t seed = 1, std::size_t points = 10,
                                   double tol = 1e-8) {
  CalibrationReport rep;
  for (int s_k : {1, -1}) {
    for (int s_0 : {1, -1}) {
      CalibrationCandidate cand;
      cand.signs = {s_k, s_0};
      for (std::size_t i = 0; i < points; ++i) {
        const auto pt = random_point(reference, sample_seed(seed, i));
        const auto bp = bracket_pair(reference, pt, cand.signs);
        cand.nijenhuis_residual =
            std::max(cand.nijenhuis_residual, master_equation_residual(reference, bp, sample_seed(seed, i), 5));
        cand.kks_orientation =
            std::max(cand.kks_orientation, kks_orientation_residual(reference, pt.m, s_k, sample_seed(seed, i), 3));
      }
      cand.qualifies = cand.nijenhuis_residual <= tol && cand.kks_orientation <= tol;
      rep.candidates.push_back(cand);
    }
  }
  const auto count = std::count_if(rep.candidates.begin(), rep.candidates.end(),
                                   [](const CalibrationCandidate& c) { return c.qualifies; });
  if (count != 1) {
    std::string msg = "calibrate: " + std::to_string(count) + " sign pairs qualify;";
    for (const auto& c : rep.candidates) {
      msg += " (s_K=" + std::to_string(c.signs.s_k) + ",s_0=" + std::to_string(c.signs.s_0) +
             ": N=" + std::to_string(c.nijenhuis_residual) + ", KKS=" + std::to_string(c.kks_orientation) + ")";
    }
    throw ConventionError(msg);
  }
  for (const auto& c : rep.candidates)
    if (c.qualifies) rep.chosen = c.signs;
  return rep;
}

inline CaseSpec calibration_reference_case() { return build_case({CaseFamily::AIII, 1, 2}); }

/// Spectrally built C_+ on su(n) against the closed form: 2i X_rs above the
/// diagonal, i X_rr on it, zero below.
inline double c_plus_pattern_residual(const AlgebraSpec& alg, std::size_t samples, std::uint64_t seed) {
  if (alg.family != Family::A) throw UsageError("c_plus_pattern_residual applies to su(n)");
  double r = 0.0;
  const cplx i1(0.0, 1.0);
  for (std::size_t k = 0; k < samples; ++k) {
    const CMatrix x = alg.from_coords(gaussian_coefficients(alg.dim(), sample_seed(seed, k)));
    const CMatrix c = c_plus(alg, x);
    for (std::size_t a = 0; a < alg.size; ++a)
      for (std::size_t b = 0; b < alg.size; ++b) {
        const cplx want = a < b ? 2.0 * i1 * x(a, b) : a == b ? i1 * x(a, a) : cplx{};
        r = std::max(r, std::abs(c(a, b) - want));
      }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Vertex probe

struct VertexProbe {
  std::size_t points = 0;
  double vertex_residual = 0.0;    // max distance of free mapped values from {0, 2}
  double identity_residual = 0.0;  // max |free value| at the identity coset
  std::vector<std::vector<double>> vertices;  // sorted free values per fixed point
};

inline VertexProbe vertex_probe(const CaseSpec& cs) {
  VertexProbe vp;
  const auto pts = torus_fixed_points(cs);
  vp.points = pts.size();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto sp = chain_spectrum(cs, pts[i].m);
    const auto vals = sp.free_values();
    for (double v : vals) {
      vp.vertex_residual = std::max(vp.vertex_residual, std::min(std::abs(v), std::abs(v - 2.0)));
      if (i == 0) vp.identity_residual = std::max(vp.identity_residual, std::abs(v));
    }
    vp.vertices.push_back(vals);
  }
  return vp;
}

// ---------------------------------------------------------------------------
// Suite

struct SuiteOptions {
  std::size_t samples = 100;
  std::uint64_t seed = 1;
  Tolerances tolerances = default_tolerances();
  Calibration calibration;
  std::size_t directions = 5;       // tangent directions per point for the master equation
  std::size_t fd_points = 50;       // gap-regular points for involution / eigen-covector checks
  std::size_t jacobi_triples = 20;  // one random triple per point
  std::size_t lenard_points = 20;
  std::size_t coset_points = 10;
  double gap = 1e-3;
  double fd_step = 1e-5;
};

namespace detail {

class CheckBook {
 public:
  explicit CheckBook(const Tolerances& tol) : tol_(tol) {}

  CheckResult& get(const std::string& name) {
    for (auto& c : checks_)
      if (c.name == name) return c;
    CheckResult c;
    c.name = name;
    auto it = tol_.find(name);
    c.tolerance = it == tol_.end() ? 0.0 : it->second;
    checks_.push_back(c);
    return checks_.back();
  }

  void record(const std::string& name, double residual) {
    auto& c = get(name);
    ++c.evaluated;
    if (!(residual <= c.max_residual)) c.max_residual = std::isnan(residual) ? INFINITY : residual;
  }

  void skip(const std::string& name, std::size_t count = 1) { get(name).skipped += count; }

  std::vector<CheckResult> finish() {
    for (auto& c : checks_) c.pass = c.max_residual <= c.tolerance;
    return checks_;
  }

 private:
  const Tolerances& tol_;
  std::vector<CheckResult> checks_;
};

inline double spectrum_distance_to_rho(const CaseSpec& cs, const CMatrix& m) {
  const auto a = hermitian_eigenvalues(CMatrix(m * cplx(0.0, -1.0)), 1e-8);
  const auto b = hermitian_eigenvalues(CMatrix(cs.rho * cplx(0.0, -1.0)), 1e-8);
  return multiset_distance(a, b);
}

inline double idempotent_residual(const CaseSpec& cs, const OrbitPoint& pt) {
  const auto id = idempotents(cs, pt.g);
  const std::size_t N = cs.alg.size;
  double r = (id.e_plus * id.e_plus - id.e_plus).max_abs();
  r = std::max(r, (id.e_minus * id.e_minus - id.e_minus).max_abs());
  r = std::max(r, (id.e_plus + id.e_minus - CMatrix::identity(N)).max_abs());
  if (cs.family() != CaseFamily::BDI) {
    r = std::max(r, (moment_from_idempotents(cs, id) - pt.m).max_abs());
  } else {
    r = std::max(r, (pt.m * pt.m + id.e_minus).max_abs());
  }
  return r;
}

}  // namespace detail

inline VerificationReport run_suite(const CaseSpec& cs, const SuiteOptions& opt) {
  VerificationReport rep;
  rep.case_name = cs.name();
  rep.params = cs.params;
  rep.seed = opt.seed;
  rep.samples = opt.samples;
  rep.calibration = opt.calibration;
  detail::CheckBook book(opt.tolerances);
  const Calibration cal = opt.calibration;
  const bool bdi = cs.family() == CaseFamily::BDI;
  std::optional<SpinRepresentation> spin;
  if (bdi) spin = make_spin_representation(cs.spin_rank(), cs.bdi_odd());

  book.record("rho_compatibility", cs.rho_compatibility);

  // Identity coset: P0 vanishes, both routes give all-zero eigenvalues.
  {
    const auto id = identity_point(cs);
    const auto bp = bracket_pair(cs, id, cal);
    double r = bp.p0.max_abs();
    for (double v : pencil_analysis(bp).values) r = std::max(r, std::abs(v));
    for (double v : chain_spectrum(cs, id.m, {1e-9, false}).free_values()) r = std::max(r, std::abs(v));
    book.record("identity_coset", r);
  }

  {
    const auto vp = vertex_probe(cs);
    book.record("vertex_probe", std::max(vp.vertex_residual, vp.identity_residual));
  }

  if (spin) {
    book.record("clifford", clifford_residual(spin->gammas));
    book.record("spin_homomorphism", spin_homomorphism_residual(*spin, cs.alg, 20, sample_seed(opt.seed, 901)));
    book.record("last_rotation", last_rotation_residual(*spin, cs.alg, cs.rho));
    book.record("spin_weights", spin_weight_residual(*spin, cs.alg, 5, sample_seed(opt.seed, 902)));
    std::vector<CMatrix> raised;
    for (std::size_t k = 0; k < 20; ++k)
      raised.push_back(c_plus(cs.alg, cs.alg.from_coords(gaussian_coefficients(cs.alg.dim(), sample_seed(opt.seed, 903 + k)))));
    book.record("spin_triangular", spin_lower_residual(*spin, raised));
  }

  std::size_t fd_done = 0, jacobi_done = 0, lenard_done = 0;
  for (std::size_t i = 0; i < opt.samples; ++i) {
    const std::uint64_t si = sample_seed(opt.seed, i);
    const OrbitPoint pt = random_point(cs, si);
    book.record("group_constraint", group_constraint_residual(cs, pt.g));
    book.record("orbit_spectrum", detail::spectrum_distance_to_rho(cs, pt.m));
    book.record("idempotents", detail::idempotent_residual(cs, pt));

    const BracketPair bp = bracket_pair(cs, pt, cal);
    book.record("antisymmetry", std::max(antisymmetry_residual(bp.p0), antisymmetry_residual(bp.pk)));
    book.record("range_inclusion", range_inclusion_residual(bp));
    book.record("master_equation", master_equation_residual(cs, bp, si, opt.directions));

    if (i < opt.coset_points) {
      const CMatrix h = random_stabilizer(cs, sample_seed(si, 7));
      const CMatrix gh = pt.g * h;
      double r = (bruhat_matrix(cs, gh, cal.s_0) - bp.p0).max_abs();
      r = std::max(r, (moment(cs, gh) - pt.m).max_abs());
      book.record("coset_invariance", r);
    }

    for (std::size_t k = 0; k < opt.directions; ++k) {
      const CMatrix v = random_tangent(cs, pt.m, sample_seed(si, 100 + k));
      const auto cr = connection_check(cs, pt, v);
      if (cr.block_form) {
        book.record("connection", cr.residual);
      } else {
        book.skip("connection");
      }
    }

    const auto pa = pencil_analysis(bp);
    const auto sp = chain_spectrum(cs, pt.m, {opt.tolerances.at("polytope"), false});
    const auto free_vals = sp.free_values();
    book.record("pencil_chain", multiset_distance(free_vals, pa.values));
    book.record("doubling", pa.max_pair_gap);
    book.record("pencil_imag", pa.max_imag);
    double sum = 0.0;
    for (double v : pa.values) sum += v;
    book.record("trace_identity", std::abs(pa.trace - 2.0 * sum));

    const auto poly = polytope_membership(cs, sp, opt.tolerances.at("polytope"));
    book.record("polytope", std::max(0.0, -poly.min_margin));

    for (const auto& [label, value] : sp.coordinates()) rep.ranges[label].add(value);
    for (double v : pa.values) rep.ranges["pencil"].add(v);

    if (spin) book.record("spin_minor", spin_minor_residual(cs, *spin, pt.m, sp));

    const bool regular = chain_gap(cs, sp) > opt.gap;

    if (jacobi_done < opt.jacobi_triples) {
      std::mt19937_64 rng(sample_seed(si, 11));
      std::uniform_int_distribution<std::size_t> pick(0, cs.alg.dim() - 1);
      const std::size_t a = pick(rng), b = pick(rng), c = pick(rng);
      const auto jr = jacobi_residual(cs, bp, a, b, c, opt.fd_step);
      book.record("jacobi_bruhat", jr.bruhat);
      book.record("jacobi_pencil", jr.pencil);
      book.record("jacobi_kks", jr.kks);
      ++jacobi_done;
    }

    if (fd_done < opt.fd_points || lenard_done < opt.lenard_points) {
      if (!regular) {
        book.skip("involution_bruhat");
        book.skip("involution_kks");
        book.skip("eigen_covector");
        book.skip("lenard");
        continue;
      }
    }

    if (fd_done < opt.fd_points) {
      // Free chain eigenvalues in entry order (stable at gap-regular points).
      auto f = [&cs](const OrbitPoint& p) {
        const auto s = chain_spectrum(cs, p.m, {1e-9, false});
        std::vector<double> out;
        for (const auto& e : s.entries)
          if (e.free) out.push_back(e.value);
        return out;
      };
      const auto cv = covectors(cs, pt, f, opt.fd_step);
      std::vector<double> lambdas;
      for (const auto& e : sp.entries)
        if (e.free) lambdas.push_back(e.value);
      double inv0 = 0.0, invk = 0.0;
      for (std::size_t a = 0; a < cv.size(); ++a)
        for (std::size_t b = a + 1; b < cv.size(); ++b) {
          inv0 = std::max(inv0, std::abs(contract(cv[a], bp.p0, cv[b])));
          invk = std::max(invk, std::abs(contract(cv[a], bp.pk, cv[b])));
        }
      book.record("involution_bruhat", inv0);
      book.record("involution_kks", invk);
      book.record("eigen_covector", eigen_covector_residual(bp, cv, lambdas));
      ++fd_done;
    }

    if (lenard_done < opt.lenard_points) {
      book.record("lenard", lenard_check(cs, bp, std::max<std::size_t>(1, cs.n_eig), opt.fd_step));
      ++lenard_done;
    }
  }

  rep.checks = book.finish();
  return rep;
}

// ---------------------------------------------------------------------------
// DIII normalization measurement

struct NormalizationFinding {
  std::size_t n = 0;
  std::size_t samples = 0;
  Range observed;
  double distance_half = 0.0;      // endpoint distance to [0, 2]
  double distance_printed = 0.0;   // endpoint distance to [-1, 3]
  std::string matches;             // "[0,2]" or "[-1,3]"
};

inline NormalizationFinding measure_diii_range(std::size_t n, std::size_t samples, std::uint64_t seed,
                                               const Calibration& cal) {
  const CaseSpec cs = build_case({CaseFamily::DIII, 0, n});
  NormalizationFinding nf;
  nf.n = n;
  nf.samples = samples;
  for (std::size_t i = 0; i < samples; ++i) {
    const auto pt = random_point(cs, sample_seed(seed, i));
    const auto bp = bracket_pair(cs, pt, cal);
    for (double v : pencil_analysis(bp).values) nf.observed.add(v);
  }
  auto dist = [&](double lo, double hi) {
    return std::max(std::abs(nf.observed.min - lo), std::abs(nf.observed.max - hi));
  };
  nf.distance_half = dist(0.0, 2.0);
  nf.distance_printed = dist(-1.0, 3.0);
  nf.matches = nf.distance_half <= nf.distance_printed ? "[0,2]" : "[-1,3]";
  return nf;
}

}  // namespace pnspec
