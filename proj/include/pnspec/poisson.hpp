#pragma once

// Bruhat-Poisson (P0) and KKS (PK) brackets of the moment coordinates
// F_a = <m, X_a> at an orbit point, the Nijenhuis operator N = P0 PK^+ and
// the finite-difference bracket machinery used by the consistency checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pnspec/errors.hpp"
#include "pnspec/hermsym.hpp"
#include "pnspec/liealg.hpp"
#include "pnspec/numkernel.hpp"

namespace pnspec {

struct Calibration {
  int s_k = 1;
  int s_0 = -1;
};

struct BracketPair {
  OrbitPoint point;
  RMatrix p0;
  RMatrix pk;
  RMatrix tangent_basis;  // orthonormal basis of range(PK), coordinates
  RMatrix pk_pinv;
  Calibration calibration;

  /// N in moment coordinates (d x d): t(Nv) = P0 PK^+ t(v).
  RMatrix nijenhuis() const { return p0 * pk_pinv; }

  /// N restricted to the tangent space, in the tangent basis.
  RMatrix restricted_nijenhuis() const { return tangent_basis.transpose() * (nijenhuis() * tangent_basis); }
};

/// [m, X_a] for every basis element.
inline std::vector<CMatrix> basis_commutators(const AlgebraSpec& alg, const CMatrix& m) {
  std::vector<CMatrix> out;
  out.reserve(alg.dim());
  for (const auto& x : alg.basis) out.push_back(commutator(m, x));
  return out;
}

/// PK[a, b] = s_K <m, [X_a, X_b]> = s_K <[m, X_a], X_b>.
inline RMatrix kks_matrix(const CaseSpec& cs, const CMatrix& m, int s_k = 1) {
  const auto xi = basis_commutators(cs.alg, m);
  const std::size_t d = cs.alg.dim();
  RMatrix pk(d, d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a + 1; b < d; ++b) {
      const double v = s_k * killing_pairing(xi[a], cs.alg.basis[b]);
      pk(a, b) = v;
      pk(b, a) = -v;
    }
  return pk;
}

/// P0[a, b] = -s_0 Im Tr(gpart_a bpart_b) with Ad_{g^-1} C_+([m, X_a]) = gpart_a + bpart_a.
inline RMatrix bruhat_matrix(const CaseSpec& cs, const CMatrix& g, int s_0 = -1) {
  const AlgebraSpec& alg = cs.alg;
  const std::size_t d = alg.dim();
  const std::size_t N = alg.size;
  const CMatrix gi = g.adjoint();
  const CMatrix m = g * cs.rho * gi;
  const cplx I(0.0, 1.0);
  std::vector<CMatrix> gpart(d), bpart(d);
  for (std::size_t a = 0; a < d; ++a) {
    const CMatrix xi = commutator(m, alg.basis[a]);
    const CMatrix cp = xi * I + alg.from_coords(alg.j_coords(alg.coords(xi)));
    const CMatrix z = gi * cp * g;
    auto parts = detail::iwasawa_unchecked(alg, z, true);
    const CMatrix jy = alg.from_coords(alg.j_coords(alg.coords(parts.y)));
    gpart[a] = std::move(parts.g_part);
    bpart[a] = parts.y * I + jy;
  }
  RMatrix p0(d, d);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      double acc = 0.0;
      const auto& ga = gpart[a];
      const auto& bb = bpart[b];
      for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
          const cplx x = ga(i, j);
          const cplx y = bb(j, i);
          acc += x.real() * y.imag() + x.imag() * y.real();
        }
      p0(a, b) = -s_0 * acc;
    }
  }
  return p0;
}

inline BracketPair bracket_pair(const CaseSpec& cs, const OrbitPoint& pt, const Calibration& cal = {}) {
  BracketPair bp;
  bp.point = pt;
  bp.calibration = cal;
  bp.pk = kks_matrix(cs, pt.m, cal.s_k);
  bp.p0 = bruhat_matrix(cs, pt.g, cal.s_0);
  const auto range = antisymmetric_range(bp.pk, 1e-9);
  if (range.rank != cs.dim_m) {
    throw NumericalError("bracket_pair " + cs.name() + ": KKS rank " + std::to_string(range.rank) + " != dim M " +
                         std::to_string(cs.dim_m));
  }
  bp.tangent_basis = range.basis;
  bp.pk_pinv = range.pinv;
  return bp;
}

inline double antisymmetry_residual(const RMatrix& p) { return (p + p.transpose()).max_abs(); }

/// max |(1 - Q Q^T) P0|: P0 is tangent to the orbit.
inline double range_inclusion_residual(const BracketPair& bp) {
  const RMatrix& q = bp.tangent_basis;
  return (bp.p0 - q * (q.transpose() * bp.p0)).max_abs();
}

/// Distance of coordinate vector t from the tangent space.
inline double tangent_residual(const BracketPair& bp, const std::vector<double>& t) {
  const RMatrix& q = bp.tangent_basis;
  const auto proj = q * (q.transpose() * t);
  double r = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) r = std::max(r, std::abs(t[i] - proj[i]));
  return r;
}

/// N v for a tangent vector v = [X, m].
inline CMatrix nijenhuis_apply(const CaseSpec& cs, const BracketPair& bp, const CMatrix& v, double tol = 1e-9) {
  cs.alg.require_member(v, "nijenhuis_apply", tol);
  const auto t = cs.alg.coords(v);
  const double r = tangent_residual(bp, t);
  if (r > tol) throw ConventionError("nijenhuis_apply: vector not tangent (residual " + std::to_string(r) + ")");
  return cs.alg.from_coords(bp.p0 * (bp.pk_pinv * t));
}

/// Closed form N v = [-J(v), m] + v.
inline CMatrix nijenhuis_formula(const CaseSpec& cs, const CMatrix& m, const CMatrix& v) {
  const CMatrix jv = cs.alg.from_coords(cs.alg.j_coords(cs.alg.coords(v)));
  return commutator(CMatrix(-jv), m) + v;
}

struct PencilAnalysis {
  std::vector<double> raw;     // 2 n_eig real parts, ascending
  std::vector<double> values;  // de-doubled
  double max_imag = 0.0;
  double max_pair_gap = 0.0;
  double trace = 0.0;  // Tr of the restricted N
};

inline PencilAnalysis pencil_analysis(const BracketPair& bp) {
  const RMatrix nt = bp.restricted_nijenhuis();
  const auto ev = real_eigenvalues(nt);
  PencilAnalysis pa;
  pa.trace = nt.trace();
  for (const auto& e : ev) {
    pa.raw.push_back(e.real());
    pa.max_imag = std::max(pa.max_imag, std::abs(e.imag()));
  }
  std::sort(pa.raw.begin(), pa.raw.end());
  if (pa.raw.size() % 2 != 0) throw NumericalError("pencil_analysis: odd tangent dimension");
  for (std::size_t i = 0; i + 1 < pa.raw.size(); i += 2) {
    pa.max_pair_gap = std::max(pa.max_pair_gap, std::abs(pa.raw[i + 1] - pa.raw[i]));
    pa.values.push_back(0.5 * (pa.raw[i] + pa.raw[i + 1]));
  }
  return pa;
}

/// De-doubled pencil eigenvalues, ascending. Throws on imaginary parts or
/// pairing gaps above tolerance.
inline std::vector<double> pencil_spectrum(const BracketPair& bp, double pair_tol = 1e-8, double imag_tol = 1e-8) {
  auto pa = pencil_analysis(bp);
  if (pa.max_imag > imag_tol) {
    throw NumericalError("pencil_spectrum: imaginary part " + std::to_string(pa.max_imag) + " above tolerance");
  }
  if (pa.max_pair_gap > pair_tol) {
    throw NumericalError("pencil_spectrum: eigenvalue pairing gap " + std::to_string(pa.max_pair_gap));
  }
  return pa.values;
}

// ---------------------------------------------------------------------------
// Finite-difference covectors. A function f on the orbit is represented by
// coefficients c with df = sum c_a dF_a; derivatives along the flows
// g -> exp(eps X_b) g give D = L^T c with L[a, b] = <m, [X_a, X_b]>.

using OrbitFunction = std::function<double(const OrbitPoint&)>;
using OrbitVectorFunction = std::function<std::vector<double>(const OrbitPoint&)>;

inline OrbitPoint flow_point(const CaseSpec& cs, const OrbitPoint& base, std::size_t direction, double eps) {
  const CMatrix e = matrix_exp(cs.alg.basis[direction] * cplx(eps));
  OrbitPoint p;
  p.g = e * base.g;
  p.m = p.g * cs.rho * p.g.adjoint();
  return p;
}

/// Covectors of several functions at once; result[k] is the covector of output k.
inline std::vector<std::vector<double>> covectors(const CaseSpec& cs, const OrbitPoint& pt,
                                                  const OrbitVectorFunction& f, double h = 1e-5) {
  const std::size_t d = cs.alg.dim();
  std::vector<std::size_t> dirs(d);
  for (std::size_t i = 0; i < d; ++i) dirs[i] = i;
  const auto jac = fd_jacobian(f, pt, dirs, h, [&cs](const OrbitPoint& b, std::size_t dir, double eps) {
    return flow_point(cs, b, dir, eps);
  });
  // L = PK with s_K = +1; L^T = -L, so c = -L^+ D.
  const RMatrix l = kks_matrix(cs, pt.m, 1);
  const auto range = antisymmetric_range(l, 1e-9);
  const std::size_t outputs = jac.empty() ? 0 : jac.front().size();
  std::vector<std::vector<double>> out(outputs, std::vector<double>(d));
  for (std::size_t k = 0; k < outputs; ++k) {
    std::vector<double> dk(d);
    for (std::size_t b = 0; b < d; ++b) dk[b] = jac[b][k];
    const auto c = range.pinv * dk;
    for (std::size_t a = 0; a < d; ++a) out[k][a] = -c[a];
  }
  return out;
}

inline std::vector<double> covector(const CaseSpec& cs, const OrbitPoint& pt, const OrbitFunction& f,
                                    double h = 1e-5) {
  return covectors(cs, pt, [&f](const OrbitPoint& p) { return std::vector<double>{f(p)}; }, h).front();
}

enum class BracketKind { Bruhat, Kks, Pencil };

struct BracketChoice {
  BracketKind kind = BracketKind::Kks;
  double t = 1.0;  // pencil parameter: P0 + t PK
};

inline RMatrix bracket_tensor(const BracketPair& bp, const BracketChoice& which) {
  switch (which.kind) {
    case BracketKind::Bruhat:
      return bp.p0;
    case BracketKind::Kks:
      return bp.pk;
    case BracketKind::Pencil:
      return bp.p0 + bp.pk * which.t;
  }
  return bp.pk;
}

inline double contract(const std::vector<double>& c1, const RMatrix& p, const std::vector<double>& c2) {
  const auto pc = p * c2;
  double acc = 0.0;
  for (std::size_t i = 0; i < c1.size(); ++i) acc += c1[i] * pc[i];
  return acc;
}

inline double bracket_of_functions(const CaseSpec& cs, const BracketPair& bp, const OrbitFunction& f1,
                                   const OrbitFunction& f2, const BracketChoice& which, double h = 1e-5) {
  const auto cv = covectors(
      cs, bp.point, [&](const OrbitPoint& p) { return std::vector<double>{f1(p), f2(p)}; }, h);
  return contract(cv[0], bracket_tensor(bp, which), cv[1]);
}

/// Coordinate function F_a.
inline OrbitFunction coordinate_function(const CaseSpec& cs, std::size_t a) {
  return [&cs, a](const OrbitPoint& p) { return killing_pairing(p.m, cs.alg.basis[a]); };
}

struct JacobiResiduals {
  double bruhat = 0.0;  // t = 0
  double pencil = 0.0;  // t = 1
  double kks = 0.0;
};

/// |{{F_a,F_b},F_c} + cyclic| under P0, P0 + PK and PK for one triple.
inline JacobiResiduals jacobi_residual(const CaseSpec& cs, const BracketPair& bp, std::size_t a, std::size_t b,
                                       std::size_t c, double h = 1e-5) {
  const std::size_t d = cs.alg.dim();
  if (a >= d || b >= d || c >= d) throw UsageError("jacobi_residual: index out of range");
  const Calibration cal = bp.calibration;
  const std::pair<std::size_t, std::size_t> pairs[3] = {{a, b}, {b, c}, {c, a}};
  const std::size_t third[3] = {c, a, b};
  // Outputs: P0 entries then PK entries of the three brackets.
  auto f = [&](const OrbitPoint& p) {
    const RMatrix p0 = bruhat_matrix(cs, p.g, cal.s_0);
    const RMatrix pk = kks_matrix(cs, p.m, cal.s_k);
    std::vector<double> out;
    for (const auto& [i, j] : pairs) out.push_back(p0(i, j));
    for (const auto& [i, j] : pairs) out.push_back(pk(i, j));
    return out;
  };
  const auto cv = covectors(cs, bp.point, f, h);
  auto residual = [&](double w0, double wk) {
    const RMatrix pt = bp.p0 * w0 + bp.pk * wk;
    double sum = 0.0;
    for (int s = 0; s < 3; ++s) {
      std::vector<double> cg(d);
      for (std::size_t i = 0; i < d; ++i) cg[i] = w0 * cv[s][i] + wk * cv[3 + s][i];
      // {G, F_c} with dF_c = e_c
      double val = 0.0;
      for (std::size_t i = 0; i < d; ++i) val += cg[i] * pt(i, third[s]);
      sum += val;
    }
    return std::abs(sum);
  };
  JacobiResiduals r;
  r.bruhat = residual(1.0, 0.0);
  r.pencil = residual(1.0, 1.0);
  r.kks = residual(0.0, 1.0);
  return r;
}

/// I_k = (1/k) Tr((P0 PK^+)^k) for k = 1..count.
inline std::vector<double> trace_invariants(const BracketPair& bp, std::size_t count) {
  const RMatrix nt = bp.restricted_nijenhuis();
  std::vector<double> out;
  RMatrix power = nt;
  for (std::size_t k = 1; k <= count; ++k) {
    out.push_back(power.trace() / static_cast<double>(k));
    power = power * nt;
  }
  return out;
}

/// N^* on a covector: (P0 PK^+)^T c = PK^+ P0 c.
inline std::vector<double> nijenhuis_dual(const BracketPair& bp, const std::vector<double>& c) {
  return bp.pk_pinv * (bp.p0 * c);
}

/// Max over k = 1..k_max of |Q^T (dI_{k+1} - N^* dI_k)|.
inline double lenard_check(const CaseSpec& cs, const BracketPair& bp, std::size_t k_max, double h = 1e-5) {
  const Calibration cal = bp.calibration;
  auto f = [&](const OrbitPoint& p) {
    const BracketPair q = bracket_pair(cs, p, cal);
    return trace_invariants(q, k_max + 1);
  };
  const auto cv = covectors(cs, bp.point, f, h);
  const RMatrix qt = bp.tangent_basis.transpose();
  double worst = 0.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const auto lhs = qt * cv[k];
    const auto rhs = qt * nijenhuis_dual(bp, cv[k - 1]);
    for (std::size_t i = 0; i < lhs.size(); ++i) worst = std::max(worst, std::abs(lhs[i] - rhs[i]));
  }
  return worst;
}

/// max over given covectors of |Q^T (N^* c_i - lambda_i c_i)|.
inline double eigen_covector_residual(const BracketPair& bp, const std::vector<std::vector<double>>& cvs,
                                      const std::vector<double>& lambdas) {
  const RMatrix qt = bp.tangent_basis.transpose();
  double worst = 0.0;
  for (std::size_t i = 0; i < cvs.size(); ++i) {
    const auto nc = nijenhuis_dual(bp, cvs[i]);
    std::vector<double> diff(nc.size());
    for (std::size_t a = 0; a < nc.size(); ++a) diff[a] = nc[a] - lambdas[i] * cvs[i][a];
    const auto proj = qt * diff;
    for (double x : proj) worst = std::max(worst, std::abs(x));
  }
  return worst;
}

struct ConnectionResult {
  double residual = 0.0;
  bool block_form = true;  // false for BDI: only the full formula is evaluated
  CMatrix full;            // (-J(v) + [m, v]) g
};

/// Flat contravariant connection along v: full form (-J(v) + [m, v]) g against
/// the block form -C_+(v) sigma_+ on V_+ and +C_-(v) sigma_- on V_-.
inline ConnectionResult connection_check(const CaseSpec& cs, const OrbitPoint& pt, const CMatrix& v) {
  const AlgebraSpec& alg = cs.alg;
  const CMatrix jv = alg.from_coords(alg.j_coords(alg.coords(v)));
  ConnectionResult res;
  res.full = (commutator(pt.m, v) - jv) * pt.g;
  if (cs.family() == CaseFamily::BDI) {
    res.block_form = false;
    return res;
  }
  const cplx I(0.0, 1.0);
  const CMatrix cp = v * I + jv;
  const CMatrix cm = v * I - jv;
  const auto id = idempotents(cs, pt.g);
  const CMatrix plus = res.full * cs.w_plus + cp * id.sigma_plus;
  const CMatrix minus = res.full * cs.w_minus - cm * id.sigma_minus;
  res.residual = std::max(plus.max_abs(), minus.max_abs());
  return res;
}

/// Random tangent vector [X, m] with X = sum c_a X_a.
inline CMatrix random_tangent(const CaseSpec& cs, const CMatrix& m, std::uint64_t seed) {
  const CMatrix x = cs.alg.from_coords(gaussian_coefficients(cs.alg.dim(), seed));
  return commutator(x, m);
}

}  // namespace pnspec
