#pragma once

// Classical compact matrix Lie algebras su(n), so(2n+1), sp(n), so(2n) with an
// orthonormal basis under <A,B> = -Tr(AB), the complex structure J induced by
// a regular Cartan element, the maps C± = i ± J and the Iwasawa splitting of
// the complexification against b±.

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "pnspec/errors.hpp"
#include "pnspec/numkernel.hpp"

namespace pnspec {

enum class Family { A, B, C, D };

/// Torus embedding for the orthogonal families: consecutive 2x2 blocks
/// (odd size: leading zero coordinate) or the split-halves form
/// [[0, diag(a)], [-diag(a), 0]].
enum class CartanLayout { AdjacentBlocks, SplitHalves };

struct AlgebraOptions {
  CartanLayout layout = CartanLayout::AdjacentBlocks;
  /// Orthogonal families only: coefficients 1, 2, ..., n instead of n, ..., 1.
  bool ascending_regular = false;
  bool negate_regular = false;
};

inline double killing_pairing(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols()) throw ShapeError("killing_pairing: shape mismatch");
  cplx acc{};
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * b(j, i);
  return -acc.real();
}

/// Im Tr(AB), the Manin-triple pairing on the complexified algebra.
inline double im_tr_pairing(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols()) throw ShapeError("im_tr_pairing: shape mismatch");
  cplx acc{};
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * b(j, i);
  return acc.imag();
}

struct AlgebraSpec {
  Family family = Family::A;
  std::size_t n = 0;     // rank parameter as passed to build_algebra
  std::size_t size = 0;  // matrix size N
  CartanLayout layout = CartanLayout::AdjacentBlocks;
  std::vector<CMatrix> basis;  // orthonormal under killing_pairing; Cartan part first
  std::size_t cartan_dim = 0;
  CMatrix regular;  // H0
  RMatrix j;        // J in basis coordinates

  std::size_t dim() const { return basis.size(); }

  std::vector<CMatrix> cartan_basis() const {
    return std::vector<CMatrix>(basis.begin(), basis.begin() + static_cast<std::ptrdiff_t>(cartan_dim));
  }

  /// Coordinates <X, X_a> for the real-linear projection onto g.
  std::vector<double> coords(const CMatrix& x) const {
    std::vector<double> c(basis.size());
    for (std::size_t a = 0; a < basis.size(); ++a) c[a] = killing_pairing(basis[a], x);
    return c;
  }

  CMatrix from_coords(const std::vector<double>& c) const {
    if (c.size() != basis.size()) throw ShapeError("from_coords: coordinate count mismatch");
    CMatrix x(size, size);
    for (std::size_t a = 0; a < basis.size(); ++a) {
      if (c[a] == 0.0) continue;
      const auto& src = basis[a].data();
      auto& dst = x.data();
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += c[a] * src[i];
    }
    return x;
  }

  /// max-entry distance from X to its projection onto g.
  double membership_residual(const CMatrix& x) const {
    if (x.rows() != size || x.cols() != size) return INFINITY;
    return (x - from_coords(coords(x))).max_abs();
  }

  void require_member(const CMatrix& x, const char* who, double tol = 1e-10) const {
    const double r = membership_residual(x);
    if (!(r <= tol)) {
      throw ConventionError(std::string(who) + ": argument outside the algebra (residual " + std::to_string(r) + ")");
    }
  }

  /// Matrix of ad_H in the basis: entry (a, b) = <X_a, [H, X_b]>.
  RMatrix ad_matrix(const CMatrix& h) const {
    const std::size_t d = basis.size();
    RMatrix out(d, d);
    for (std::size_t b = 0; b < d; ++b) {
      const auto col = coords(commutator(h, basis[b]));
      for (std::size_t a = 0; a < d; ++a) out(a, b) = col[a];
    }
    return out;
  }

  std::vector<double> j_coords(const std::vector<double>& c) const { return j * c; }
};

namespace detail {

inline CMatrix unit(std::size_t n, std::size_t r, std::size_t s, cplx v = 1.0) {
  CMatrix e(n, n);
  e(r, s) = v;
  return e;
}

inline std::vector<CMatrix> gram_schmidt(const std::vector<CMatrix>& in, std::size_t* cartan_kept,
                                         std::size_t cartan_count) {
  std::vector<CMatrix> out;
  for (std::size_t idx = 0; idx < in.size(); ++idx) {
    CMatrix m = in[idx];
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : out) m -= q * cplx(killing_pairing(q, m));
    const double nrm2 = killing_pairing(m, m);
    if (nrm2 > 1e-20) {
      out.push_back(m * cplx(1.0 / std::sqrt(nrm2)));
      if (idx < cartan_count) ++*cartan_kept;
    }
  }
  return out;
}

inline std::vector<std::pair<std::size_t, std::size_t>> orthogonal_torus_planes(std::size_t m, std::size_t rank,
                                                                                 CartanLayout layout) {
  std::vector<std::pair<std::size_t, std::size_t>> planes;
  if (layout == CartanLayout::SplitHalves) {
    if (m % 2 != 0) throw UsageError("split-halves Cartan layout needs even matrix size");
    for (std::size_t j = 0; j < rank; ++j) planes.emplace_back(j, rank + j);
  } else {
    const std::size_t off = m % 2;
    for (std::size_t j = 0; j < rank; ++j) planes.emplace_back(off + 2 * j, off + 2 * j + 1);
  }
  return planes;
}

// J = A (-A^2)^{-1/2} on the range of A = ad_{H0}; zero on its kernel.
inline RMatrix complex_structure(const RMatrix& ad) {
  const RMatrix s = -(ad * ad);
  const auto es = hermitian_eigen(s, 1e-8 * std::max(1.0, s.max_abs()));
  const std::size_t d = ad.rows();
  RMatrix scaled(d, d);
  for (std::size_t c = 0; c < d; ++c) {
    const double w = es.values[c];
    const double f = w > 1e-9 ? 1.0 / std::sqrt(w) : 0.0;
    for (std::size_t r = 0; r < d; ++r) scaled(r, c) = es.vectors(r, c) * f;
  }
  return ad * (scaled * es.vectors.transpose());
}

}  // namespace detail

/// Builds the compact real form with Cartan-first orthonormal basis and the
/// complex structure J. Family A: su(n), n >= 2; B: so(2n+1), n >= 1;
/// C: sp(n), n >= 1; D: so(2n), n >= 2.
inline AlgebraSpec build_algebra(Family family, std::size_t n, const AlgebraOptions& opt = {}) {
  AlgebraSpec alg;
  alg.family = family;
  alg.n = n;
  alg.layout = opt.layout;
  std::vector<CMatrix> gens;
  std::size_t cartan_count = 0;
  const cplx I(0.0, 1.0);

  switch (family) {
    case Family::A: {
      if (n < 2) throw UsageError("su(n) needs n >= 2");
      alg.size = n;
      for (std::size_t r = 0; r + 1 < n; ++r) gens.push_back(detail::unit(n, r, r, I) - detail::unit(n, r + 1, r + 1, I));
      cartan_count = gens.size();
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = r + 1; s < n; ++s) {
          gens.push_back(detail::unit(n, r, s) - detail::unit(n, s, r));
          gens.push_back(detail::unit(n, r, s, I) + detail::unit(n, s, r, I));
        }
      std::vector<cplx> h(n);
      double mean = 0.5 * static_cast<double>(n - 1);
      for (std::size_t r = 0; r < n; ++r) h[r] = I * (static_cast<double>(n - 1 - r) - mean);
      alg.regular = CMatrix::diagonal(h);
      break;
    }
    case Family::C: {
      if (n < 1) throw UsageError("sp(n) needs n >= 1");
      alg.size = 2 * n;
      auto blk = [n](const CMatrix& a, const CMatrix& b) {
        CMatrix out(2 * n, 2 * n);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            out(i, j) = a(i, j);
            out(i, n + j) = b(i, j);
            out(n + i, j) = -std::conj(b(j, i));
            out(n + i, n + j) = -a(j, i);
          }
        return out;
      };
      const CMatrix zero(n, n);
      for (std::size_t r = 0; r < n; ++r) gens.push_back(blk(detail::unit(n, r, r, I), zero));
      cartan_count = gens.size();
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = r + 1; s < n; ++s) {
          gens.push_back(blk(detail::unit(n, r, s) - detail::unit(n, s, r), zero));
          gens.push_back(blk(detail::unit(n, r, s, I) + detail::unit(n, s, r, I), zero));
        }
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = r; s < n; ++s) {
          CMatrix re = detail::unit(n, r, s);
          CMatrix im = detail::unit(n, r, s, I);
          if (r != s) {
            re += detail::unit(n, s, r);
            im += detail::unit(n, s, r, I);
          }
          gens.push_back(blk(zero, re));
          gens.push_back(blk(zero, im));
        }
      std::vector<cplx> h(2 * n);
      for (std::size_t r = 0; r < n; ++r) {
        h[r] = I * static_cast<double>(n - r);
        h[n + r] = -I * static_cast<double>(n - r);
      }
      alg.regular = CMatrix::diagonal(h);
      break;
    }
    case Family::B:
    case Family::D: {
      const std::size_t m = family == Family::B ? 2 * n + 1 : 2 * n;
      if (family == Family::B && n < 1) throw UsageError("so(2n+1) needs n >= 1");
      if (family == Family::D && n < 2) throw UsageError("so(2n) needs n >= 2");
      alg.size = m;
      const auto planes = detail::orthogonal_torus_planes(m, n, opt.layout);
      for (const auto& [p, q] : planes) gens.push_back(detail::unit(m, p, q) - detail::unit(m, q, p));
      cartan_count = gens.size();
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t s = r + 1; s < m; ++s) gens.push_back(detail::unit(m, r, s) - detail::unit(m, s, r));
      alg.regular = CMatrix(m, m);
      for (std::size_t j = 0; j < planes.size(); ++j) {
        const double coef = opt.ascending_regular ? static_cast<double>(j + 1) : static_cast<double>(n - j);
        alg.regular(planes[j].first, planes[j].second) = coef;
        alg.regular(planes[j].second, planes[j].first) = -coef;
      }
      break;
    }
  }
  if (opt.negate_regular) alg.regular = -alg.regular;
  alg.basis = detail::gram_schmidt(gens, &alg.cartan_dim, cartan_count);
  alg.j = detail::complex_structure(alg.ad_matrix(alg.regular));
  return alg;
}

/// Family-level constraint residual beyond anti-Hermiticity: trace (A),
/// realness (B, D), symplectic block form (C).
inline double family_constraint_residual(const AlgebraSpec& alg, const CMatrix& x) {
  double r = antihermiticity_residual(x);
  switch (alg.family) {
    case Family::A:
      r = std::max(r, std::abs(x.trace()));
      break;
    case Family::B:
    case Family::D:
      r = std::max(r, max_imag(x));
      break;
    case Family::C: {
      const std::size_t n = alg.size / 2;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          r = std::max(r, std::abs(x(n + i, n + j) + x(j, i)));
          r = std::max(r, std::abs(x(i, n + j) - x(j, n + i)));
          r = std::max(r, std::abs(x(n + i, j) + std::conj(x(j, n + i))));
        }
      break;
    }
  }
  return r;
}

inline CMatrix j_operator(const AlgebraSpec& alg, const CMatrix& x) {
  alg.require_member(x, "j_operator");
  return alg.from_coords(alg.j_coords(alg.coords(x)));
}

inline CMatrix c_plus(const AlgebraSpec& alg, const CMatrix& x) {
  alg.require_member(x, "c_plus");
  return x * cplx(0.0, 1.0) + alg.from_coords(alg.j_coords(alg.coords(x)));
}

inline CMatrix c_minus(const AlgebraSpec& alg, const CMatrix& x) {
  alg.require_member(x, "c_minus");
  return x * cplx(0.0, 1.0) - alg.from_coords(alg.j_coords(alg.coords(x)));
}

struct IwasawaParts {
  CMatrix g_part;  // X in g
  CMatrix y;       // Y in g with Z = X + C±(Y)
};

namespace detail {

// Z = A + iB with A, B anti-Hermitian.
inline std::pair<CMatrix, CMatrix> cartesian_split(const CMatrix& z) {
  const CMatrix zh = z.adjoint();
  CMatrix a = (z - zh) * cplx(0.5);
  CMatrix b = (z + zh) * cplx(0.0, -0.5);
  return {std::move(a), std::move(b)};
}

inline IwasawaParts iwasawa_unchecked(const AlgebraSpec& alg, const CMatrix& z, bool plus) {
  auto [a, b] = cartesian_split(z);
  const CMatrix jb = alg.from_coords(alg.j_coords(alg.coords(b)));
  return {plus ? a - jb : a + jb, std::move(b)};
}

}  // namespace detail

/// Z = X + C_+(Y) with X, Y in g.
inline IwasawaParts iwasawa_project(const AlgebraSpec& alg, const CMatrix& z) {
  auto [a, b] = detail::cartesian_split(z);
  alg.require_member(a, "iwasawa_project", 1e-9);
  alg.require_member(b, "iwasawa_project", 1e-9);
  return detail::iwasawa_unchecked(alg, z, true);
}

/// Z = X + C_-(Y) with X, Y in g.
inline IwasawaParts iwasawa_project_minus(const AlgebraSpec& alg, const CMatrix& z) {
  auto [a, b] = detail::cartesian_split(z);
  alg.require_member(a, "iwasawa_project_minus", 1e-9);
  alg.require_member(b, "iwasawa_project_minus", 1e-9);
  return detail::iwasawa_unchecked(alg, z, false);
}

/// Distance of Z from b_+ = C_+(g): Z lies in b_+ iff its g-part vanishes.
inline double bplus_residual(const AlgebraSpec& alg, const CMatrix& z) {
  return detail::iwasawa_unchecked(alg, z, true).g_part.max_abs();
}

inline double bminus_residual(const AlgebraSpec& alg, const CMatrix& z) {
  return detail::iwasawa_unchecked(alg, z, false).g_part.max_abs();
}

inline std::string family_name(Family f) {
  switch (f) {
    case Family::A:
      return "A";
    case Family::B:
      return "B";
    case Family::C:
      return "C";
    case Family::D:
      return "D";
  }
  return "?";
}

}  // namespace pnspec
