#pragma once

// Spin representation of so(2N) / so(2N+1) on the exterior algebra of C^N.
// Basis words are subsets of letters {0, ..., N-1} encoded as bitmasks;
// ordering compares the largest letters first, which coincides with the
// numeric order of the bitmask, so the empty word comes first.

#include <bit>
#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pnspec/errors.hpp"
#include "pnspec/liealg.hpp"
#include "pnspec/numkernel.hpp"

namespace pnspec {

struct SpinBasis {
  std::size_t rank = 0;  // N
  std::vector<std::uint32_t> words;

  std::size_t dim() const { return words.size(); }

  static SpinBasis make(std::size_t rank) {
    if (rank < 1 || rank > 12) throw UsageError("spin basis rank must be in [1, 12]");
    SpinBasis b;
    b.rank = rank;
    b.words.resize(std::size_t{1} << rank);
    for (std::uint32_t w = 0; w < b.words.size(); ++w) b.words[w] = w;
    return b;
  }

  /// Letters of a word, largest first.
  static std::vector<std::size_t> letters(std::uint32_t w) {
    std::vector<std::size_t> out;
    for (int j = 31; j >= 0; --j)
      if (w >> j & 1U) out.push_back(static_cast<std::size_t>(j));
    return out;
  }

  /// Strict word order: compare descending letter sequences lexicographically.
  static bool precedes(std::uint32_t x, std::uint32_t y) {
    const auto lx = letters(x);
    const auto ly = letters(y);
    return std::lexicographical_compare(lx.begin(), lx.end(), ly.begin(), ly.end());
  }

  static int degree(std::uint32_t w) { return std::popcount(w); }
};

struct SpinRepresentation {
  SpinBasis basis;
  bool odd = false;
  std::vector<CMatrix> creation;      // c_j
  std::vector<CMatrix> annihilation;  // a_j = c_j^dagger
  std::vector<CMatrix> gammas;        // real-index order matching the so(m) matrix indices
  std::vector<std::vector<CMatrix>> products;  // products[a][b] = Gamma_a Gamma_b for a < b

  std::size_t vector_size() const { return 2 * basis.rank + (odd ? 1 : 0); }

  /// S(X) = (1/8) sum X_ab [Gamma_a, Gamma_b] for real antisymmetric X (complex entries accepted).
  CMatrix apply(const CMatrix& x) const {
    const std::size_t m = vector_size();
    if (x.rows() != m || x.cols() != m) throw ShapeError("spin representation: wrong matrix size");
    const std::size_t dim = basis.dim();
    CMatrix s(dim, dim);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a + 1; b < m; ++b) {
        const cplx coef = 0.25 * (x(a, b) - x(b, a));
        if (coef == cplx{}) continue;
        const auto& src = products[a][b].data();
        auto& dst = s.data();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += coef * src[i];
      }
    return s;
  }

  /// Number operator of letter j: c_j a_j.
  CMatrix number_operator(std::size_t j) const { return creation.at(j) * annihilation.at(j); }
};

/// Gammas in the order of the orthogonal matrix indices: in odd size the
/// leading index carries Gamma_0 = (-1)^deg, then each plane j contributes
/// c_j + a_j and i (c_j - a_j).
inline SpinRepresentation make_spin_representation(std::size_t rank, bool odd) {
  SpinRepresentation rep;
  rep.basis = SpinBasis::make(rank);
  rep.odd = odd;
  const std::size_t dim = rep.basis.dim();
  for (std::size_t j = 0; j < rank; ++j) {
    CMatrix c(dim, dim);
    for (std::uint32_t w = 0; w < dim; ++w) {
      if (w >> j & 1U) continue;
      const int below = std::popcount(w & ((1U << j) - 1U));
      c(w | (1U << j), w) = below % 2 ? -1.0 : 1.0;
    }
    rep.annihilation.push_back(c.adjoint());
    rep.creation.push_back(std::move(c));
  }
  if (odd) {
    std::vector<cplx> parity(dim);
    for (std::uint32_t w = 0; w < dim; ++w) parity[w] = SpinBasis::degree(w) % 2 ? -1.0 : 1.0;
    rep.gammas.push_back(CMatrix::diagonal(parity));
  }
  for (std::size_t j = 0; j < rank; ++j) {
    rep.gammas.push_back(rep.creation[j] + rep.annihilation[j]);
    rep.gammas.push_back((rep.creation[j] - rep.annihilation[j]) * cplx(0.0, 1.0));
  }
  const std::size_t m = rep.gammas.size();
  rep.products.assign(m, std::vector<CMatrix>(m));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) rep.products[a][b] = rep.gammas[a] * rep.gammas[b];
  return rep;
}

inline std::vector<CMatrix> gamma_matrices(std::size_t rank, bool odd) {
  return make_spin_representation(rank, odd).gammas;
}

/// Max |{Gamma_a, Gamma_b} - 2 delta_ab| over all pairs.
inline double clifford_residual(const std::vector<CMatrix>& gammas) {
  double r = 0.0;
  for (std::size_t a = 0; a < gammas.size(); ++a)
    for (std::size_t b = a; b < gammas.size(); ++b) {
      CMatrix ac = gammas[a] * gammas[b] + gammas[b] * gammas[a];
      if (a == b) ac -= CMatrix::identity(ac.rows()) * cplx(2.0);
      r = std::max(r, ac.max_abs());
    }
  return r;
}

/// Spin image of X in an orthogonal algebra with the adjacent-block torus.
inline CMatrix spin_rep(const SpinRepresentation& rep, const AlgebraSpec& alg, const CMatrix& x) {
  if (alg.family != Family::B && alg.family != Family::D) throw UsageError("spin_rep needs an orthogonal algebra");
  if (alg.layout != CartanLayout::AdjacentBlocks) throw UsageError("spin_rep needs the adjacent-block torus");
  alg.require_member(x, "spin_rep");
  return rep.apply(x);
}

namespace detail {

inline CMatrix random_orthogonal_element(const AlgebraSpec& alg, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::vector<double> c(alg.dim());
  for (auto& x : c) x = nd(rng);
  return alg.from_coords(c);
}

/// Index of the first matrix coordinate of rotation plane j.
inline std::size_t plane_offset(const SpinRepresentation& rep, std::size_t j) { return (rep.odd ? 1 : 0) + 2 * j; }

}  // namespace detail

/// max |S([X,Y]) - [S(X), S(Y)]| over random pairs.
inline double spin_homomorphism_residual(const SpinRepresentation& rep, const AlgebraSpec& alg, std::size_t pairs,
                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double r = 0.0;
  for (std::size_t k = 0; k < pairs; ++k) {
    const CMatrix x = detail::random_orthogonal_element(alg, rng);
    const CMatrix y = detail::random_orthogonal_element(alg, rng);
    const CMatrix sx = spin_rep(rep, alg, x);
    r = std::max(r, (spin_rep(rep, alg, commutator(x, y)) - commutator(sx, spin_rep(rep, alg, y))).max_abs());
    r = std::max(r, antihermiticity_residual(sx));
  }
  return r;
}

/// S(rho) against i(a_N c_N - 1/2) for the rotation generator of the last plane.
inline double last_rotation_residual(const SpinRepresentation& rep, const AlgebraSpec& alg, const CMatrix& rho) {
  const std::size_t last = rep.basis.rank - 1;
  const CMatrix expected =
      (rep.annihilation[last] * rep.creation[last] - CMatrix::identity(rep.basis.dim()) * cplx(0.5)) * cplx(0.0, 1.0);
  return (spin_rep(rep, alg, rho) - expected).max_abs();
}

/// Spectrum of S(sum_j a_j E_j) against {(i/2) sum ±a_j} for random plane
/// coefficients a_j, where E_j rotates plane j.
inline double spin_weight_residual(const SpinRepresentation& rep, const AlgebraSpec& alg, std::size_t trials,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  const std::size_t n = rep.basis.rank;
  double r = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<double> a(n);
    for (auto& v : a) v = nd(rng);
    CMatrix x(rep.vector_size(), rep.vector_size());
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t p = detail::plane_offset(rep, j);
      x(p, p + 1) = a[j];
      x(p + 1, p) = -a[j];
    }
    auto got = hermitian_eigenvalues(CMatrix(spin_rep(rep, alg, x) * cplx(0.0, -1.0)));
    std::vector<double> want;
    for (std::uint32_t s = 0; s < rep.basis.dim(); ++s) {
      double w = 0.0;
      for (std::size_t j = 0; j < n; ++j) w += (s >> j & 1U ? -0.5 : 0.5) * a[j];
      want.push_back(w);
    }
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    for (std::size_t k = 0; k < want.size(); ++k) r = std::max(r, std::abs(got[k] - want[k]));
  }
  return r;
}

/// Largest strictly-lower entry of S applied to the given complexified elements.
inline double spin_lower_residual(const SpinRepresentation& rep, const std::vector<CMatrix>& elements) {
  double r = 0.0;
  for (const auto& z : elements) {
    const CMatrix s = rep.apply(z);
    for (std::size_t i = 0; i < s.rows(); ++i)
      for (std::size_t k = 0; k < i; ++k) r = std::max(r, std::abs(s(i, k)));
  }
  return r;
}

}  // namespace pnspec
