#pragma once

// The four classical families of compact hermitian symmetric spaces realized
// as adjoint orbits m = g rho g^{-1}: AIII (Grassmannians), CI (Sp(n)/U(n)),
// DIII (SO(2n)/U(n)) and BDI (SO(n+2)/SO(n)xSO(2)).

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pnspec/errors.hpp"
#include "pnspec/liealg.hpp"
#include "pnspec/numkernel.hpp"

namespace pnspec {

enum class CaseFamily { AIII, CI, DIII, BDI };

struct CaseParams {
  CaseFamily family = CaseFamily::AIII;
  std::size_t k = 0;  // AIII only
  std::size_t n = 0;  // AIII: matrix size; CI, DIII: rank; BDI: m - 2
};

/// One reduction of the subalgebra chain: `level` labels the eigenvalues it
/// produces, `block` is the size of the upper-left block consumed.
struct ChainStep {
  std::size_t level = 0;
  std::size_t block = 0;
};

struct CaseSpec {
  CaseParams params;
  AlgebraSpec alg;
  CMatrix rho;
  CMatrix k_phi;  // exp(pi rho)
  cplx r_plus;
  cplx r_minus;
  CMatrix w_plus;   // orthonormal columns spanning V_+
  CMatrix w_minus;  // orthonormal columns spanning V_-
  std::vector<CMatrix> centralizer;  // orthonormal basis of h
  RMatrix hperp_basis;               // orthonormal basis (coordinates) of h-perp
  std::size_t dim_m = 0;
  std::size_t n_eig = 0;
  bool regular_negated = false;
  double rho_compatibility = 0.0;  // max |(J - ad_rho)| on h-perp
  std::vector<ChainStep> chain_plan;

  CaseFamily family() const { return params.family; }
  bool bdi_odd() const { return params.family == CaseFamily::BDI && alg.size % 2 == 1; }
  std::size_t matrix_size() const { return alg.size; }
  /// Half ambient size floor((n+2)/2) for BDI.
  std::size_t spin_rank() const { return alg.size / 2; }

  std::string name() const {
    switch (params.family) {
      case CaseFamily::AIII:
        return "aiii:k=" + std::to_string(params.k) + ",n=" + std::to_string(params.n);
      case CaseFamily::CI:
        return "ci:n=" + std::to_string(params.n);
      case CaseFamily::DIII:
        return "diii:n=" + std::to_string(params.n);
      case CaseFamily::BDI:
        return "bdi:m=" + std::to_string(params.n + 2);
    }
    return "?";
  }
};

struct OrbitPoint {
  CMatrix g;
  CMatrix m;
};

/// max over h-perp of |(J - ad_rho) v|.
inline double rho_compatibility_residual(const AlgebraSpec& alg, const CMatrix& rho, RMatrix* hperp_out = nullptr) {
  const RMatrix ad = alg.ad_matrix(rho);
  const auto range = antisymmetric_range(ad, 1e-9);
  const RMatrix diff = (alg.j - ad) * range.basis;
  if (hperp_out) *hperp_out = range.basis;
  return diff.max_abs();
}

namespace detail {

inline AlgebraSpec case_algebra(const CaseParams& p, bool negate) {
  AlgebraOptions opt;
  opt.negate_regular = negate;
  switch (p.family) {
    case CaseFamily::AIII:
      return build_algebra(Family::A, p.n, opt);
    case CaseFamily::CI:
      return build_algebra(Family::C, p.n, opt);
    case CaseFamily::DIII:
      opt.layout = CartanLayout::SplitHalves;
      return build_algebra(Family::D, p.n, opt);
    case CaseFamily::BDI: {
      const std::size_t m = p.n + 2;
      opt.ascending_regular = true;
      return build_algebra(m % 2 ? Family::B : Family::D, m / 2, opt);
    }
  }
  throw UsageError("unknown case family");
}

inline void validate_params(const CaseParams& p) {
  switch (p.family) {
    case CaseFamily::AIII:
      if (p.n < 2 || p.k < 1 || p.k >= p.n) throw UsageError("aiii needs 1 <= k < n");
      break;
    case CaseFamily::CI:
      if (p.n < 1) throw UsageError("ci needs n >= 1");
      break;
    case CaseFamily::DIII:
      if (p.n < 2) throw UsageError("diii needs n >= 2");
      break;
    case CaseFamily::BDI:
      if (p.n < 2) throw UsageError("bdi needs ambient size m >= 4");
      break;
  }
}

inline CMatrix identity_columns(std::size_t rows, std::size_t first, std::size_t count) {
  CMatrix w(rows, count);
  for (std::size_t c = 0; c < count; ++c) w(first + c, c) = 1.0;
  return w;
}

}  // namespace detail

/// Builds the case; the regular element is negated once if J fails to agree
/// with ad_rho on h-perp, and a ConventionError is raised if both fail.
inline CaseSpec build_case(const CaseParams& params) {
  detail::validate_params(params);
  CaseSpec cs;
  cs.params = params;
  const cplx I(0.0, 1.0);
  const std::size_t n = params.n;

  cs.alg = detail::case_algebra(params, false);
  const std::size_t N = cs.alg.size;
  cs.rho = CMatrix(N, N);
  switch (params.family) {
    case CaseFamily::AIII: {
      const double k = static_cast<double>(params.k);
      const double nn = static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) cs.rho(i, i) = i < params.k ? I * ((nn - k) / nn) : -I * (k / nn);
      cs.r_plus = I * ((nn - k) / nn);
      cs.r_minus = -I * (k / nn);
      cs.w_plus = detail::identity_columns(n, 0, params.k);
      cs.w_minus = detail::identity_columns(n, params.k, n - params.k);
      for (std::size_t s = 0; s < n; ++s) cs.chain_plan.push_back({s, n - s});
      break;
    }
    case CaseFamily::CI: {
      for (std::size_t i = 0; i < n; ++i) {
        cs.rho(i, i) = 0.5 * I;
        cs.rho(n + i, n + i) = -0.5 * I;
      }
      cs.r_plus = 0.5 * I;
      cs.r_minus = -0.5 * I;
      cs.w_plus = detail::identity_columns(2 * n, 0, n);
      cs.w_minus = detail::identity_columns(2 * n, n, n);
      for (std::size_t s = 0; s < n; ++s) cs.chain_plan.push_back({s, n - s});
      break;
    }
    case CaseFamily::DIII: {
      const double h = 1.0 / std::sqrt(2.0);
      cs.w_plus = CMatrix(2 * n, n);
      cs.w_minus = CMatrix(2 * n, n);
      for (std::size_t i = 0; i < n; ++i) {
        cs.rho(i, n + i) = 0.5;
        cs.rho(n + i, i) = -0.5;
        cs.w_plus(i, i) = h;
        cs.w_plus(n + i, i) = I * h;
        cs.w_minus(i, i) = h;
        cs.w_minus(n + i, i) = -I * h;
      }
      cs.r_plus = 0.5 * I;
      cs.r_minus = -0.5 * I;
      for (std::size_t s = 0; s < n; ++s) cs.chain_plan.push_back({s, n - s});
      break;
    }
    case CaseFamily::BDI: {
      cs.rho(N - 2, N - 1) = 1.0;
      cs.rho(N - 1, N - 2) = -1.0;
      cs.r_plus = 0.5 * I;
      cs.r_minus = -0.5 * I;
      cs.w_plus = detail::identity_columns(N, 0, n);
      cs.w_minus = detail::identity_columns(N, n, 2);
      const std::size_t half = N / 2;
      const std::size_t last = N % 2 ? half : half - 1;
      for (std::size_t k = 1; k <= last; ++k) cs.chain_plan.push_back({k, N - 2 * k});
      break;
    }
  }

  cs.rho_compatibility = rho_compatibility_residual(cs.alg, cs.rho, &cs.hperp_basis);
  if (cs.rho_compatibility > 1e-10) {
    cs.alg = detail::case_algebra(params, true);
    cs.regular_negated = true;
    cs.rho_compatibility = rho_compatibility_residual(cs.alg, cs.rho, &cs.hperp_basis);
    if (cs.rho_compatibility > 1e-10) {
      throw ConventionError("build_case " + cs.name() + ": J disagrees with ad_rho on h-perp for both orientations (" +
                            std::to_string(cs.rho_compatibility) + ")");
    }
  }

  cs.k_phi = matrix_exp(cs.rho * cplx(M_PI));

  // Centralizer: kernel of ad_rho, as the complement of its range.
  const std::size_t d = cs.alg.dim();
  const std::size_t rank = cs.hperp_basis.cols();
  RMatrix proj = RMatrix::identity(d) - cs.hperp_basis * cs.hperp_basis.transpose();
  const auto es = hermitian_eigen(proj, 1e-8);
  for (std::size_t c = 0; c < d; ++c) {
    if (es.values[c] > 0.5) {
      std::vector<double> v(d);
      for (std::size_t r = 0; r < d; ++r) v[r] = es.vectors(r, c);
      cs.centralizer.push_back(cs.alg.from_coords(v));
    }
  }
  if (cs.centralizer.size() + rank != d) throw NumericalError("build_case: centralizer dimension mismatch");
  cs.dim_m = rank;
  cs.n_eig = rank / 2;
  return cs;
}

/// Counter-based per-sample seed (splitmix64 finalizer).
inline std::uint64_t sample_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::vector<double> gaussian_coefficients(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(sample_seed(seed, 0));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> c(count);
  for (auto& x : c) x = normal(rng);
  return c;
}

/// Group-membership residual: unitarity plus det 1 (A), realness (B/D),
/// or the [[A, B], [-conj B, conj A]] symplectic block form (C).
inline double group_constraint_residual(const CaseSpec& cs, const CMatrix& g) {
  double r = unitarity_residual(g);
  switch (cs.alg.family) {
    case Family::A:
      r = std::max(r, std::abs(determinant(g) - cplx(1.0)));
      break;
    case Family::B:
    case Family::D:
      r = std::max(r, max_imag(g));
      r = std::max(r, std::abs(determinant(g) - cplx(1.0)));
      break;
    case Family::C: {
      const std::size_t n = cs.alg.size / 2;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          r = std::max(r, std::abs(g(n + i, n + j) - std::conj(g(i, j))));
          r = std::max(r, std::abs(g(n + i, j) + std::conj(g(i, n + j))));
        }
      break;
    }
  }
  return r;
}

inline CMatrix moment(const CaseSpec& cs, const CMatrix& g, double tol = 1e-9) {
  if (g.rows() != cs.alg.size || g.cols() != cs.alg.size) throw ShapeError("moment: group element has wrong size");
  const double r = group_constraint_residual(cs, g);
  if (!(r <= tol)) throw ConventionError("moment: group constraint residual " + std::to_string(r));
  return g * cs.rho * g.adjoint();
}

inline OrbitPoint point_at(const CaseSpec& cs, const CMatrix& g) { return {g, moment(cs, g)}; }

inline OrbitPoint identity_point(const CaseSpec& cs) { return point_at(cs, CMatrix::identity(cs.alg.size)); }

/// g = exp(sum c_a X_a), c_a standard normal from the seed.
inline OrbitPoint random_point(const CaseSpec& cs, std::uint64_t seed) {
  const CMatrix x = cs.alg.from_coords(gaussian_coefficients(cs.alg.dim(), seed));
  CMatrix g = matrix_exp(x);
  return {g, g * cs.rho * g.adjoint()};
}

/// Random element of the stabilizer subgroup exp(h).
inline CMatrix random_stabilizer(const CaseSpec& cs, std::uint64_t seed) {
  const auto c = gaussian_coefficients(cs.centralizer.size(), seed);
  CMatrix x(cs.alg.size, cs.alg.size);
  for (std::size_t i = 0; i < c.size(); ++i) x += cs.centralizer[i] * cplx(c[i]);
  return matrix_exp(x);
}

struct Idempotents {
  CMatrix sigma_plus;  // g W_+
  CMatrix sigma_minus;
  CMatrix e_plus;  // sigma_+ sigma_+^dagger
  CMatrix e_minus;
};

inline Idempotents idempotents(const CaseSpec& cs, const CMatrix& g) {
  Idempotents out;
  out.sigma_plus = g * cs.w_plus;
  out.sigma_minus = g * cs.w_minus;
  out.e_plus = out.sigma_plus * out.sigma_plus.adjoint();
  out.e_minus = out.sigma_minus * out.sigma_minus.adjoint();
  return out;
}

/// sigma_+ R_+ sigma_+^dagger + sigma_- R_- sigma_-^dagger with R_± the
/// restriction of rho to V_±.
inline CMatrix moment_from_idempotents(const CaseSpec& cs, const Idempotents& id) {
  const CMatrix rp = cs.w_plus.adjoint() * cs.rho * cs.w_plus;
  const CMatrix rm = cs.w_minus.adjoint() * cs.rho * cs.w_minus;
  return id.sigma_plus * rp * id.sigma_plus.adjoint() + id.sigma_minus * rm * id.sigma_minus.adjoint();
}

namespace detail {

inline std::vector<CMatrix> weyl_generators(const CaseSpec& cs) {
  const std::size_t N = cs.alg.size;
  std::vector<CMatrix> gens;
  auto perm_matrix = [N](const std::vector<std::size_t>& p) {
    CMatrix w(N, N);
    for (std::size_t i = 0; i < N; ++i) w(p[i], i) = 1.0;
    return w;
  };
  auto ident = [N]() {
    std::vector<std::size_t> p(N);
    for (std::size_t i = 0; i < N; ++i) p[i] = i;
    return p;
  };
  switch (cs.alg.family) {
    case Family::A: {
      for (std::size_t i = 0; i + 1 < N; ++i) {
        auto p = ident();
        std::swap(p[i], p[i + 1]);
        CMatrix w = perm_matrix(p);
        for (std::size_t r = 0; r < N; ++r) w(r, i) = -w(r, i);
        gens.push_back(w);
      }
      break;
    }
    case Family::C: {
      const std::size_t n = N / 2;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        auto p = ident();
        std::swap(p[i], p[i + 1]);
        std::swap(p[n + i], p[n + i + 1]);
        gens.push_back(perm_matrix(p));
      }
      for (std::size_t i = 0; i < n; ++i) {
        CMatrix w = CMatrix::identity(N);
        w(i, i) = 0.0;
        w(n + i, n + i) = 0.0;
        w(i, n + i) = 1.0;
        w(n + i, i) = -1.0;
        gens.push_back(w);
      }
      break;
    }
    case Family::B:
    case Family::D: {
      const auto planes = orthogonal_torus_planes(N, cs.alg.n, cs.alg.layout);
      for (std::size_t j = 0; j + 1 < planes.size(); ++j) {
        auto p = ident();
        std::swap(p[planes[j].first], p[planes[j + 1].first]);
        std::swap(p[planes[j].second], p[planes[j + 1].second]);
        gens.push_back(perm_matrix(p));
      }
      // Orientation reversals in pairs keep det = +1; in odd size the spare
      // coordinate absorbs a single reversal.
      for (std::size_t j = 0; j < planes.size(); ++j) {
        CMatrix w = CMatrix::identity(N);
        w(planes[j].first, planes[j].first) = -1.0;
        if (N % 2 == 1) {
          w(0, 0) = -1.0;
        } else {
          const auto& other = planes[(j + 1) % planes.size()];
          w(other.first, other.first) = -1.0;
        }
        gens.push_back(w);
      }
      break;
    }
  }
  return gens;
}

}  // namespace detail

/// Torus-fixed points of the orbit: the distinct Weyl images w rho w^{-1},
/// enumerated by closure under simple reflections. The identity coset comes
/// first.
inline std::vector<OrbitPoint> torus_fixed_points(const CaseSpec& cs) {
  const auto gens = detail::weyl_generators(cs);
  std::vector<OrbitPoint> found{identity_point(cs)};
  for (std::size_t head = 0; head < found.size(); ++head) {
    for (const auto& w : gens) {
      const CMatrix g = w * found[head].g;
      const CMatrix m = g * cs.rho * g.adjoint();
      bool seen = false;
      for (const auto& f : found) {
        if ((f.m - m).max_abs() < 1e-9) {
          seen = true;
          break;
        }
      }
      if (!seen) found.push_back({g, m});
    }
  }
  return found;
}

}  // namespace pnspec
