#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "pnspec/numkernel.hpp"

using namespace pnspec;
using Catch::Matchers::WithinAbs;

namespace {

CMatrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = cplx(nd(rng), nd(rng));
  return (a + a.adjoint()) * cplx(0.5);
}

RMatrix random_real(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  RMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = nd(rng);
  return a;
}

}  // namespace

TEST_CASE("matrix construction rejects bad input") {
  CHECK_THROWS_AS(RMatrix(2, 2, {1.0, 2.0, 3.0}), ShapeError);
  CHECK_THROWS_AS((RMatrix{{1.0, 2.0}, {3.0}}), ShapeError);
  CHECK_THROWS_AS(RMatrix(1, 1, {std::nan("")}), NumericalError);
  CHECK_THROWS_AS(RMatrix(2, 3) * RMatrix(2, 3), ShapeError);
  CHECK_THROWS_AS(RMatrix(2, 2) + RMatrix(3, 3), ShapeError);
}

TEST_CASE("basic algebra") {
  const RMatrix a{{1.0, 2.0}, {3.0, 4.0}};
  const RMatrix b{{0.0, 1.0}, {1.0, 0.0}};
  const RMatrix ab = a * b;
  CHECK(ab(0, 0) == 2.0);
  CHECK(ab(1, 1) == 3.0);
  CHECK(a.trace() == 5.0);
  CHECK(a.transpose()(0, 1) == 3.0);
  CHECK_THAT(determinant(a), WithinAbs(-2.0, 1e-14));
  CHECK(commutator(a, a).max_abs() == 0.0);
  const CMatrix z{{cplx(1, 2), cplx(0, 1)}, {cplx(3, 0), cplx(0, -1)}};
  CHECK(z.adjoint()(0, 1) == cplx(3, 0));
  CHECK(z.adjoint()(1, 0) == cplx(0, -1));
  CHECK(hermiticity_residual(CMatrix{{1.0, cplx(0, 1)}, {cplx(0, -1), 2.0}}) == 0.0);
  CHECK(a.leading(1)(0, 0) == 1.0);
}

TEST_CASE("hermitian eigen on known matrices") {
  const auto e1 = hermitian_eigen(RMatrix{{2.0, 1.0}, {1.0, 2.0}});
  CHECK_THAT(e1.values[0], WithinAbs(1.0, 1e-14));
  CHECK_THAT(e1.values[1], WithinAbs(3.0, 1e-14));
  const auto e2 = hermitian_eigenvalues(CMatrix{{1.0, cplx(0, 1)}, {cplx(0, -1), 1.0}});
  CHECK_THAT(e2[0], WithinAbs(0.0, 1e-14));
  CHECK_THAT(e2[1], WithinAbs(2.0, 1e-14));
  CHECK_THROWS_AS(hermitian_eigen(RMatrix{{1.0, 2.0}, {0.0, 1.0}}), ConventionError);
}

TEST_CASE("hermitian eigen reconstructs random matrices") {
  std::mt19937_64 rng(11);
  for (std::size_t n : {1, 3, 6, 10}) {
    for (int trial = 0; trial < 5; ++trial) {
      const CMatrix a = random_hermitian(n, rng);
      const auto es = hermitian_eigen(a);
      CHECK(std::is_sorted(es.values.begin(), es.values.end()));
      CHECK(unitarity_residual(es.vectors) < 1e-12);
      std::vector<cplx> d(es.values.begin(), es.values.end());
      const CMatrix back = es.vectors * CMatrix::diagonal(d) * es.vectors.adjoint();
      CHECK((back - a).max_abs() < 1e-12);
      double sum = 0.0;
      for (double v : es.values) sum += v;
      CHECK_THAT(sum, WithinAbs(a.trace().real(), 1e-12));
    }
  }
}

TEST_CASE("real eigenvalues of a companion matrix") {
  // (x - 1)(x - 2)(x - 3)(x^2 + 1) = x^5 - 6x^4 + 12x^3 - 12x^2 + 11x - 6
  const std::vector<double> c{-6.0, 11.0, -12.0, 12.0, -6.0};
  RMatrix comp(5, 5);
  for (std::size_t i = 1; i < 5; ++i) comp(i, i - 1) = 1.0;
  for (std::size_t i = 0; i < 5; ++i) comp(i, 4) = -c[i];
  const auto ev = real_eigenvalues(comp);
  REQUIRE(ev.size() == 5);
  CHECK(std::abs(ev[0] - cplx(0, -1)) < 1e-10);
  CHECK(std::abs(ev[1] - cplx(0, 1)) < 1e-10);
  CHECK(std::abs(ev[2] - cplx(1, 0)) < 1e-10);
  CHECK(std::abs(ev[3] - cplx(2, 0)) < 1e-10);
  CHECK(std::abs(ev[4] - cplx(3, 0)) < 1e-10);
}

TEST_CASE("real eigenvalues agree with the symmetric solver") {
  std::mt19937_64 rng(5);
  for (std::size_t n : {2, 5, 9, 14}) {
    const RMatrix a = random_real(n, rng);
    const RMatrix s = (a + a.transpose()) * 0.5;
    const auto ev = real_eigenvalues(s);
    const auto ref = hermitian_eigenvalues(s);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(ev[i].imag()) < 1e-10);
      CHECK_THAT(ev[i].real(), WithinAbs(ref[i], 1e-10));
    }
  }
}

TEST_CASE("antisymmetric spectra come in imaginary pairs") {
  std::mt19937_64 rng(8);
  const RMatrix a = random_real(7, rng);
  const RMatrix p = a - a.transpose();
  const auto ev = real_eigenvalues(p);
  double sum = 0.0;
  for (const auto& e : ev) {
    CHECK(std::abs(e.real()) < 1e-10);
    sum += e.imag();
  }
  CHECK(std::abs(sum) < 1e-10);
}

TEST_CASE("matrix exponential") {
  CHECK((matrix_exp(RMatrix(3, 3)) - RMatrix::identity(3)).max_abs() == 0.0);
  const double t = 2.7;
  const RMatrix rot = matrix_exp(RMatrix{{0.0, -t}, {t, 0.0}});
  CHECK_THAT(rot(0, 0), WithinAbs(std::cos(t), 1e-14));
  CHECK_THAT(rot(1, 0), WithinAbs(std::sin(t), 1e-14));

  std::mt19937_64 rng(3);
  for (double scale : {0.1, 1.0, 8.0}) {
    const RMatrix x = random_real(5, rng) * scale;
    const RMatrix e = matrix_exp(x);
    const RMatrix einv = matrix_exp(x * -1.0);
    // Both identities lose accuracy in proportion to the condition number.
    const double cond = e.norm1() * einv.norm1();
    const double rel = std::abs(determinant(e) - std::exp(x.trace())) / std::exp(x.trace());
    CHECK(rel < 1e-13 * cond);
    CHECK((e * einv - RMatrix::identity(5)).max_abs() < 1e-14 * cond);
  }
  // Commuting blocks: exp(A + B) = exp(A) exp(B).
  const RMatrix a = random_real(4, rng);
  const RMatrix b = a * a * 0.3 - a * 2.0;
  CHECK((matrix_exp(a + b) - matrix_exp(a) * matrix_exp(b)).max_abs() < 1e-10 * matrix_exp(a + b).max_abs());
  const CMatrix h = random_hermitian(4, rng);
  CHECK(unitarity_residual(matrix_exp(h * cplx(0, 1))) < 1e-13);
}

TEST_CASE("antisymmetric range and pseudo-inverse") {
  RMatrix p(4, 4);
  p(0, 1) = 2.0;
  p(1, 0) = -2.0;
  p(2, 3) = 1e-14;
  p(3, 2) = -1e-14;
  const auto r = antisymmetric_range(p);
  CHECK(r.rank == 2);
  CHECK((p * r.pinv * p - p).max_abs() < 1e-12);
  CHECK((r.basis.transpose() * r.basis - RMatrix::identity(2)).max_abs() < 1e-12);

  std::mt19937_64 rng(9);
  const RMatrix b = random_real(6, rng);
  const RMatrix q = b - b.transpose();
  const auto rq = antisymmetric_range(q);
  CHECK(rq.rank == 6);
  CHECK((q * rq.pinv - RMatrix::identity(6)).max_abs() < 1e-9);
}

TEST_CASE("finite-difference gradient") {
  auto f = [](const std::vector<double>& x) { return std::sin(x[0]) * x[1] * x[1] + std::exp(x[2]); };
  const std::vector<double> x0{0.3, -1.2, 0.4};
  const std::vector<std::vector<double>> dirs{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}};
  const auto g = fd_gradient(f, x0, dirs);
  const double gx = std::cos(0.3) * 1.44, gy = 2.0 * std::sin(0.3) * -1.2, gz = std::exp(0.4);
  CHECK_THAT(g[0], WithinAbs(gx, 1e-9));
  CHECK_THAT(g[1], WithinAbs(gy, 1e-9));
  CHECK_THAT(g[2], WithinAbs(gz, 1e-9));
  CHECK_THAT(g[3], WithinAbs(gx + gy + gz, 1e-9));

  // Richardson extrapolation of two coarse steps as an independent oracle.
  const auto coarse = fd_gradient(f, x0, dirs, 1e-2);
  const auto fine = fd_gradient(f, x0, dirs, 5e-3);
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const double extrap = (4.0 * fine[i] - coarse[i]) / 3.0;
    CHECK_THAT(g[i], WithinAbs(extrap, 1e-8));
  }
  CHECK_THROWS_AS(fd_gradient(f, x0, {{1.0, 0.0}}), ShapeError);
  auto bad = [](const std::vector<double>&) { return std::nan(""); };
  CHECK_THROWS_AS(fd_gradient(bad, x0, dirs), NumericalError);
}
