#include <catch_amalgamated.hpp>

#include <set>

#include "pnspec/hermsym.hpp"
#include "pnspec/spinrep.hpp"

using namespace pnspec;

TEST_CASE("word basis order") {
  const auto b = SpinBasis::make(4);
  REQUIRE(b.dim() == 16);
  CHECK(b.words.front() == 0U);
  for (std::size_t i = 0; i + 1 < b.dim(); ++i) CHECK(SpinBasis::precedes(b.words[i], b.words[i + 1]));
  std::set<std::uint32_t> distinct(b.words.begin(), b.words.end());
  CHECK(distinct.size() == 16);
  // {1} precedes {0, 1}: equal largest letter, then the shorter word.
  CHECK(SpinBasis::precedes(0b10, 0b11));
  CHECK(SpinBasis::precedes(0b011, 0b100));
  CHECK(SpinBasis::letters(0b101) == std::vector<std::size_t>{2, 0});
  CHECK_THROWS_AS(SpinBasis::make(0), UsageError);
}

TEST_CASE("two-dimensional gammas") {
  const auto g = gamma_matrices(1, false);
  REQUIRE(g.size() == 2);
  const CMatrix prod = g[0] * g[1];
  CHECK(std::abs(prod(0, 0) - cplx(0, 1)) < 1e-15);
  CHECK(std::abs(prod(1, 1) - cplx(0, -1)) < 1e-15);
  CHECK(std::abs(prod(0, 1)) + std::abs(prod(1, 0)) < 1e-15);
}

TEST_CASE("Clifford relations") {
  for (std::size_t n = 1; n <= 5; ++n) {
    for (bool odd : {false, true}) {
      const auto rep = make_spin_representation(n, odd);
      CHECK(rep.gammas.size() == 2 * n + (odd ? 1 : 0));
      CHECK(clifford_residual(rep.gammas) <= 1e-13);
      for (const auto& g : rep.gammas) CHECK(hermiticity_residual(g) < 1e-15);
      if (odd) {
        for (std::uint32_t w = 0; w < rep.basis.dim(); ++w)
          CHECK(rep.gammas[0](w, w) == cplx(SpinBasis::degree(w) % 2 ? -1.0 : 1.0));
      }
    }
  }
}

TEST_CASE("creation operators anticommute") {
  const auto rep = make_spin_representation(3, false);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      const CMatrix cc = rep.creation[i] * rep.creation[j] + rep.creation[j] * rep.creation[i];
      CHECK(cc.max_abs() == 0.0);
      CMatrix ca = rep.creation[i] * rep.annihilation[j] + rep.annihilation[j] * rep.creation[i];
      if (i == j) ca -= CMatrix::identity(8);
      CHECK(ca.max_abs() == 0.0);
    }
}

TEST_CASE("spin representation of the orthogonal algebras") {
  for (std::size_t m : {4, 5, 6, 7, 8}) {
    const auto cs = build_case({CaseFamily::BDI, 0, m - 2});
    INFO("m = " << m);
    const auto rep = make_spin_representation(cs.spin_rank(), cs.bdi_odd());
    CHECK(spin_homomorphism_residual(rep, cs.alg, 20, 3) <= 1e-10);
    CHECK(last_rotation_residual(rep, cs.alg, cs.rho) <= 1e-12);
    CHECK(spin_weight_residual(rep, cs.alg, 5, 4) <= 1e-10);
    std::vector<CMatrix> raised;
    for (std::uint64_t s = 0; s < 20; ++s)
      raised.push_back(c_plus(cs.alg, cs.alg.from_coords(gaussian_coefficients(cs.alg.dim(), s))));
    CHECK(spin_lower_residual(rep, raised) <= 1e-10);
    CHECK_THROWS_AS(spin_rep(rep, cs.alg, CMatrix::identity(m)), ConventionError);
  }
}

TEST_CASE("spin_rep rejects non-orthogonal algebras") {
  const auto rep = make_spin_representation(1, false);
  const auto su2 = build_algebra(Family::A, 2);
  CHECK_THROWS_AS(spin_rep(rep, su2, su2.basis[0]), UsageError);
}
