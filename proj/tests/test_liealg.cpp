#include <catch_amalgamated.hpp>

#include <random>

#include "pnspec/liealg.hpp"

using namespace pnspec;

namespace {

struct AlgCase {
  Family family;
  std::size_t n;
  std::size_t dim;
  AlgebraOptions opt;
};

std::vector<AlgCase> algebra_cases() {
  return {
      {Family::A, 2, 3, {}},
      {Family::A, 3, 8, {}},
      {Family::A, 4, 15, {}},
      {Family::C, 1, 3, {}},
      {Family::C, 2, 10, {}},
      {Family::C, 3, 21, {}},
      {Family::D, 2, 6, {CartanLayout::SplitHalves, false, false}},
      {Family::D, 3, 15, {CartanLayout::SplitHalves, false, false}},
      {Family::D, 3, 15, {CartanLayout::AdjacentBlocks, true, false}},
      {Family::B, 1, 3, {CartanLayout::AdjacentBlocks, true, false}},
      {Family::B, 2, 10, {CartanLayout::AdjacentBlocks, true, false}},
      {Family::B, 3, 21, {CartanLayout::AdjacentBlocks, true, false}},
  };
}

CMatrix random_element(const AlgebraSpec& alg, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::vector<double> c(alg.dim());
  for (auto& x : c) x = nd(rng);
  return alg.from_coords(c);
}

}  // namespace

TEST_CASE("dimensions and orthonormal bases") {
  for (const auto& c : algebra_cases()) {
    const auto alg = build_algebra(c.family, c.n, c.opt);
    INFO(family_name(c.family) << c.n);
    REQUIRE(alg.dim() == c.dim);
    CHECK(alg.cartan_dim == (c.family == Family::A ? c.n - 1 : c.n));
    for (std::size_t a = 0; a < alg.dim(); ++a) {
      CHECK(family_constraint_residual(alg, alg.basis[a]) < 1e-13);
      for (std::size_t b = a; b < alg.dim(); ++b) {
        const double want = a == b ? 1.0 : 0.0;
        CHECK(std::abs(killing_pairing(alg.basis[a], alg.basis[b]) - want) < 1e-13);
      }
    }
    for (std::size_t a = 0; a < alg.cartan_dim; ++a)
      for (std::size_t b = 0; b < alg.cartan_dim; ++b)
        CHECK(commutator(alg.basis[a], alg.basis[b]).max_abs() < 1e-14);
  }
}

TEST_CASE("invalid ranks are rejected") {
  CHECK_THROWS_AS(build_algebra(Family::A, 1), UsageError);
  CHECK_THROWS_AS(build_algebra(Family::C, 0), UsageError);
  CHECK_THROWS_AS(build_algebra(Family::D, 1), UsageError);
}

TEST_CASE("coordinates round trip and membership") {
  std::mt19937_64 rng(2);
  for (const auto& c : algebra_cases()) {
    const auto alg = build_algebra(c.family, c.n, c.opt);
    const CMatrix x = random_element(alg, rng);
    CHECK(alg.membership_residual(x) < 1e-13);
    CHECK(family_constraint_residual(alg, x) < 1e-13);
    const CMatrix outside = CMatrix::identity(alg.size) * cplx(0.0, 1.0);
    if (c.family != Family::C) CHECK_THROWS_AS(j_operator(alg, x + outside), ConventionError);
    CHECK_THROWS_AS(c_plus(alg, CMatrix::identity(alg.size)), ConventionError);
  }
}

TEST_CASE("complex structure squares to minus one off the torus") {
  for (const auto& c : algebra_cases()) {
    const auto alg = build_algebra(c.family, c.n, c.opt);
    const RMatrix j2 = alg.j * alg.j;
    const std::size_t d = alg.dim();
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) {
        const double want = a == b && a >= alg.cartan_dim ? -1.0 : 0.0;
        CHECK(std::abs(j2(a, b) - want) < 1e-10);
        CHECK(std::abs(alg.j(a, b) + alg.j(b, a)) < 1e-10);
      }
    const RMatrix ad = alg.ad_matrix(alg.regular);
    CHECK((ad * alg.j - alg.j * ad).max_abs() < 1e-10);
  }
}

TEST_CASE("C+ on su(n) matches the closed form") {
  std::mt19937_64 rng(4);
  const cplx i1(0.0, 1.0);
  for (std::size_t n : {2, 3, 4, 5}) {
    const auto alg = build_algebra(Family::A, n);
    for (int t = 0; t < 5; ++t) {
      const CMatrix x = random_element(alg, rng);
      const CMatrix cp = c_plus(alg, x);
      const CMatrix cm = c_minus(alg, x);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s) {
          const cplx want = r < s ? 2.0 * i1 * x(r, s) : r == s ? i1 * x(r, r) : cplx{};
          CHECK(std::abs(cp(r, s) - want) < 1e-12);
          const cplx want_minus = r > s ? 2.0 * i1 * x(r, s) : r == s ? i1 * x(r, r) : cplx{};
          CHECK(std::abs(cm(r, s) - want_minus) < 1e-12);
        }
    }
  }
}

TEST_CASE("Manin triple: Iwasawa split, isotropy and closure") {
  std::mt19937_64 rng(6);
  for (const auto& c : algebra_cases()) {
    const auto alg = build_algebra(c.family, c.n, c.opt);
    INFO(family_name(c.family) << c.n);
    for (int t = 0; t < 4; ++t) {
      const CMatrix x = random_element(alg, rng);
      const CMatrix y = random_element(alg, rng);
      const CMatrix z = x + y * cplx(0.0, 1.0);
      const auto parts = iwasawa_project(alg, z);
      CHECK(alg.membership_residual(parts.g_part) < 1e-12);
      CHECK((parts.g_part + c_plus(alg, parts.y) - z).max_abs() < 1e-12);
      const auto minus = iwasawa_project_minus(alg, z);
      CHECK((minus.g_part + c_minus(alg, minus.y) - z).max_abs() < 1e-12);

      const CMatrix bx = c_plus(alg, x);
      const CMatrix by = c_plus(alg, y);
      CHECK(bplus_residual(alg, bx) < 1e-12);
      CHECK(bminus_residual(alg, c_minus(alg, x)) < 1e-12);
      CHECK(bplus_residual(alg, commutator(bx, by)) < 1e-10);
      CHECK(std::abs(im_tr_pairing(x, y)) < 1e-12);
      CHECK(std::abs(im_tr_pairing(bx, by)) < 1e-12);
    }
    CHECK_THROWS_AS(iwasawa_project(alg, CMatrix::identity(alg.size) * cplx(2.0)), ConventionError);
  }
}
