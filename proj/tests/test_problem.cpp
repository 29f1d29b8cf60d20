#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "cgn/problem.hpp"
#include "oracles.hpp"

using namespace cgn;

TEST_CASE("scalar quadratic map") {
  // F(x) = x^2 - 2
  PolynomialMap F(1, 1, {{{1.0, {2}}, {-2.0, {0}}}});
  Vector v = F.eval({1.5});
  REQUIRE(v.size() == 1);
  CHECK(v[0] == doctest::Approx(0.25).epsilon(1e-15));
  Matrix J = F.jacobian({1.5});
  CHECK(J(0, 0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(F.jacobian({0.0})(0, 0) == 0.0);
}

TEST_CASE("two-dimensional maps frozen values") {
  // F(x,y) = (x + 0.05 x^2 + 0.25, y + 0.05 y^2 + 0.25)
  PolynomialMap G(2, 2,
                  {{{1.0, {1, 0}}, {0.05, {2, 0}}, {0.25, {0, 0}}},
                   {{1.0, {0, 1}}, {0.05, {0, 2}}, {0.25, {0, 0}}}});
  Vector g0 = G.eval({0.0, 0.0});
  CHECK(g0[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(g0[1] == doctest::Approx(0.25).epsilon(1e-15));
  Matrix Jg = G.jacobian({0.0, 0.0});
  CHECK(Jg(0, 0) == 1.0);
  CHECK(Jg(0, 1) == 0.0);
  CHECK(Jg(1, 0) == 0.0);
  CHECK(Jg(1, 1) == 1.0);

  // F(x,y) = (x^2 + y^2 - 2, x - y)
  PolynomialMap H(2, 2,
                  {{{1.0, {2, 0}}, {1.0, {0, 2}}, {-2.0, {0, 0}}},
                   {{1.0, {1, 0}}, {-1.0, {0, 1}}}});
  Vector h0 = H.eval({1.05, 0.95});
  CHECK(h0[0] == doctest::Approx(0.005).epsilon(1e-12));
  CHECK(h0[1] == doctest::Approx(0.1).epsilon(1e-12));
  Matrix Jh = H.jacobian({1.05, 0.95});
  CHECK(Jh(0, 0) == doctest::Approx(2.1).epsilon(1e-15));
  CHECK(Jh(0, 1) == doctest::Approx(1.9).epsilon(1e-15));
  CHECK(Jh(1, 0) == 1.0);
  CHECK(Jh(1, 1) == -1.0);
}

TEST_CASE("mixed monomials and zero-coordinate edge cases") {
  // F(x,y,z) = 3 x y^2 z - x + 4
  PolynomialMap F(3, 1, {{{3.0, {1, 2, 1}}, {-1.0, {1, 0, 0}}, {4.0, {0, 0, 0}}}});
  CHECK(F.eval({2.0, -1.0, 0.5})[0] == doctest::Approx(3.0 * 2 * 1 * 0.5 - 2 + 4));
  Matrix J = F.jacobian({2.0, -1.0, 0.5});
  CHECK(J(0, 0) == doctest::Approx(3.0 * 1 * 0.5 - 1.0));   // 3 y^2 z - 1
  CHECK(J(0, 1) == doctest::Approx(3.0 * 2 * (-1) * 2 * 0.5));  // 6 x y z
  CHECK(J(0, 2) == doctest::Approx(3.0 * 2 * 1));           // 3 x y^2

  // at a zero coordinate the x^1 derivative is still exact
  Matrix J0 = F.jacobian({0.0, 3.0, 2.0});
  CHECK(J0(0, 0) == doctest::Approx(3.0 * 9 * 2 - 1.0));
  CHECK(J0(0, 1) == 0.0);  // contains x factor
  CHECK(J0(0, 2) == 0.0);
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(PolynomialMap(0, 1, {}), std::invalid_argument);
  CHECK_THROWS_AS(PolynomialMap(1, 0, {}), std::invalid_argument);
  CHECK_THROWS_AS(PolynomialMap(1, 2, {{}}), std::invalid_argument);  // m mismatch
  CHECK_THROWS_AS(PolynomialMap(2, 1, {{{1.0, {1}}}}), std::invalid_argument);
  CHECK_THROWS_AS(PolynomialMap(1, 1, {{{std::nan(""), {1}}}}),
                  std::invalid_argument);
  PolynomialMap F(2, 1, {{{1.0, {1, 1}}}});
  CHECK_THROWS_AS(F.eval({1.0}), std::invalid_argument);
  CHECK_THROWS_AS(F.jacobian({1.0, std::nan("")}), std::invalid_argument);
  // empty component list is a valid zero map
  PolynomialMap Z(2, 2, {{}, {}});
  CHECK(Z.eval({3.0, 4.0}) == Vector{0.0, 0.0});
}

TEST_CASE("100 random maps: exact Jacobian matches finite differences") {
  std::mt19937_64 rng(777);
  std::uniform_int_distribution<int> dim(1, 4);
  std::uniform_int_distribution<int> nterms(0, 5);
  std::uniform_int_distribution<int> coef(-3, 3);
  std::uniform_int_distribution<unsigned> powr(0, 3);
  std::uniform_real_distribution<double> pt(-1.5, 1.5);

  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = static_cast<std::size_t>(dim(rng));
    std::size_t m = static_cast<std::size_t>(dim(rng));
    std::vector<std::vector<Term>> comps(m);
    for (auto& comp : comps) {
      int K = nterms(rng);
      for (int k = 0; k < K; ++k) {
        Term t;
        t.coeff = static_cast<double>(coef(rng));
        t.powers.resize(n);
        for (auto& p : t.powers) p = powr(rng);
        comp.push_back(std::move(t));
      }
    }
    PolynomialMap F(n, m, comps);
    Vector x(n);
    for (auto& v : x) v = pt(rng);

    Matrix J = F.jacobian(x);
    Matrix Jfd = oracle::fd_jacobian(
        [&](const Vector& p) { return F.eval(p); }, x);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        CHECK(std::fabs(J(i, j) - Jfd(i, j)) <=
              1e-6 * (1.0 + std::fabs(J(i, j))));
  }
}
