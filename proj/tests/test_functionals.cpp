#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "paqft/functionals.hpp"
#include "paqft/series.hpp"
#include "paqft/propagators.hpp"
#include "paqft/random.hpp"

using namespace paqft;

namespace {
GridPtr small_grid() {
  GridConfig cfg;
  cfg.nt = 24;
  cfg.nx = 12;
  cfg.T = M_PI / 2;
  cfg.L = 2.0 * M_PI;
  return build_grid(cfg);
}
GridFunction window(const SpacetimeGrid& g) {
  GridFunction w(g);
  for (int i = 8; i <= 14; ++i)
    for (int j = 2; j <= 6; ++j) w(i, j) = 0.5 + 0.1 * i - 0.05 * j;
  return w;
}
}  // namespace

TEST_CASE("linear functionals") {
  auto grid = small_grid();
  const auto& g = *grid;
  GridFunction f = window(g);
  RegularFunctional F = make_linear(grid, f);

  GridFunction ones(g);
  ones.values().setConstant(1.0);
  Complex want = 0;
  for (int i = 0; i < g.nt(); ++i)
    for (int j = 0; j < g.nx(); ++j) want += f(i, j) * g.weight(j);
  CHECK(std::abs(F.evaluate(ones) - want) < 1e-13);
  CHECK(F.support() == f.support(g));

  GridFunction zero(g);
  CHECK(make_linear(grid, zero).is_zero());

  GridFunction bad(g);
  bad(0, 0) = 1.0;
  CHECK_THROWS_AS(make_linear(grid, bad), DomainError);
}

TEST_CASE("local monomials") {
  auto grid = small_grid();
  const auto& g = *grid;
  GridFunction f = window(g);
  std::mt19937_64 rng(7);
  GridFunction phi = random_configuration(g, rng);

  // n = 1 reduces to the linear functional
  RegularFunctional M1 = make_monomial(grid, 1, f);
  RegularFunctional F1 = make_linear(grid, f);
  CHECK(std::abs(M1.evaluate(phi) - F1.evaluate(phi)) < 1e-13);

  // n = 2 with nonnegative window is nonnegative on real fields
  GridFunction fpos(g);
  for (int i = 8; i <= 14; ++i)
    for (int j = 2; j <= 6; ++j) fpos(i, j) = 1.0;
  RegularFunctional M2 = make_monomial(grid, 2, fpos);
  CHECK(M2.evaluate(phi).real() >= 0.0);
  CHECK(std::abs(M2.evaluate(phi).imag()) < 1e-14);

  // direct value
  Complex want = 0;
  for (int i = 0; i < g.nt(); ++i)
    for (int j = 0; j < g.nx(); ++j) want += fpos(i, j) * phi(i, j) * phi(i, j) * g.weight(j);
  CHECK(std::abs(M2.evaluate(phi) - want) < 1e-12);

  CHECK_THROWS_AS(make_monomial(grid, 7, f, 6), DomainError);
}

TEST_CASE("second derivative of a local square is the diagonal kernel") {
  auto grid = small_grid();
  const auto& g = *grid;
  GridFunction f = window(g);
  RegularFunctional M2 = make_monomial(grid, 2, f);
  std::mt19937_64 rng(9);
  GridFunction phi = random_configuration(g, rng);
  GridFunction psi = random_configuration(g, rng);
  SymmetricKernel d2 = M2.derivative(phi, 2);
  Complex got = d2.apply(g, {&psi, &psi});
  Complex want = 0;  // 2 int f psi^2 dmu
  for (int i = 0; i < g.nt(); ++i)
    for (int j = 0; j < g.nx(); ++j) want += 2.0 * f(i, j) * psi(i, j) * psi(i, j) * g.weight(j);
  CHECK(std::abs(got - want) < 1e-12);
  // kernel value on the diagonal is 2 f / weight
  bool found = false;
  for (const auto& t : d2.terms) {
    if (t.f.size() == 2 && t.f[0].is_point() && t.f[0].ti() == 10 && t.f[0].xj() == 4) {
      CHECK(std::abs(t.c - 2.0 * f(10, 4) / g.weight(4)) < 1e-12);
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("derivatives: polynomial calculus and the finite-difference oracle") {
  auto grid = small_grid();
  const auto& g = *grid;
  std::mt19937_64 rng(13);
  GridFunction phi = random_configuration(g, rng);
  GridFunction psi = random_configuration(g, rng);

  GridFunction f = window(g);
  RegularFunctional Ff = make_linear(grid, f);
  SymmetricKernel d1 = Ff.derivative(phi, 1);
  Complex pair = d1.apply(g, {&psi});
  Complex want = 0;
  for (int i = 0; i < g.nt(); ++i)
    for (int j = 0; j < g.nx(); ++j) want += f(i, j) * psi(i, j) * g.weight(j);
  CHECK(std::abs(pair - want) < 1e-13);

  RegularFunctional F = random_functional(grid, rng, 3);
  // top derivative is phi-independent and carries deg!
  int d = F.degree();
  SymmetricKernel top1 = F.derivative(phi, d);
  SymmetricKernel top2 = F.derivative(psi, d);
  std::vector<const GridFunction*> args(d, &psi);
  CHECK(std::abs(top1.apply(g, args) - top2.apply(g, args)) < 1e-12);
  // beyond the top degree the derivative vanishes
  SymmetricKernel over = F.derivative(phi, d + 1);
  std::vector<const GridFunction*> args2(d + 1, &psi);
  CHECK(std::abs(over.apply(g, args2)) == 0.0);

  // <F'(phi), psi> against a central finite difference
  const double eps = 1e-4;
  GridFunction pp = phi, pm = phi;
  pp += Complex(eps) * psi;
  pm += Complex(-eps) * psi;
  Complex fd = (F.evaluate(pp) - F.evaluate(pm)) / (2.0 * eps);
  Complex direct = F.derivative(phi, 1).apply(g, {&psi});
  CHECK(std::abs(fd - direct) / std::max(1.0, std::abs(fd)) < 1e-6);
  // gradient route agrees
  GridFunction grad = F.gradient(phi);
  Complex via_grad = 0;
  for (int i = 0; i < g.nt(); ++i)
    for (int j = 0; j < g.nx(); ++j) via_grad += grad(i, j) * psi(i, j) * g.weight(j);
  CHECK(std::abs(via_grad - direct) < 1e-11);
}

TEST_CASE("derivative kernels are symmetric") {
  auto grid = small_grid();
  const auto& g = *grid;
  std::mt19937_64 rng(29);
  RegularFunctional F = random_functional(grid, rng, 3);
  GridFunction phi = random_configuration(g, rng);
  GridFunction a = random_configuration(g, rng);
  GridFunction b = random_configuration(g, rng);
  SymmetricKernel d2 = F.derivative(phi, 2);
  CHECK(std::abs(d2.apply(g, {&a, &b}) - d2.apply(g, {&b, &a})) < 1e-13);
}

TEST_CASE("pointwise product") {
  auto grid = small_grid();
  const auto& g = *grid;
  std::mt19937_64 rng(31);
  RegularFunctional F = random_functional(grid, rng, 2);
  RegularFunctional G = random_functional(grid, rng, 2);
  RegularFunctional one = RegularFunctional::constant(grid, 1.0);
  GridFunction phi = random_configuration(g, rng);

  CHECK(std::abs(pointwise_product(F, one).evaluate(phi) - F.evaluate(phi)) < 1e-13);
  CHECK(std::abs(pointwise_product(F, G).evaluate(phi) - F.evaluate(phi) * G.evaluate(phi)) <
        1e-12);
  CHECK(pointwise_product(F, G).support().subset_of(F.support().united(G.support())));

  // Leibniz rule for the first derivative
  GridFunction psi = random_configuration(g, rng);
  Complex lhs = pointwise_product(F, G).derivative(phi, 1).apply(g, {&psi});
  Complex rhs = F.derivative(phi, 1).apply(g, {&psi}) * G.evaluate(phi) +
                F.evaluate(phi) * G.derivative(phi, 1).apply(g, {&psi});
  CHECK(std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)) < 1e-12);

  RegularFunctional deep = random_functional(grid, rng, 4, 6);
  RegularFunctional deep2 = random_functional(grid, rng, 4, 6);
  if (deep.degree() + deep2.degree() > 6)
    CHECK_THROWS_AS(pointwise_product(deep, deep2), DomainError);
}

TEST_CASE("additivity of local monomials over disjoint supports") {
  auto grid = small_grid();
  const auto& g = *grid;
  GridFunction f(g);
  for (int i = 6; i <= 16; ++i)
    for (int j = 0; j < g.nx(); ++j) f(i, j) = 1.0;
  RegularFunctional F = make_monomial(grid, 3, f);
  std::mt19937_64 rng(37);
  GridFunction phi = random_configuration(g, rng);
  GridFunction psi1(g), psi2(g);
  for (int i = 6; i <= 16; ++i) {
    for (int j = 0; j <= 4; ++j) psi1(i, j) = 0.3 * std::sin(0.7 * i + j);
    for (int j = 7; j <= 11; ++j) psi2(i, j) = 0.2 * std::cos(0.4 * i - j);
  }
  Complex lhs = F.evaluate(phi + psi1 + psi2);
  Complex rhs = F.evaluate(phi + psi1) - F.evaluate(phi) + F.evaluate(phi + psi2);
  CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("functional and series serialization") {
  auto grid = small_grid();
  const auto& g = *grid;
  GridFunction f = window(g);
  RegularFunctional F = make_linear(grid, f) + make_monomial(grid, 2, f);
  auto j = F.to_json();
  REQUIRE(j.contains("degree_terms"));
  std::set<int> degrees;
  for (const auto& dt : j["degree_terms"]) degrees.insert(dt["n"].get<int>());
  CHECK(degrees == std::set<int>{1, 2});
  CHECK(j["functions"].size() == 1);  // the shared dense factor

  FormalSeries s(grid, TruncationOrders{2, 3});
  s.set(1, -1, F);
  auto sj = s.to_json();
  CHECK(sj["coefficients"].contains("(1,-1)"));
  CHECK(sj["orders"]["lambda_max"] == 2);
}

TEST_CASE("term merging collapses repeated point factors") {
  auto grid = small_grid();
  GridFunction f(*grid);
  f(10, 3) = 1.0;
  RegularFunctional a = make_monomial(grid, 2, f);
  RegularFunctional b = a;
  RegularFunctional sum = a + b;
  CHECK(sum.terms().size() == 2);
  sum.merge_terms();
  CHECK(sum.terms().size() == 1);
  std::mt19937_64 rng(41);
  GridFunction phi = random_configuration(*grid, rng);
  CHECK(std::abs(sum.evaluate(phi) - 2.0 * a.evaluate(phi)) < 1e-14);
}
