#include <catch2/catch_amalgamated.hpp>

#include "paqft/quantization.hpp"
#include "paqft/random.hpp"

using namespace paqft;

namespace {
struct Fixture {
  GridPtr grid;
  SpectralPtr K;
  KernelPtr pj, W;
  std::mt19937_64 rng{101};
  TruncationOrders ord{2, 4};
  Fixture() {
    GridConfig cfg;
    cfg.nt = 24;
    cfg.nx = 16;
    cfg.T = 0.75 * M_PI;
    cfg.L = 2.0 * M_PI;
    grid = build_grid(cfg);
    K = assemble_K(grid);
    pj = make_kernel(K, KernelKind::PauliJordan);
    W = make_kernel(K, KernelKind::Wightman);
  }
};
}  // namespace

TEST_CASE_METHOD(Fixture, "star product of linear functionals terminates at first order") {
  GridFunction f = random_band_limited(*grid, rng);
  GridFunction h = random_band_limited(*grid, rng);
  RegularFunctional Ff = make_linear(grid, f), Fh = make_linear(grid, h);
  Complex s = sigma_bilinear(*pj, f, h);

  FormalSeries prod = star(Ff, Fh, pj, ord);
  auto probes = random_probes(*grid, rng, 3);
  for (const auto& phi : probes) {
    auto ev = prod.evaluate(phi);
    CHECK(std::abs(ev[{0, 0}] - Ff.evaluate(phi) * Fh.evaluate(phi)) < 1e-12);
    CHECK(std::abs(ev[{0, 1}] - Complex(0, 0.5) * s) < 1e-12);
    CHECK(ev.count({0, 2}) == 0);
  }
  // the commutator is i hbar sigma(f,h) 1
  FormalSeries comm = star(Ff, Fh, pj, ord) - star(Fh, Ff, pj, ord);
  for (const auto& phi : probes) {
    auto ev = comm.evaluate(phi);
    CHECK(std::abs(ev[{0, 0}]) < 1e-13);
    CHECK(std::abs(ev[{0, 1}] - Complex(0, 1) * s) < 1e-12);
  }
  // unit acts trivially
  FormalSeries one = FormalSeries::unit(grid, ord);
  CHECK(series_distance(star(one, FormalSeries::lift(Ff, ord), pj),
                        FormalSeries::lift(Ff, ord), probes) < 1e-14);
  // kind is enforced
  CHECK_THROWS_AS(star(FormalSeries::lift(Ff, ord), FormalSeries::lift(Fh, ord), W),
                  DomainError);
}

TEST_CASE_METHOD(Fixture, "normal-ordered product against its closed first order") {
  GridFunction f = random_band_limited(*grid, rng);
  GridFunction h = random_band_limited(*grid, rng);
  RegularFunctional Ff = make_linear(grid, f), Fh = make_linear(grid, h);
  FormalSeries prod = star_h(FormalSeries::lift(Ff, ord), FormalSeries::lift(Fh, ord), W);
  // hbar coefficient is <f, W h> with the volume pairing
  GridFunction wh = W->apply(h);
  Complex pairing = 0;
  for (int i = 0; i < grid->nt(); ++i)
    for (int j = 0; j < grid->nx(); ++j) pairing += f(i, j) * wh(i, j) * grid->weight(j);
  auto probes = random_probes(*grid, rng, 2);
  for (const auto& phi : probes) {
    auto ev = prod.evaluate(phi);
    CHECK(std::abs(ev[{0, 1}] - pairing) < 1e-11);
  }
}

TEST_CASE_METHOD(Fixture, "normal ordering map") {
  KernelPtr H = derive_h_kernel(*W);
  auto probes = random_probes(*grid, rng, 3);

  // linear functionals are fixed points
  GridFunction f = random_band_limited(*grid, rng);
  FormalSeries Ff = FormalSeries::lift(make_linear(grid, f), ord);
  CHECK(series_distance(alpha_h(Ff, H), Ff, probes) < 1e-14);

  // the grid Wick square
  GridFunction fw = gaussian_bump(*grid, grid->t(grid->nt() / 2), 2.0, 1.5, 1.5);
  RegularFunctional M2 = make_monomial(grid, 2, fw);
  FormalSeries wick = alpha_h(M2, H, ord, /*inverse=*/true);
  Complex trace = 0;
  for (int i = 0; i < grid->nt(); ++i)
    for (int j = 0; j < grid->nx(); ++j)
      if (std::abs(fw(i, j)) > grid->support_threshold())
        trace += H->entry(i, j, i, j) * fw(i, j) * grid->weight(j);
  for (const auto& phi : probes) {
    auto ev = wick.evaluate(phi);
    CHECK(std::abs(ev[{0, 0}] - M2.evaluate(phi)) < 1e-12);
    CHECK(std::abs(ev[{0, 1}] + trace) < 1e-11);
  }

  // inverse pair on degree-4 data
  RegularFunctional F4 = random_functional(grid, rng, 4, 6);
  FormalSeries FS = FormalSeries::lift(F4, ord);
  CHECK(series_distance(alpha_h(alpha_h(FS, H, true), H), FS, probes) < 1e-12);

  // a non-symmetric kernel is rejected
  std::vector<Eigen::MatrixXcd> modes;
  for (int k = 0; k < H->n_modes(); ++k) modes.push_back(H->mode(k));
  modes[1](0, 2) += 0.05;
  auto Hbad = std::make_shared<const PropagatorKernel>(K, KernelKind::HadamardH,
                                                       TwoPointParams{}, std::move(modes));
  CHECK_THROWS_AS(alpha_h(FS, Hbad), DomainError);
}

TEST_CASE_METHOD(Fixture, "equivalence of the two products and its negative control") {
  auto probes = random_probes(*grid, rng, 2);
  RegularFunctional A = random_functional(grid, rng, 3);
  RegularFunctional B = random_functional(grid, rng, 3);
  Report ok = star_equivalence_check(FormalSeries::lift(A, ord), FormalSeries::lift(B, ord),
                                     pj, W, probes);
  CHECK(ok.passed());

  std::vector<Eigen::MatrixXcd> modes;
  for (int k = 0; k < W->n_modes(); ++k) modes.push_back(W->mode(k));
  modes[0](1, 3) += Complex(0, 2e-4);
  auto Wbad = std::make_shared<const PropagatorKernel>(K, KernelKind::Wightman,
                                                       TwoPointParams{}, std::move(modes));
  Report bad = star_equivalence_check(FormalSeries::lift(A, ord), FormalSeries::lift(B, ord),
                                      pj, Wbad, probes);
  CHECK_FALSE(bad.passed());
  CHECK_THROWS_AS(star_h(FormalSeries::lift(A, ord), FormalSeries::lift(B, ord), Wbad),
                  DomainError);
}

TEST_CASE_METHOD(Fixture, "peierls bracket") {
  GridFunction f = random_band_limited(*grid, rng);
  GridFunction h = random_band_limited(*grid, rng);
  RegularFunctional Ff = make_linear(grid, f), Fh = make_linear(grid, h);
  Complex s = sigma_bilinear(*pj, f, h);
  auto probes = random_probes(*grid, rng, 3);
  for (const auto& phi : probes) {
    CHECK(std::abs(peierls(Ff, Fh, pj, phi) - s) < 1e-12);
    CHECK(std::abs(peierls(Ff, Fh, pj, phi) + peierls(Fh, Ff, pj, phi)) < 1e-12);
  }
  RegularFunctional one = RegularFunctional::constant(grid, 1.0);
  CHECK(std::abs(peierls(Ff, one, pj, probes[0])) < 1e-14);

  RegularFunctional A = random_functional(grid, rng, 3);
  RegularFunctional B = random_functional(grid, rng, 3);
  CHECK(classical_limit_check(A, B, pj, probes).passed());
  CHECK(classical_limit_check(A, A, pj, probes).passed());
}

TEST_CASE_METHOD(Fixture, "weyl family") {
  GridFunction f = random_band_limited(*grid, rng);
  GridFunction h = random_band_limited(*grid, rng);
  WeylElement wf = weyl(f), wh = weyl(h);
  Complex s = sigma_bilinear(*pj, f, h);
  WeylElement prod = weyl_star(wf, wh, pj);
  CHECK(std::abs(prod.sigma_accum - s) < 1e-13);
  CHECK(std::abs(prod.phase(1.0) - std::exp(Complex(0, -0.5) * s)) < 1e-13);
  CHECK(std::abs(std::abs(prod.phase(0.7)) - 1.0) < 1e-13);
  GridFunction mf = f;
  mf *= Complex(-1.0);
  WeylElement inv = weyl_star(wf, weyl(mf), pj);
  CHECK(std::abs(inv.phase(1.0) - 1.0) < 1e-13);
  CHECK(inv.f.max_abs() < 1e-13);
}

TEST_CASE_METHOD(Fixture, "series bookkeeping") {
  FormalSeries s(grid, TruncationOrders{1, 2});
  RegularFunctional F = RegularFunctional::constant(grid, 2.0);
  s.accumulate(1, -1, F);
  CHECK_FALSE(s.truncation_hit());
  s.accumulate(2, 0, F);  // beyond lambda_max: dropped and flagged
  CHECK(s.truncation_hit());
  CHECK(s.get(2, 0) == nullptr);
  CHECK_THROWS_AS(s.accumulate(1, -2, F), DomainError);  // below the hbar floor

  // involution is coefficient-wise conjugation
  std::mt19937_64 r2(5);
  RegularFunctional A = random_functional(grid, r2, 2);
  FormalSeries SA(grid, ord);
  SA.set(0, 1, A);
  GridFunction phi = random_configuration(*grid, r2);
  auto ev = SA.conjugated().evaluate(phi);
  CHECK(std::abs(ev[{0, 1}] - std::conj(A.evaluate(phi))) < 1e-13);
}

TEST_CASE_METHOD(Fixture, "state positivity probe") {
  KernelPtr H = derive_h_kernel(*W);
  GridFunction phi = pj->apply(random_band_limited(*grid, rng));
  for (int t = 0; t < 3; ++t) {
    RegularFunctional F = random_functional(grid, rng, 2);
    FormalSeries sq = star(FormalSeries::lift(F.conjugated(), ord),
                           FormalSeries::lift(F, ord), pj);
    Complex v = state_eval(sq, H, phi);
    CHECK(v.real() >= -1e-8 * std::max(1.0, std::abs(v)));
    CHECK(std::abs(v.imag()) <= 1e-8 * std::max(1.0, std::abs(v)));
  }
}

TEST_CASE_METHOD(Fixture, "net causality preconditions") {
  Region r1(grid->nt(), grid->nx()), r2(grid->nt(), grid->nx());
  int i0 = grid->nt() / 2;
  for (int j = 0; j < 5; ++j) r1.insert(i0, j);
  for (int j = 8; j < 13; ++j) r2.insert(i0, j);
  auto builder = [&](std::mt19937_64& rg, const Region& r) {
    GridFunction w(*grid);
    r.for_each([&](int i, int j) { w(i, j) = 1.0; });
    return make_monomial(grid, 2, w);
  };
  auto probes = random_probes(*grid, rng, 2);
  Report rep = net_causality_check(pj, r1, r2, builder, rng, probes, 1, 1e-10);
  CHECK(rep.passed());  // equal-time kernels vanish identically
  CHECK_THROWS_AS(net_causality_check(pj, r1, r1, builder, rng, probes, 1), DomainError);
}
