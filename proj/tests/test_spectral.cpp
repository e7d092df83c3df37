#include <catch2/catch_amalgamated.hpp>

#include "paqft/propagators.hpp"
#include "paqft/random.hpp"
#include "paqft/spectral.hpp"

using namespace paqft;

namespace {
GridPtr grid_n8(double mass = 1.0) {
  GridConfig cfg;
  cfg.nt = 32;
  cfg.nx = 8;
  cfg.T = M_PI / 2;
  cfg.L = 2.0 * M_PI;
  cfg.mass = mass;
  return build_grid(cfg);
}
}  // namespace

TEST_CASE("fourier eigenvalues on the unit-lapse grid") {
  auto K = assemble_K(grid_n8());
  // -d^2/dx^2 + 1 on 8 points of the 2 pi circle: n^2 + 1, n = -4..3
  std::vector<double> want = {1, 2, 2, 5, 5, 10, 10, 17};
  REQUIRE(K->n_modes() == 8);
  for (int k = 0; k < 8; ++k) CHECK(K->eigenvalues()[k] == Catch::Approx(want[k]).margin(1e-10));
  CHECK(K->eigenvalues()[0] == Catch::Approx(1.0));  // constant mode carries m^2
  CHECK(K->orthonormality_defect() < 1e-10);
  CHECK(K->reconstruction_defect() < 1e-10);
}

TEST_CASE("massless operator keeps its zero mode; kernels requiring a gap reject it") {
  auto K = assemble_K(grid_n8(0.0));
  CHECK(K->has_zero_mode());
  CHECK_THROWS_WITH(make_kernel(K, KernelKind::Wightman),
                    Catch::Matchers::ContainsSubstring("infrared"));
  CHECK_THROWS_AS(make_kernel(K, KernelKind::HadamardH), DomainError);
  // the retarded operator survives (ramp kernel on the zero mode)
  std::mt19937_64 rng(3);
  GridFunction f = random_band_limited(K->grid(), rng);
  auto ret = make_kernel(K, KernelKind::Retarded);
  GridFunction u = green_apply(*ret, f);
  CHECK(rel_l2_error(klein_gordon_apply(*K, u), f) < 1e-10);
}

TEST_CASE("cosine lapse keeps the spectrum above the lapse-weighted mass gap") {
  GridConfig cfg;
  cfg.nt = 64;
  cfg.nx = 16;
  cfg.T = M_PI;
  cfg.L = 2.0 * M_PI;
  cfg.mass = 1.3;
  cfg.lapse.kind = LapseProfile::Kind::Cosine;
  cfg.lapse.params = {1.0, 0.2};
  auto K = assemble_K(build_grid(cfg));
  double amin = 0.8;
  CHECK(K->eigenvalues()[0] >= cfg.mass * cfg.mass * amin * amin - 1e-10);
  CHECK(K->orthonormality_defect() < 1e-10);
  CHECK(K->reconstruction_defect() < 1e-9);
  // mode analysis/synthesis round trip
  std::mt19937_64 rng(5);
  GridFunction f = random_configuration(K->grid(), rng);
  GridFunction back = K->from_modes(K->to_modes(f));
  CHECK(rel_l2_error(back, f) < 1e-12);
}

TEST_CASE("temporally unresolved grids are rejected at kernel construction") {
  GridConfig cfg;  // dt = dx with 16 spatial points: omega_max * dt just above pi
  cfg.nt = 16;
  cfg.nx = 16;
  cfg.T = 2.0 * M_PI;
  cfg.L = 2.0 * M_PI;
  cfg.mass = 1.0;
  auto K = assemble_K(build_grid(cfg));
  CHECK(K->omega_max() * K->grid().dt() >= M_PI);
  CHECK_THROWS_WITH(make_kernel(K, KernelKind::PauliJordan),
                    Catch::Matchers::ContainsSubstring("resolve"));
}
