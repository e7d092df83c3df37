#include <catch2/catch_amalgamated.hpp>

#include "paqft/propagators.hpp"
#include "paqft/quantization.hpp"
#include "paqft/random.hpp"

using namespace paqft;

namespace {
SpectralPtr op_default() {
  GridConfig cfg;  // 32 x 32, dt = dx/2
  return assemble_K(build_grid(cfg));
}
SpectralPtr op_cosine() {
  GridConfig cfg;
  cfg.lapse.kind = LapseProfile::Kind::Cosine;
  cfg.lapse.params = {1.0, 0.15};
  return assemble_K(build_grid(cfg));
}
}  // namespace

TEST_CASE("green operators invert the discrete wave operator, any lapse") {
  std::mt19937_64 rng(11);
  for (auto K : {op_default(), op_cosine()}) {
    auto ret = make_kernel(K, KernelKind::Retarded);
    auto adv = make_kernel(K, KernelKind::Advanced);
    for (int t = 0; t < 3; ++t) {
      GridFunction f = random_band_limited(K->grid(), rng);
      CHECK(rel_l2_error(klein_gordon_apply(*K, green_apply(*ret, f)), f) < 1e-6);
      CHECK(rel_l2_error(klein_gordon_apply(*K, green_apply(*adv, f)), f) < 1e-6);
    }
  }
}

TEST_CASE("retarded green operator rejects boundary-touching sources") {
  auto K = op_default();
  auto ret = make_kernel(K, KernelKind::Retarded);
  GridFunction f(K->grid());
  f(1, 0) = 1.0;  // inside the first margin rows
  CHECK_THROWS_AS(green_apply(*ret, f), DomainError);
}

TEST_CASE("vacuum mode coefficient and its continuum limit") {
  auto check_on = [](int nt, double T) {
    GridConfig cfg;
    cfg.nt = nt;
    cfg.T = T;
    auto K = assemble_K(build_grid(cfg));
    auto W = make_kernel(K, KernelKind::Wightman);
    // equal-time coefficient of a mode is 1/(2 omega_bar)
    int k = 3;
    double w = K->omega(k);
    double wbar = std::sin(w * K->grid().dt()) / K->grid().dt();
    CHECK(std::abs(W->mode(k)(5, 5) - 1.0 / (2.0 * wbar)) < 1e-14);
    return std::abs(W->mode(k)(5, 5).real() - 1.0 / (2.0 * w));
  };
  double err1 = check_on(32, M_PI);
  double err2 = check_on(64, M_PI);  // halving dt quarters the defect
  CHECK(err2 < 0.3 * err1);
}

TEST_CASE("hadamard structure of the two-point kernels") {
  auto K = op_default();
  auto pj = make_kernel(K, KernelKind::PauliJordan);
  for (auto& W : {make_kernel(K, KernelKind::Wightman),
                  make_kernel(K, KernelKind::Wightman, {StateKind::Kms, 0.7})}) {
    CHECK(hadamard_defect(*W) < 1e-12);
    CHECK(h_symmetry_defect(*derive_h_kernel(*W)) < 1e-12);
  }
  // antisymmetry of the commutator function
  for (int k = 0; k < pj->n_modes(); k += 7) {
    const auto& m = pj->mode(k);
    CHECK((m + m.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }
  // dirac kernel is the symmetric half-sum and vanishes at coincidence
  auto dir = make_kernel(K, KernelKind::Dirac);
  auto ret = make_kernel(K, KernelKind::Retarded);
  auto adv = make_kernel(K, KernelKind::Advanced);
  for (int k = 0; k < dir->n_modes(); k += 9) {
    Eigen::MatrixXcd want = 0.5 * (ret->mode(k) + adv->mode(k));
    CHECK((dir->mode(k) - want).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(dir->mode(k).diagonal().cwiseAbs().maxCoeff() == 0.0);
  }
  // feynman kernel interleaves the wightman kernel by time order
  auto fey = make_kernel(K, KernelKind::Feynman);
  auto W = make_kernel(K, KernelKind::Wightman);
  int k = 5;
  double dev = 0;
  for (int i = 0; i < K->grid().nt(); ++i)
    for (int j = 0; j < K->grid().nt(); ++j) {
      Complex want = i > j ? W->mode(k)(i, j) : (j > i ? W->mode(k)(j, i) : W->mode(k)(i, i).real());
      dev = std::max(dev, std::abs(fey->mode(k)(i, j) - want));
    }
  CHECK(dev < 1e-13);
}

TEST_CASE("kms kernels: identity, limits, rejections") {
  auto K = op_default();
  CHECK_THROWS_AS(make_kernel(K, KernelKind::Wightman, {StateKind::Kms, 0.0}), DomainError);
  auto Wb = make_kernel(K, KernelKind::Wightman, {StateKind::Kms, 1.0});
  Report r = kms_identity_check(*Wb, {0.3});
  CHECK(r.checks[0].deviation < 1e-12);
  auto vac = make_kernel(K, KernelKind::Wightman);
  CHECK_THROWS_AS(kms_identity_check(*vac), DomainError);
  // beta -> infinity at beta*omega = 40 on the top mode
  auto Wcold = make_kernel(K, KernelKind::Wightman, {StateKind::Kms, 40.0 / K->omega_max()});
  int k = K->n_modes() - 1;
  CHECK((Wcold->mode(k) - vac->mode(k)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sigma bilinear form and cauchy data") {
  auto K = op_cosine();
  auto pj = make_kernel(K, KernelKind::PauliJordan);
  std::mt19937_64 rng(17);
  GridFunction f = random_band_limited(K->grid(), rng);
  GridFunction h = random_band_limited(K->grid(), rng);
  Complex s = sigma_bilinear(*pj, f, h);
  CHECK(std::abs(s + sigma_bilinear(*pj, h, f)) < 1e-12);
  CHECK(std::abs(sigma_bilinear(*pj, klein_gordon_apply(*K, h), f)) < 1e-8);

  GridFunction u = pj->apply(f), v = pj->apply(h);
  auto d1 = cauchy_data(*K, u, 9);
  auto d2 = cauchy_data(*K, v, 9);
  CHECK(std::abs(sigma2(d1, d2) - s) < 1e-8);
  auto d1b = cauchy_data(*K, u, 22);
  auto d2b = cauchy_data(*K, v, 22);
  CHECK(std::abs(sigma2(d1b, d2b) - sigma2(d1, d2)) < 1e-8);

  CHECK_THROWS_AS(cauchy_data(*K, f, 9), DomainError);   // not a solution
  CHECK_THROWS_AS(cauchy_data(*K, u, 0), DomainError);   // boundary slice
}

TEST_CASE("cauchy data of a single-mode solution") {
  auto K = op_default();
  const auto& g = K->grid();
  int kmode = 4, i0 = 8;
  double w = K->omega(kmode);
  GridFunction phi(g);
  for (int i = 0; i < g.nt(); ++i)
    for (int j = 0; j < g.nx(); ++j)
      phi(i, j) = std::sin(w * (g.t(i) - g.t(i0))) * K->mode_vector(kmode, j);
  auto d = cauchy_data(*K, phi, i0);
  double wbar = std::sin(w * g.dt()) / g.dt();
  for (int j = 0; j < g.nx(); ++j) {
    CHECK(std::abs(d.phi[j]) < 1e-12);
    CHECK(std::abs(d.pi[j] - wbar * K->mode_vector(kmode, j) * g.dx()) < 1e-12);
  }
}

TEST_CASE("solution reconstruction from a slab") {
  auto K = op_default();
  const auto& g = K->grid();
  auto pj = make_kernel(K, KernelKind::PauliJordan);
  std::mt19937_64 rng(23);
  GridFunction h = random_band_limited(g, rng);
  GridFunction phi = pj->apply(h);
  GridFunction f = solution_from_slab(*K, phi, 8, 24);
  CHECK(rel_l2_error(pj->apply(f), phi) < 1e-6);
  Region slab(g.nt(), g.nx());
  for (int i = 7; i <= 25; ++i)
    for (int j = 0; j < g.nx(); ++j) slab.insert(i, j);
  CHECK(f.support(g).subset_of(slab));

  GridFunction zero(g);
  CHECK(solution_from_slab(*K, zero, 8, 24).max_abs() == 0.0);
  CHECK_THROWS_AS(solution_from_slab(*K, phi, 8, 10), DomainError);   // too thin
  CHECK_THROWS_AS(solution_from_slab(*K, phi, 0, g.nt() - 1), DomainError);  // degenerate
  CHECK_THROWS_AS(solution_from_slab(*K, h, 8, 24), DomainError);     // not a solution
}

TEST_CASE("kernel export formats") {
  GridConfig cfg;
  cfg.nt = 8;
  cfg.nx = 4;
  cfg.T = M_PI / 8;
  cfg.L = 2 * M_PI;
  auto K = assemble_K(build_grid(cfg));
  auto W = make_kernel(K, KernelKind::Wightman);
  auto j = W->to_json();
  CHECK(j["kind"] == "wightman_vacuum");
  CHECK(j["modes"].size() == 4);
  CHECK(j["modes"][0]["coeffs"].size() == 64);
  CHECK(j["modes"][0].contains("omega"));

  std::string path = "/tmp/paqft_test_kernel.csv";
  W->write_csv_dense(path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  CHECK(line == "ti,xj,si,yj,re,im");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 32 * 32);
}
