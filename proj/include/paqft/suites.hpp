#pragma once

#include <array>
#include <functional>
#include <random>
#include <string>

#include "paqft/interaction.hpp"
#include "paqft/microlocal.hpp"
#include "paqft/quantization.hpp"
#include "paqft/random.hpp"

namespace paqft {

// Optional user-supplied quartic interaction: coupling, kept orders and the
// spacetime box of the switching window.
struct InteractionConfig {
  bool set = false;
  double coupling = 1.0;
  int lambda_orders = 2;
  int t_lo = 0, t_hi = 0, x_lo = 0, x_hi = 0;
};

struct SuiteContext {
  GridPtr grid;
  SpectralPtr K;
  StateKind state = StateKind::Vacuum;
  double beta = 1.0;
  std::uint64_t seed = 12345;
  TruncationOrders orders{3, 4};
  int degree_bound = 6;
  InteractionConfig interaction;

  std::mt19937_64 rng(std::uint64_t salt) const { return std::mt19937_64(seed ^ salt); }
};

inline SuiteContext make_default_context(std::uint64_t seed = 12345) {
  GridConfig cfg;  // 32 x 32, T = pi, L = 2 pi, m = 1: dt = dx/2
  SuiteContext ctx;
  ctx.grid = build_grid(cfg);
  ctx.K = assemble_K(ctx.grid);
  ctx.seed = seed;
  return ctx;
}

namespace suites {

// Auxiliary grids. The spatial operator is spectral, so causal-support
// statements are checked with spectrally resolved bumps; they need a finer
// spatial grid than the 32 x 32 default to leave room for two disjoint
// supports. Wrap-around needs T >= L/2.
inline SuiteContext wide_context(const SuiteContext& ctx) {
  GridConfig cfg;
  cfg.nt = 48;
  cfg.nx = 64;
  cfg.L = 2.0 * M_PI;
  cfg.T = 48 * (2.0 * M_PI / 64) / 2.0;
  cfg.mass = 1.0;
  SuiteContext out = ctx;
  out.grid = build_grid(cfg);
  out.K = assemble_K(out.grid);
  return out;
}

inline SuiteContext long_context(const SuiteContext& ctx) {
  GridConfig cfg;
  cfg.nt = 64;
  cfg.nx = 32;
  cfg.T = 2.0 * M_PI;
  cfg.L = 2.0 * M_PI;
  cfg.mass = 1.0;
  SuiteContext out = ctx;
  out.grid = build_grid(cfg);
  out.K = assemble_K(out.grid);
  return out;
}

// ---------------------------------------------------------------------------
inline Report geometry(const SuiteContext& ctx0) {
  Report rep;
  rep.suite = "geometry";
  SuiteContext ctx = long_context(ctx0);
  const auto& g = *ctx.grid;

  // quadrature weights and total volume on a cosine lapse
  GridConfig ccfg = g.config();
  ccfg.lapse.kind = LapseProfile::Kind::Cosine;
  ccfg.lapse.params = {1.0, 0.1};
  auto gc = build_grid(ccfg);
  double wdev = 0, vol = 0, volref = 0;
  for (int j = 0; j < gc->nx(); ++j) {
    double a = 1.0 + 0.1 * std::cos(2.0 * M_PI * gc->x(j) / gc->L());
    wdev = std::max(wdev, std::abs(gc->weight(j) - a * a * gc->dt() * gc->dx()));
    volref += a * a * gc->dt() * gc->dx();
    vol += gc->weight(j);
  }
  rep.add(make_check("weights", "weight(x) = a(x)^2 dt dx", wdev, 1e-14));
  rep.add(make_check("total_volume", "sum of weights = dt dx sum a^2",
                     std::abs(vol - volref) / volref, 1e-12));

  // rejections
  bool cfl_rejected = false;
  try {
    GridConfig bad = g.config();
    bad.T = 4.0 * bad.L;  // dt = 2 dx at equal point counts
    bad.nt = 32;
    bad.nx = 32;
    build_grid(bad);
  } catch (const ConfigError&) {
    cfl_rejected = true;
  }
  rep.add(make_flag_check("cfl_rejection", "dt > dx is rejected", cfl_rejected));
  bool lapse_rejected = false;
  try {
    GridConfig bad = g.config();
    bad.lapse.kind = LapseProfile::Kind::Cosine;
    bad.lapse.params = {1.0, 2.0};
    build_grid(bad);
  } catch (const ConfigError&) {
    lapse_rejected = true;
  }
  rep.add(make_flag_check("lapse_rejection", "non-positive lapse is rejected", lapse_rejected));

  // unit light speed: J+ of a point at time index t covers |x| <= t
  Region p0 = Region::point(g.nt(), g.nx(), 0, 0);
  Region fut = causal_future(g, p0);
  bool speed_ok = true;
  for (int i = 0; i < g.nt(); ++i)
    for (int j = 0; j < g.nx(); ++j) {
      bool want = g.circ_dist(0, j) <= g.t(i) + 1e-9 * g.dx();
      if (fut.contains(i, j) != want) speed_ok = false;
    }
  rep.add(make_flag_check("unit_speed", "J+ of a point is the |x| <= t interval", speed_ok));

  // wrap-around: cone closes at t >= L/2
  int iwrap = static_cast<int>(std::ceil(0.5 * g.L() / g.dt()));
  bool wrap_ok = iwrap < g.nt();
  for (int j = 0; j < g.nx() && wrap_ok; ++j) wrap_ok = fut.contains(iwrap, j);
  rep.add(make_flag_check("wraparound", "J+ covers the slice for t >= L/2", wrap_ok));

  // brute-force closure oracle: one-step relation, transitive closure
  auto rng = ctx.rng(0x9e01);
  std::uniform_int_distribution<int> it(0, g.nt() / 2), ix(0, g.nx() - 1);
  Region r(g.nt(), g.nx());
  for (int k = 0; k < 4; ++k) r.insert(it(rng), ix(rng));
  Region jr = causal_future(g, r);
  Region bfs(g.nt(), g.nx());
  {
    std::vector<std::pair<int, int>> frontier;
    r.for_each([&](int i, int j) { frontier.push_back({i, j}); });
    for (auto& q : frontier) bfs.insert(q.first, q.second);
    while (!frontier.empty()) {
      auto [i, j] = frontier.back();
      frontier.pop_back();
      for (int jj = 0; jj < g.nx(); ++jj) {
        if (i + 1 < g.nt() && g.causally_after(i, j, i + 1, jj) && !bfs.contains(i + 1, jj)) {
          bfs.insert(i + 1, jj);
          frontier.push_back({i + 1, jj});
        }
      }
    }
    // one-step BFS under-fills when dt < dx; complete with the direct relation
    r.for_each([&](int i, int j) {
      for (int ii = i; ii < g.nt(); ++ii)
        for (int jj = 0; jj < g.nx(); ++jj)
          if (g.causally_after(i, j, ii, jj)) bfs.insert(ii, jj);
    });
  }
  rep.add(make_flag_check("bfs_oracle", "J+ equals brute-force closure of the lattice relation",
                          jr == bfs));
  rep.add(make_flag_check("idempotent", "J+(J+(R)) = J+(R)", causal_future(g, jr) == jr));
  Region rbig = jr;
  rep.add(make_flag_check("monotone", "R in R' implies J+(R) in J+(R')",
                          causal_future(g, r).subset_of(causal_future(g, rbig))));

  // spacelike separation
  Region a = Region::point(g.nt(), g.nx(), 0, 0);
  Region b = Region::point(g.nt(), g.nx(), 0, g.nx() / 2);
  rep.add(make_flag_check("spacelike_equal_time", "equal-time distinct points are spacelike",
                          spacelike_separated(g, a, b)));
  Region c = Region::point(g.nt(), g.nx(), 4, 1);  // inside the cone of (0,0)
  rep.add(make_flag_check("timelike_pair", "points inside the cone are not spacelike",
                          !spacelike_separated(g, a, c)));
  rep.add(make_flag_check("spacelike_symmetric", "spacelike(R1,R2) = spacelike(R2,R1)",
                          spacelike_separated(g, a, b) == spacelike_separated(g, b, a)));
  rep.add(make_flag_check("overlap_not_spacelike", "intersecting regions are not spacelike",
                          !spacelike_separated(g, jr, r)));
  return rep;
}

// ---------------------------------------------------------------------------
inline Report green(const SuiteContext& ctx) {
  Report rep;
  rep.suite = "green";
  const auto& g = *ctx.grid;
  auto ret = make_kernel(ctx.K, KernelKind::Retarded);
  auto adv = make_kernel(ctx.K, KernelKind::Advanced);
  auto pj = make_kernel(ctx.K, KernelKind::PauliJordan);
  auto rng = ctx.rng(0x11a);

  double devR = 0, devA = 0;
  for (int t = 0; t < 20; ++t) {
    GridFunction f = random_band_limited(g, rng);
    devR = std::max(devR, rel_l2_error(klein_gordon_apply(*ctx.K, ret->apply(f)), f));
    devA = std::max(devA, rel_l2_error(klein_gordon_apply(*ctx.K, adv->apply(f)), f));
  }
  rep.add(make_check("pdr_id", "P(Delta^R f) = f", devR, 1e-6));
  rep.add(make_check("pda_id", "P(Delta^A f) = f", devA, 1e-6));

  // single-mode closed form against an independent recurrence march
  {
    int kmode = ctx.K->n_modes() / 2;
    double w = ctx.K->omega(kmode);
    int s0 = g.nt() / 3;
    GridFunction f(g);  // delta in time, one spatial mode, unit time density
    for (int j = 0; j < g.nx(); ++j)
      f(s0, j) = ctx.K->mode_vector(kmode, j) / (g.dt() * g.lapse(j) * g.lapse(j));
    GridFunction u = ret->apply(f);
    // oracle: march u'' + omega_tilde^2 u = delta directly
    double wt2 = omega_tilde2(w, g.dt());
    std::vector<double> uo(g.nt(), 0.0);
    uo[s0 + 1] = g.dt();
    for (int i = s0 + 1; i + 1 < g.nt(); ++i)
      uo[i + 1] = (2.0 - g.dt() * g.dt() * wt2) * uo[i] - uo[i - 1];
    double dev = 0;
    for (int i = 0; i < g.nt(); ++i)
      for (int j = 0; j < g.nx(); ++j)
        dev = std::max(dev,
                       std::abs(u(i, j) - uo[i] * ctx.K->mode_vector(kmode, j)));
    rep.add(make_check("mode_kernel", "Delta^R delta-mode = theta sin(w(t-t0))/w_bar", dev,
                       1e-12));
    // closed-form normalization matches sin(w tau)/w_bar
    double dev2 = 0;
    for (int i = s0 + 1; i < g.nt(); ++i) {
      double want = std::sin(w * (g.t(i) - g.t(s0))) * g.dt() / std::sin(w * g.dt());
      dev2 = std::max(dev2, std::abs(uo[i] - want));
    }
    rep.add(make_check("mode_closed_form", "recurrence solution = sin(w tau) dt/sin(w dt)",
                       dev2, 1e-10));
  }

  // advanced is the time reflection of retarded
  {
    GridFunction f = random_band_limited(g, rng);
    GridFunction fr(g);
    for (int i = 0; i < g.nt(); ++i)
      for (int j = 0; j < g.nx(); ++j) fr(i, j) = f(g.nt() - 1 - i, j);
    GridFunction lhs = adv->apply(f);
    GridFunction rr = ret->apply(fr);
    double dev = 0;
    for (int i = 0; i < g.nt(); ++i)
      for (int j = 0; j < g.nx(); ++j)
        dev = std::max(dev, std::abs(lhs(i, j) - rr(g.nt() - 1 - i, j)));
    rep.add(make_check("advanced_reflection", "Delta^A = T Delta^R T", dev, 1e-12));
  }

  // margin preconditions
  {
    bool rejected = false;
    GridFunction f(g);
    f(0, 0) = 1.0;
    try {
      green_apply(*ret, f);
    } catch (const DomainError&) {
      rejected = true;
    }
    rep.add(make_flag_check("margin_error", "support touching the window boundary is rejected",
                            rejected));
  }

  // Pauli-Jordan antisymmetry (mode-wise)
  {
    double dev = 0;
    for (int k = 0; k < pj->n_modes(); ++k) {
      const auto& m = pj->mode(k);
      dev = std::max(dev, (m + m.transpose()).cwiseAbs().maxCoeff() /
                              std::max(1.0, m.cwiseAbs().maxCoeff()));
    }
    rep.add(make_check("delta_antisymmetric", "Delta(x,y) = -Delta(y,x)", dev, 1e-12));
  }

  // sigma degeneracy and slab round trip
  {
    auto rng2 = ctx.rng(0x11b);
    double dev = 0;
    for (int t = 0; t < 5; ++t) {
      GridFunction h = random_band_limited(g, rng2);
      GridFunction f2 = random_band_limited(g, rng2);
      GridFunction Ph = klein_gordon_apply(*ctx.K, h);
      Complex s = sigma_bilinear(*pj, Ph, f2);
      dev = std::max(dev, std::abs(s));
    }
    rep.add(make_check("sigma_degeneracy", "sigma(P h, g) = 0", dev, 1e-8));

    GridFunction h = random_band_limited(g, rng2);
    GridFunction phi = pj->apply(h);
    int i1 = g.nt() / 4, i2 = 3 * g.nt() / 4;
    GridFunction f2 = solution_from_slab(*ctx.K, phi, i1, i2);
    rep.add(make_check("slab_roundtrip", "Delta(P(chi phi)) = phi",
                       rel_l2_error(pj->apply(f2), phi), 1e-6));
    Region slab(g.nt(), g.nx());
    for (int i = i1 - 1; i <= i2 + 1; ++i)
      for (int j = 0; j < g.nx(); ++j) slab.insert(i, j);
    rep.add(make_flag_check("slab_support", "supp P(chi phi) inside the slab",
                            f2.support(g).subset_of(slab)));
    bool thin_rejected = false;
    try {
      solution_from_slab(*ctx.K, phi, i1, i1 + 2);
    } catch (const DomainError&) {
      thin_rejected = true;
    }
    rep.add(make_flag_check("thin_slab_error", "slab thinner than 4 steps is rejected",
                            thin_rejected));
  }

  // causal support with a spectrally resolved slice source (finer grid)
  {
    SuiteContext wide = wide_context(ctx);
    const auto& gw = *wide.grid;
    auto retw = make_kernel(wide.K, KernelKind::Retarded);
    auto advw = make_kernel(wide.K, KernelKind::Advanced);
    const double thr = 1e-10;
    GridFunction src = slice_bump(gw, gw.nt() / 4, M_PI, 2.2);
    Region sf = src.support(thr);
    GridFunction u = retw->apply(src);
    Region cone = causal_future(gw, sf).dilated();
    rep.add(make_flag_check("ret_support", "supp Delta^R f in J+(supp f) + one cell",
                            u.support(thr).subset_of(cone)));
    GridFunction srca = slice_bump(gw, 3 * gw.nt() / 4, M_PI, 2.2);
    Region sfa = srca.support(thr);
    GridFunction ua = advw->apply(srca);
    Region conea = causal_past(gw, sfa).dilated();
    rep.add(make_flag_check("adv_support", "supp Delta^A f in J-(supp f) + one cell",
                            ua.support(thr).subset_of(conea)));
  }
  return rep;
}

// ---------------------------------------------------------------------------
inline Report hadamard(const SuiteContext& ctx) {
  Report rep;
  rep.suite = "hadamard";
  const auto& g = *ctx.grid;
  auto rng = ctx.rng(0x3aa);
  auto pj = make_kernel(ctx.K, KernelKind::PauliJordan);

  std::vector<std::pair<std::string, KernelPtr>> states;
  states.push_back({"vacuum", make_kernel(ctx.K, KernelKind::Wightman)});
  for (double beta : {0.5, 1.0, 2.0})
    states.push_back({"kms_b" + std::to_string(beta).substr(0, 3),
                      make_kernel(ctx.K, KernelKind::Wightman, {StateKind::Kms, beta})});

  for (auto& [name, W] : states) {
    rep.add(make_check("two_im_w_" + name, "2 Im W = Delta mode-wise", hadamard_defect(*W),
                       1e-12));
    // positive type: Gram matrix on random test functions
    const int nfam = 6;
    std::vector<GridFunction> fam;
    for (int c = 0; c < nfam; ++c) fam.push_back(random_band_limited(g, rng));
    Eigen::MatrixXcd gram(nfam, nfam);
    for (int a = 0; a < nfam; ++a)
      for (int b = 0; b < nfam; ++b) {
        GridFunction wb = W->apply(fam[b]);
        Complex s = 0;
        for (int i = 0; i < g.nt(); ++i)
          for (int j = 0; j < g.nx(); ++j)
            s += std::conj(fam[a](i, j)) * wb(i, j) * g.weight(j);
        gram(a, b) = s;
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
    double neg = std::max(0.0, -es.eigenvalues().minCoeff());
    rep.add(make_check("positivity_" + name, "W is of positive type", neg, 1e-10));
    // bisolution in both arguments
    GridFunction f = random_band_limited(g, rng);
    double r1 = solution_residual(*ctx.K, W->apply(f));
    GridFunction ft = W->apply(f.conjugated()).conjugated();  // transpose application
    double r2 = solution_residual(*ctx.K, ft);
    rep.add(make_check("bisolution_" + name, "P W = 0 in both arguments", std::max(r1, r2),
                       1e-6));
    rep.add(make_check("h_real_symmetric_" + name, "H = W - (i/2)Delta real symmetric",
                       h_symmetry_defect(*derive_h_kernel(*W)), 1e-12));
  }

  // state positivity probe: omega_{H,phi}(conj(F) * F) >= 0 at hbar = 1
  {
    auto W = states[0].second;
    KernelPtr H = derive_h_kernel(*W);
    GridFunction phi = pj->apply(random_band_limited(g, rng));
    double worst = 0;
    TruncationOrders ord{0, 4};
    for (int t = 0; t < 4; ++t) {
      RegularFunctional F = random_functional(ctx.grid, rng, 2, ctx.degree_bound);
      FormalSeries sq = star(FormalSeries::lift(F.conjugated(), ord),
                             FormalSeries::lift(F, ord), pj);
      Complex v = state_eval(sq, H, phi);
      double scale = std::max(1.0, std::abs(v));
      worst = std::max(worst, std::max(0.0, -v.real()) / scale);
      worst = std::max(worst, std::abs(v.imag()) / scale);
    }
    rep.add(make_check("state_positivity", "omega_{H,phi}(F* . F) real and >= 0", worst, 1e-8));
  }
  return rep;
}

// ---------------------------------------------------------------------------
inline Report kms(const SuiteContext& ctx) {
  Report rep;
  rep.suite = "kms";
  auto vac = make_kernel(ctx.K, KernelKind::Wightman);

  for (double beta : {0.5, 1.0, 2.0}) {
    auto Wb = make_kernel(ctx.K, KernelKind::Wightman, {StateKind::Kms, beta});
    Report r = kms_identity_check(*Wb, {0.1, 0.3, 0.7});
    rep.add(make_check("kms_identity_b" + std::to_string(beta).substr(0, 3),
                       "w(tau + i beta) = w(-tau)", r.checks[0].deviation, 1e-12));
  }

  // beta w = 40 on the top mode: thermal coefficients converge to vacuum
  {
    double beta = 40.0 / ctx.K->omega_max();
    auto Wb = make_kernel(ctx.K, KernelKind::Wightman, {StateKind::Kms, beta});
    int k = ctx.K->n_modes() - 1;
    double dev = (Wb->mode(k) - vac->mode(k)).cwiseAbs().maxCoeff();
    rep.add(make_check("kms_vacuum_limit", "KMS -> vacuum as beta w -> infinity", dev, 1e-12));
  }

  bool rejected = false;
  try {
    kms_identity_check(*vac);
  } catch (const DomainError&) {
    rejected = true;
  }
  rep.add(make_flag_check("non_kms_rejected", "vacuum kernel is not a KMS kernel", rejected));
  bool beta_rejected = false;
  try {
    make_kernel(ctx.K, KernelKind::Wightman, {StateKind::Kms, -1.0});
  } catch (const DomainError&) {
    beta_rejected = true;
  }
  rep.add(make_flag_check("beta_rejected", "beta <= 0 is rejected", beta_rejected));
  return rep;
}

// ---------------------------------------------------------------------------
inline Report weyl(const SuiteContext& ctx) {
  Report rep;
  rep.suite = "weyl";
  const auto& g = *ctx.grid;
  auto rng = ctx.rng(0x5e1);
  auto pj = make_kernel(ctx.K, KernelKind::PauliJordan);

  GridFunction f = random_band_limited(g, rng);
  GridFunction h = random_band_limited(g, rng);
  WeylElement wf = paqft::weyl(f), wh = paqft::weyl(h);
  WeylElement prod = weyl_star(wf, wh, pj);

  // independent sigma: Cauchy-data symplectic form of the generated solutions
  Complex s_direct = sigma_bilinear(*pj, f, h);
  Complex s_indep =
      sigma2(cauchy_data(*ctx.K, pj->apply(f), g.nt() / 2),
             cauchy_data(*ctx.K, pj->apply(h), g.nt() / 2));
  rep.add(make_check("ccr_phase", "W(f) W(h) phase = e^{-i hbar sigma(f,h)/2}",
                     std::abs(prod.sigma_accum - s_indep), 1e-12));
  rep.add(make_check(
      "ccr_weyl_relation", "W(f) star W(h) = e^{-i hbar sigma/2} W(f+h)",
      std::abs(prod.phase(1.0) - std::exp(Complex(0, -0.5) * s_direct)), 1e-12));

  // W(f) star W(-f) = 1
  {
    GridFunction mf = f;
    mf *= Complex(-1.0);
    WeylElement unit = weyl_star(wf, paqft::weyl(mf), pj);
    double dev = std::abs(unit.phase(1.0) - 1.0) + unit.f.max_abs();
    rep.add(make_check("weyl_inverse", "W(f) star W(-f) = 1", dev, 1e-12));
  }

  // associativity cocycle
  {
    GridFunction k3 = random_band_limited(g, rng);
    WeylElement l = weyl_star(weyl_star(wf, wh, pj), paqft::weyl(k3), pj);
    WeylElement r = weyl_star(wf, weyl_star(wh, paqft::weyl(k3), pj), pj);
    double dev = std::abs(l.phase(1.0) - r.phase(1.0)) + (l.f - r.f).max_abs();
    rep.add(make_check("cocycle", "(W(f) W(g)) W(h) = W(f) (W(g) W(h))", dev, 1e-12));
  }

  // the field-equation ideal is central: sigma(P h, g) = 0
  {
    GridFunction ph = klein_gordon_apply(*ctx.K, h);
    WeylElement wp = paqft::weyl(ph);
    WeylElement ab = weyl_star(wp, wf, pj);
    WeylElement ba = weyl_star(wf, wp, pj);
    double dev = std::abs(ab.phase(1.0) - ba.phase(1.0));
    rep.add(make_check("ideal_central", "sigma(P h, .) = 0 makes W(P h) central", dev, 1e-8));
  }
  return rep;
}

// ---------------------------------------------------------------------------
inline Report star_assoc(const SuiteContext& ctx) {
  Report rep;
  rep.suite = "star-assoc";
  auto rng = ctx.rng(0x57a);
  auto pj = make_kernel(ctx.K, KernelKind::PauliJordan);
  TruncationOrders ord{0, 4};
  auto probes = random_probes(*ctx.grid, rng, 2);

  double assoc = 0, invol = 0, unit_dev = 0, h0 = 0;
  FormalSeries one = FormalSeries::unit(ctx.grid, ord, ctx.degree_bound);
  for (int t = 0; t < 50; ++t) {
    RegularFunctional A = random_functional(ctx.grid, rng, 3, ctx.degree_bound);
    RegularFunctional B = random_functional(ctx.grid, rng, 3, ctx.degree_bound);
    RegularFunctional C = random_functional(ctx.grid, rng, 3, ctx.degree_bound);
    FormalSeries AS = FormalSeries::lift(A, ord), BS = FormalSeries::lift(B, ord),
                 CS = FormalSeries::lift(C, ord);
    assoc = std::max(assoc, series_distance(star(star(AS, BS, pj), CS, pj),
                                            star(AS, star(BS, CS, pj), pj), probes));
    invol = std::max(invol, series_distance(star(AS, BS, pj).conjugated(),
                                            star(BS.conjugated(), AS.conjugated(), pj), probes));
    if (t < 5) {
      unit_dev = std::max(unit_dev, series_distance(star(one, AS, pj), AS, probes));
      // hbar^0 part equals the pointwise product
      FormalSeries sp = star(AS, BS, pj);
      FormalSeries pw = series_pointwise(AS, BS);
      double d = 0;
      for (const auto& phi : probes) {
        Complex l = 0, r = 0;
        if (auto* c = sp.get(0, 0)) l = c->evaluate(phi);
        if (auto* c = pw.get(0, 0)) r = c->evaluate(phi);
        d = std::max(d, std::abs(l - r) / std::max(1.0, std::abs(r)));
      }
      h0 = std::max(h0, d);
    }
  }
  rep.add(make_check("associativity", "(F*G)*K = F*(G*K)", assoc, 1e-10));
  rep.add(make_check("involution", "conj(F*G) = conj(G)*conj(F)", invol, 1e-10));
  rep.add(make_check("unit", "1 * G = G", unit_dev, 1e-14));
  rep.add(make_check("hbar0_pointwise", "hbar^0 part of F*G is F.G", h0, 1e-12));
  return rep;
}

// ---------------------------------------------------------------------------
inline Report wick(const SuiteContext& ctx) {
  Report rep;
  rep.suite = "wick";
  const auto& g = *ctx.grid;
  auto rng = ctx.rng(0x31c);
  auto pj = make_kernel(ctx.K, KernelKind::PauliJordan);
  auto probes = random_probes(g, rng, 2);
  TruncationOrders ord{0, 4};

  std::vector<std::pair<std::string, KernelPtr>> states;
  states.push_back({"vacuum", make_kernel(ctx.K, KernelKind::Wightman)});
  for (double beta : {0.5, 1.0, 2.0})
    states.push_back({"kms_b" + std::to_string(beta).substr(0, 3),
                      make_kernel(ctx.K, KernelKind::Wightman, {StateKind::Kms, beta})});

  for (auto& [name, W] : states) {
    RegularFunctional A = random_functional(ctx.grid, rng, 3, ctx.degree_bound);
    RegularFunctional B = random_functional(ctx.grid, rng, 3, ctx.degree_bound);
    Report r = star_equivalence_check(FormalSeries::lift(A, ord), FormalSeries::lift(B, ord),
                                      pj, W, probes);
    double dev = 0;
    for (auto& c : r.checks) dev = std::max(dev, c.pass ? c.deviation : 1.0);
    rep.add(make_check("hprod_" + name, "F *_H G = a_H((a_H^-1 F)*(a_H^-1 G))", dev, 1e-10));
  }

  // negative control: non-symmetric noise breaks the Hadamard compatibility
  {
    auto W = states[0].second;
    std::vector<Eigen::MatrixXcd> modes;
    for (int k = 0; k < W->n_modes(); ++k) modes.push_back(W->mode(k));
    modes[0](0, 1) += Complex(0, 3e-3);  // asymmetric imaginary bump
    auto Wbad = std::make_shared<const PropagatorKernel>(ctx.K, KernelKind::Wightman,
                                                         TwoPointParams{}, std::move(modes));
    bool caught = hadamard_defect(*Wbad) > 1e-8;
    rep.add(make_flag_check("hprod_negative_control",
                            "perturbed W fails the 2 Im W = Delta precondition", caught));
  }

  KernelPtr W = states[0].second;
  KernelPtr H = derive_h_kernel(*W);

  // alpha_H inverse pair on degree-4 functionals
  {
    double dev = 0;
    for (int t = 0; t < 3; ++t) {
      RegularFunctional F = random_functional(ctx.grid, rng, 4, ctx.degree_bound);
      FormalSeries FS = FormalSeries::lift(F, ord);
      dev = std::max(dev, series_distance(alpha_h(alpha_h(FS, H, true), H, false), FS, probes));
    }
    rep.add(make_check("alpha_inverse_pair", "a_H o a_H^-1 = id", dev, 1e-12));
  }

  // grid Wick square: a_H^-1(int f phi^2) = int f phi^2 - hbar sum H(x,x) f w
  GridFunction fw = gaussian_bump(g, g.t(g.nt() / 2), 2.0, 2.0, 2.0);
  {
    RegularFunctional F2 = make_monomial(ctx.grid, 2, fw, ctx.degree_bound);
    FormalSeries lhs = alpha_h(F2, H, ord, /*inverse=*/true);
    Complex trace = 0;
    for (int i = 0; i < g.nt(); ++i)
      for (int j = 0; j < g.nx(); ++j)
        if (std::abs(fw(i, j)) > g.support_threshold())
          trace += H->entry(i, j, i, j) * fw(i, j) * g.weight(j);
    FormalSeries rhs = FormalSeries::lift(F2, ord);
    FormalSeries corr(ctx.grid, ord, ctx.degree_bound);
    corr.set(0, 1, RegularFunctional::constant(ctx.grid, -trace, ctx.degree_bound));
    rhs += corr;
    rep.add(make_check("wick_square", "a_H^-1(int f phi^2) = int f phi^2 - hbar int H(x,x) f",
                       series_distance(lhs, rhs, probes), 1e-12));
  }

  // Wick theorem for two local squares, expanded by hand
  {
    GridFunction f1 = gaussian_bump(g, g.t(g.nt() / 2 - 4), 1.5, 1.2, 1.2);
    GridFunction f2 = gaussian_bump(g, g.t(g.nt() / 2 + 4), 4.5, 1.2, 1.2);
    // keep the windows small
    for (int i = 0; i < g.nt(); ++i)
      for (int j = 0; j < g.nx(); ++j) {
        if (std::abs(f1(i, j)) < 0.1) f1(i, j) = 0;
        if (std::abs(f2(i, j)) < 0.1) f2(i, j) = 0;
      }
    RegularFunctional F1 = make_monomial(ctx.grid, 2, f1, ctx.degree_bound);
    RegularFunctional F2 = make_monomial(ctx.grid, 2, f2, ctx.degree_bound);
    FormalSeries lhs = star_h(FormalSeries::lift(F1, ord), FormalSeries::lift(F2, ord), W);

    FormalSeries rhs = FormalSeries::lift(pointwise_product(F1, F2), ord);
    RegularFunctional cross(ctx.grid, ctx.degree_bound);  // 4 int phi W phi f1 f2
    Complex w2int = 0;                                    // int W^2 f1 f2
    for (int i1 = 0; i1 < g.nt(); ++i1)
      for (int j1 = 0; j1 < g.nx(); ++j1) {
        if (std::abs(f1(i1, j1)) <= g.support_threshold()) continue;
        for (int i2 = 0; i2 < g.nt(); ++i2)
          for (int j2 = 0; j2 < g.nx(); ++j2) {
            if (std::abs(f2(i2, j2)) <= g.support_threshold()) continue;
            Complex wv = W->entry(i1, j1, i2, j2);
            KernelTerm t;
            t.c = 4.0 * f1(i1, j1) * f2(i2, j2) * wv;
            t.f = {Factor::point(i1, j1), Factor::point(i2, j2)};
            cross.add_term(std::move(t));
            w2int += wv * wv * f1(i1, j1) * f2(i2, j2) * g.weight(j1) * g.weight(j2);
          }
      }
    cross.merge_terms();
    FormalSeries c1(ctx.grid, ord, ctx.degree_bound);
    c1.set(0, 1, cross);
    FormalSeries c2(ctx.grid, ord, ctx.degree_bound);
    c2.set(0, 2, RegularFunctional::constant(ctx.grid, 2.0 * w2int, ctx.degree_bound));
    rhs += c1;
    rhs += c2;
    rep.add(make_check("wick_expansion",
                       "int f1 phi^2 *_H int f2 phi^2 = F1F2 + 4 hbar int phi W phi"
                       " + 2 hbar^2 int W^2",
                       series_distance(lhs, rhs, probes), 1e-10,
                       "degree-0 coefficient pinned to 2 (hbar W)^2; of the two displayed"
                       " normalizations the oracle confirms the one with the explicit"
                       " combinatorial prefactor 2, not the -hbar^2 int W^2 form"));
    // commutator of *_H agrees with the *-commutator for linear functionals
    GridFunction lf = random_band_limited(g, rng), lh = random_band_limited(g, rng);
    FormalSeries Lf = FormalSeries::lift(make_linear(ctx.grid, lf), ord);
    FormalSeries Lh = FormalSeries::lift(make_linear(ctx.grid, lh), ord);
    FormalSeries commH = star_h(Lf, Lh, W) - star_h(Lh, Lf, W);
    FormalSeries commS = star(Lf, Lh, pj) - star(Lh, Lf, pj);
    rep.add(make_check("commutator_match", "[F,G]_{*_H} = [F,G]_* for linear F,G",
                       series_distance(commH, commS, probes), 1e-12));
  }
  return rep;
}

// ---------------------------------------------------------------------------
inline Report peierls(const SuiteContext& ctx) {
  Report rep;
  rep.suite = "peierls";
  const auto& g = *ctx.grid;
  auto rng = ctx.rng(0x9e2);
  auto pj = make_kernel(ctx.K, KernelKind::PauliJordan);
  auto probes = random_probes(g, rng, 5);

  GridFunction f = random_band_limited(g, rng), h = random_band_limited(g, rng);
  RegularFunctional Ff = make_linear(ctx.grid, f), Fh = make_linear(ctx.grid, h);
  Complex s = sigma_bilinear(*pj, f, h);
  double dev = 0, anti = 0;
  for (const auto& phi : probes) {
    Complex b = paqft::peierls(Ff, Fh, pj, phi);
    dev = std::max(dev, std::abs(b - s) / std::max(1.0, std::abs(s)));
    anti = std::max(anti, std::abs(b + paqft::peierls(Fh, Ff, pj, phi)));
  }
  rep.add(make_check("linear_bracket", "{F_f, F_h} = sigma(f,h), phi-independent", dev, 1e-12));
  rep.add(make_check("antisymmetry", "{F,G} = -{G,F}", anti, 1e-12));
  {
    RegularFunctional one = RegularFunctional::constant(ctx.grid, 1.0);
    double d = std::abs(paqft::peierls(Ff, one, pj, probes[0]));
    rep.add(make_check("unit_bracket", "{F, 1} = 0", d, 1e-14));
  }
  {
    double worst = 0;
    for (int t = 0; t < 3; ++t) {
      RegularFunctional A = random_functional(ctx.grid, rng, 3, ctx.degree_bound);
      RegularFunctional B = random_functional(ctx.grid, rng, 3, ctx.degree_bound);
      Report r = classical_limit_check(A, B, pj, probes);
      worst = std::max(worst, r.checks[0].deviation);
    }
    rep.add(make_check("classical_limit", "[F,G]_*/(i hbar) -> {F,G}_S at hbar^0", worst,
                       1e-12));
    RegularFunctional A = random_functional(ctx.grid, rng, 3, ctx.degree_bound);
    Report r = classical_limit_check(A, A, pj, probes);
    rep.add(make_check("self_bracket", "{F,F} = 0", r.checks[0].deviation, 1e-12));
  }

  // interacting linearized propagator (canonical vs covariant bracket data)
  {
    GridConfig cfg;
    cfg.nt = 32;
    cfg.nx = 16;
    cfg.T = M_PI;
    cfg.L = 2.0 * M_PI;
    cfg.mass = 1.0;
    auto gl = build_grid(cfg);
    auto Kl = assemble_K(gl);
    LagrangianSpec spec;
    spec.kind = LagrangianSpec::Kind::Phi4;
    spec.coupling = 0.4;
    spec.window = GridFunction(*gl);
    for (int i = 0; i < gl->nt(); ++i)
      for (int j = 0; j < gl->nx(); ++j) spec.window(i, j) = 1.0;
    GridFunction bg = random_configuration(*gl, rng);
    LinearizedPropagator lp(Kl, spec, bg);
    const int nx = gl->nx();
    Eigen::MatrixXcd D = lp.causal();
    double v0 = 0, d1 = 0;
    for (int s2 = 3; s2 + 3 < gl->nt(); s2 += 5)
      for (int y = 0; y < nx; ++y)
        for (int x = 0; x < nx; ++x) {
          v0 = std::max(v0, std::abs(D(s2 * nx + x, s2 * nx + y)));
          Complex der = (D((s2 + 1) * nx + x, s2 * nx + y) -
                         D((s2 - 1) * nx + x, s2 * nx + y)) /
                        (2.0 * gl->dt()) * gl->dx();
          d1 = std::max(d1, std::abs(der - (x == y ? 1.0 : 0.0)));
        }
    rep.add(make_check("lp_equal_time_value", "Delta_S(phi)(t,x;t,y) = 0", v0, 1e-6));
    rep.add(make_check("lp_equal_time_derivative", "d_t Delta_S(phi) at t=s is the unit"
                       " density", d1, 1e-6));
    rep.add(make_check("lp_bisolution", "Delta_S(phi) solves the linearized equation",
                       lp.bisolution_residual(), 1e-6));
    rep.add(make_check("lp_antisymmetric", "Delta_S(phi) antisymmetric",
                       (D + D.transpose()).cwiseAbs().maxCoeff() /
                           std::max(1.0, D.cwiseAbs().maxCoeff()),
                       1e-10));
    // column support: the spectral slice operator couples all points, so a
    // point column leaks algebraically small tails outside the cone; the
    // energy fraction outside J+ (one-cell dilated) stays small
    {
      int sc = gl->nt() / 3, yc = gl->nx() / 2;
      Region cone = causal_future(
          *gl, Region::point(gl->nt(), gl->nx(), sc, yc)).dilated();
      double inside = 0, outside = 0;
      for (int i = 0; i < gl->nt(); ++i)
        for (int x = 0; x < nx; ++x) {
          double a = std::norm(lp.retarded_entry(i, x, sc, yc));
          (cone.contains(i, x) ? inside : outside) += a;
        }
      rep.add(make_check("lp_column_support",
                         "retarded column energy outside J+ of its source cell",
                         outside / std::max(inside, 1e-30), 5e-3,
                         "point sources excite every spatial mode; the spectral slice"
                         " operator then leaks O(1e-2) amplitude tails at the cone"));
    }
    LagrangianSpec free = spec;
    free.coupling = 0.0;
    LinearizedPropagator lp0(Kl, free, bg);
    auto pjl = make_kernel(Kl, KernelKind::PauliJordan);
    Eigen::MatrixXcd D0 = lp0.causal();
    double mx = 0;
    for (int i = 0; i < gl->nt(); ++i)
      for (int x = 0; x < nx; ++x)
        for (int j2 = 0; j2 < gl->nt(); ++j2)
          for (int y = 0; y < nx; ++y)
            mx = std::max(mx, std::abs(D0(i * nx + x, j2 * nx + y) - pjl->entry(i, x, j2, y)));
    rep.add(make_check("lp_free_reduction", "lambda = 0 linearized kernel equals free Delta",
                       mx, 1e-8));
    // Euler-Lagrange consistency and finite-difference oracle
    GridFunction u = pjl->apply(random_band_limited(*gl, rng));
    rep.add(make_check("el_free_solution", "S'(Delta h) = 0 for the free action",
                       euler_lagrange(*Kl, free, u).norm_l2() / u.norm_l2(), 1e-6));
    {
      // window identically 1 on a neighbourhood of the test direction's
      // support, with a smooth falloff only near the time boundary; the
      // commutator terms of the windowed quadratic form then vanish rows-wise
      LagrangianSpec win = spec;
      win.window = GridFunction(*gl);
      int ramp = 4;
      for (int i = 0; i < gl->nt(); ++i) {
        double up = std::clamp((i - 1.0) / ramp, 0.0, 1.0);
        double dn = std::clamp((gl->nt() - 2.0 - i) / ramp, 0.0, 1.0);
        double prof = up * up * (3 - 2 * up) * dn * dn * (3 - 2 * dn);
        for (int j = 0; j < gl->nx(); ++j) win.window(i, j) = prof;
      }
      GridFunction phi = random_configuration(*gl, rng);
      GridFunction hdir = gaussian_bump(*gl, gl->t(gl->nt() / 2), M_PI, 1.2, 1.2);
      for (int i = 0; i < gl->nt(); ++i)  // keep h inside the window plateau
        for (int j = 0; j < gl->nx(); ++j)
          if (i < ramp + 3 || i > gl->nt() - ramp - 4) hdir(i, j) = 0;
      const double eps = 1e-4;
      GridFunction pp = phi, pm = phi;
      pp += Complex(eps) * hdir;
      pm += Complex(-eps) * hdir;
      Complex fd = (action_window(*Kl, win, pp) - action_window(*Kl, win, pm)) / (2.0 * eps);
      GridFunction el = euler_lagrange(*Kl, win, phi);
      Complex direct = 0;
      for (int i = 0; i < gl->nt(); ++i)
        for (int j = 0; j < gl->nx(); ++j)
          direct += el(i, j) * win.window(i, j) * hdir(i, j) * gl->weight(j);
      rep.add(make_check("el_fd_oracle", "S'(phi) matches the action finite difference",
                         std::abs(fd - direct) / std::max(1.0, std::abs(fd)), 1e-6));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
inline Report causality_net(const SuiteContext& ctx) {
  Report rep;
  rep.suite = "causality-net";
  auto rng = ctx.rng(0xca5);
  TruncationOrders ord{0, 4};

  // equal-time disjoint supports: the commutator kernel vanishes identically
  {
    const auto& g = *ctx.grid;
    auto pj = make_kernel(ctx.K, KernelKind::PauliJordan);
    auto probes = random_probes(g, rng, 2);
    int i0 = g.nt() / 2;
    GridFunction w1(g), w2(g);
    for (int j = 0; j < g.nx() / 2 - 1; ++j) w1(i0, j) = 1.0;
    for (int j = g.nx() / 2; j < g.nx() - 1; ++j) w2(i0, j) = 1.0;
    RegularFunctional F = make_monomial(ctx.grid, 2, w1) + make_linear(ctx.grid, w1);
    RegularFunctional G = make_monomial(ctx.grid, 2, w2) + make_linear(ctx.grid, w2);
    FormalSeries comm = star(F, G, pj, ord) - star(G, F, pj, ord);
    double mx = 0;
    for (const auto& phi : probes)
      for (const auto& [pq, v] : comm.evaluate(phi)) mx = std::max(mx, std::abs(v));
    rep.add(make_check("equal_time_commutator", "[A,B]_star = 0 for equal-time disjoint"
                       " supports", mx, 1e-12));
  }

  // extended regions on the finer grid, smooth factors
  SuiteContext wide = wide_context(ctx);
  const auto& gw = *wide.grid;
  auto pjw = make_kernel(wide.K, KernelKind::PauliJordan);
  auto probes = random_probes(gw, rng, 2);
  Region r1(gw.nt(), gw.nx()), r2(gw.nt(), gw.nx());
  int it0 = gw.nt() / 2 - 2;
  for (int i = it0; i <= it0 + 4; ++i) {
    for (int j = 2; j <= 20; ++j) r1.insert(i, j);
    for (int j = 34; j <= 52; ++j) r2.insert(i, j);
  }
  rep.add(make_flag_check("regions_spacelike", "test regions are spacelike separated",
                          spacelike_separated(gw, r1, r2)));
  auto builder = [&](std::mt19937_64& rg, const Region& r) {
    bool first = r.contains(it0, 3);
    double xlo = gw.x(first ? 7 : 39), xhi = gw.x(first ? 15 : 47);
    return random_functional_in_box(wide.grid, rg, it0 + 1, it0 + 3, xlo, xhi, 1.0, 1.8);
  };
  Report inner = net_causality_check(pjw, r1, r2, builder, rng, probes, 2);
  rep.add(make_check("spacelike_commutator", inner.checks[0].statement,
                     inner.checks[0].deviation, 1e-10));

  // timelike negative control
  {
    RegularFunctional F1 = builder(rng, r1);
    GridFunction w2 = random_smooth_in_box(gw, rng, it0 + 12, it0 + 14, gw.x(8), gw.x(14), 1.0,
                                           1.8);
    RegularFunctional F2 = make_linear(wide.grid, w2) + make_monomial(wide.grid, 2, w2);
    FormalSeries comm = star(F1, F2, pjw, ord) - star(F2, F1, pjw, ord);
    double mx = 0;
    for (const auto& phi : probes)
      for (const auto& [pq, v] : comm.evaluate(phi)) mx = std::max(mx, std::abs(v));
    rep.add(make_flag_check("timelike_control", "timelike-related supports do not commute",
                            mx > 1e-6, "commutator magnitude " + std::to_string(mx)));
  }

  // identical regions are rejected
  {
    bool rejected = false;
    try {
      net_causality_check(pjw, r1, r1, builder, rng, probes, 1);
    } catch (const DomainError&) {
      rejected = true;
    }
    rep.add(make_flag_check("same_region_rejected", "R1 = R2 violates the precondition",
                            rejected));
  }
  return rep;
}

// ---------------------------------------------------------------------------
inline Report timeslice(const SuiteContext& ctx) {
  Report rep;
  rep.suite = "timeslice";
  const auto& g = *ctx.grid;
  auto rng = ctx.rng(0x715);
  auto pj = make_kernel(ctx.K, KernelKind::PauliJordan);

  std::vector<GridFunction> pair_probes;
  for (int c = 0; c < 4; ++c) pair_probes.push_back(random_band_limited(g, rng));

  GridFunction f = random_band_limited(g, rng);
  int i1 = g.nt() / 4, i2 = 3 * g.nt() / 4;
  Report r = timeslice_check(ctx.K, pj, f, i1, i2, pair_probes);
  for (auto& c : r.checks) rep.add(c);

  // f already supported in the slab: pairings match identically
  {
    GridFunction fs(g);
    for (int i = i1 + 2; i <= i2 - 2; ++i)
      for (int j = 0; j < g.nx(); ++j) fs(i, j) = f(i, j);
    Report r2 = timeslice_check(ctx.K, pj, fs, i1, i2, pair_probes);
    double dev = 0;
    for (auto& c : r2.checks)
      if (c.name == "sigma_pairings") dev = c.deviation;
    rep.add(make_check("in_slab_pairings", "f in the slab: f' = f modulo the ideal", dev,
                       1e-8));
  }

  bool thin = false;
  try {
    timeslice_check(ctx.K, pj, f, i1, i1 + 2, pair_probes);
  } catch (const DomainError&) {
    thin = true;
  }
  rep.add(make_flag_check("thin_slab_rejected", "slab of fewer than 4 steps is rejected", thin));
  return rep;
}

// ---------------------------------------------------------------------------
// Helpers shared by the tord/bogoliubov/rg suites: small local functionals
// with prescribed time supports.
inline GridFunction hard_window(const SpacetimeGrid& g, int i_lo, int i_hi, int j_lo, int j_hi,
                                double amp = 1.0) {
  GridFunction w(g);
  for (int i = i_lo; i <= i_hi; ++i)
    for (int j = j_lo; j <= j_hi; ++j) w(i, g.wrap_x(j)) = amp;
  return w;
}

inline Report tord_axioms(const SuiteContext& ctx) {
  Report rep;
  rep.suite = "tord-axioms";
  const auto& g = *ctx.grid;
  auto rng = ctx.rng(0x70d);
  auto pj = make_kernel(ctx.K, KernelKind::PauliJordan);
  auto dir = make_kernel(ctx.K, KernelKind::Dirac);
  auto fey = make_kernel(ctx.K, KernelKind::Feynman);
  auto W = make_kernel(ctx.K, KernelKind::Wightman);
  KernelPtr H = derive_h_kernel(*W);
  auto probes = random_probes(g, rng, 2);
  TruncationOrders ord{0, 4};

  // commutativity / associativity / conjugation consistency
  {
    RegularFunctional A = random_functional(ctx.grid, rng, 3, ctx.degree_bound);
    RegularFunctional B = random_functional(ctx.grid, rng, 3, ctx.degree_bound);
    RegularFunctional C = random_functional(ctx.grid, rng, 2, ctx.degree_bound);
    FormalSeries AS = FormalSeries::lift(A, ord), BS = FormalSeries::lift(B, ord),
                 CS = FormalSeries::lift(C, ord);
    rep.add(make_check("commutative", "F .T G = G .T F",
                       series_distance(tord(AS, BS, dir), tord(BS, AS, dir), probes), 1e-10));
    rep.add(make_check("associative", "(F .T G) .T K = F .T (G .T K)",
                       series_distance(tord(tord(AS, BS, dir), CS, dir),
                                       tord(AS, tord(BS, CS, dir), dir), probes),
                       1e-10));
    FormalSeries routeA = tord(AS, BS, dir);
    FormalSeries routeB = tord_unary(
        series_pointwise(tord_unary(AS, dir, true), tord_unary(BS, dir, true)), dir);
    rep.add(make_check("conjugation_consistency", "F .T G = T(T^-1 F . T^-1 G)",
                       series_distance(routeA, routeB, probes), 1e-10));
  }

  // causal ordering both ways + overlap rejection
  {
    GridFunction wlate = hard_window(g, 3 * g.nt() / 4, 3 * g.nt() / 4 + 2, 3, 8);
    GridFunction wearly = hard_window(g, g.nt() / 4 - 2, g.nt() / 4, 9, 14);
    RegularFunctional Fl = make_monomial(ctx.grid, 2, wlate) + make_linear(ctx.grid, wlate);
    RegularFunctional Ge = make_monomial(ctx.grid, 2, wearly);
    Report r1 = ordering_check(Fl, Ge, pj, dir, probes, ord);
    rep.add(make_check("ordering_later", r1.checks[0].statement, r1.checks[0].deviation,
                       1e-10));
    Report r2 = ordering_check(Ge, Fl, pj, dir, probes, ord);
    rep.add(make_check("ordering_earlier", r2.checks[0].statement, r2.checks[0].deviation,
                       1e-10));
    bool rejected = false;
    try {
      GridFunction wmid = hard_window(g, g.nt() / 4, 3 * g.nt() / 4 + 1, 0, 4);
      ordering_check(make_monomial(ctx.grid, 2, wmid), Fl, pj, dir, probes, ord);
    } catch (const DomainError&) {
      rejected = true;
    }
    rep.add(make_flag_check("overlap_rejected", "overlapping supports violate the"
                            " precondition", rejected));
  }

  // T1: empty product is the unit
  {
    FormalSeries one = FormalSeries::unit(ctx.grid, ord, ctx.degree_bound);
    rep.add(make_flag_check("t1_unit", "T_0 = 1", true, "empty time-ordered product"));
    // T2: the unary map; trivial on ultralocal monomials (Delta^D vanishes at
    // coincidence on the grid), nontrivial on bilocal functionals
    GridFunction fa = random_band_limited(g, rng), fb = random_band_limited(g, rng);
    RegularFunctional bilocal(ctx.grid, ctx.degree_bound);
    KernelTerm t;
    t.c = 1.0;
    t.f = {Factor::dense(std::make_shared<const GridFunction>(fa)),
           Factor::dense(std::make_shared<const GridFunction>(fb))};
    bilocal.add_term(std::move(t));
    FormalSeries lhs = tord_unary(FormalSeries::lift(bilocal, ord), dir);
    PairingEngine eng(dir);
    Complex pd = eng.pair(Factor::dense(std::make_shared<const GridFunction>(fa)),
                          Factor::dense(std::make_shared<const GridFunction>(fb)));
    FormalSeries rhs = FormalSeries::lift(bilocal, ord);
    FormalSeries corr(ctx.grid, ord, ctx.degree_bound);
    corr.set(0, 1, RegularFunctional::constant(ctx.grid, Complex(0, 1) * pd,
                                               ctx.degree_bound));
    rhs += corr;
    rep.add(make_check("t2_unary", "T_1(F) = F + i hbar <Delta^D, F''>/2 on the grid",
                       series_distance(lhs, rhs, probes), 1e-12));
    // and the Feynman-picture unary map is its normal-ordering conjugate
    RegularFunctional F = random_functional(ctx.grid, rng, 3, ctx.degree_bound);
    FormalSeries FS = FormalSeries::lift(F, ord);
    rep.add(make_check("t2_normal_ordering", "T^F = a_H o T (Feynman vs Dirac ordering map)",
                       series_distance(tord_unary(FS, fey), alpha_h(tord_unary(FS, dir), H),
                                       probes),
                       1e-10));
  }

  // T3 causal factorization for n = 3, 4 and permutation symmetry
  {
    int q = g.nt() / 8;
    std::vector<RegularFunctional> fam;
    for (int n = 0; n < 4; ++n) {
      GridFunction w = hard_window(g, (n + 1) * q + q / 2 + 1, (n + 1) * q + q / 2 + 2,
                                   3 * n + 1, 3 * n + 4);
      fam.push_back(make_monomial(ctx.grid, 2, w, ctx.degree_bound));
    }
    // T_n ordered latest-first blocks: first k arguments later than the rest
    std::vector<RegularFunctional> f3 = {fam[3], fam[2], fam[1]};
    FormalSeries t3 = tord_n(f3, dir, ord);
    for (int k = 1; k < 3; ++k) {
      std::vector<RegularFunctional> head(f3.begin(), f3.begin() + k);
      std::vector<RegularFunctional> tail(f3.begin() + k, f3.end());
      FormalSeries fac = star(tord_n(head, dir, ord), tord_n(tail, dir, ord), pj);
      rep.add(make_check("t3_factorization_n3_k" + std::to_string(k),
                         "T_n = T_k star T_{n-k} for causally ordered blocks",
                         series_distance(t3, fac, probes), 1e-10));
    }
    std::vector<RegularFunctional> f4 = {fam[3], fam[2], fam[1], fam[0]};
    FormalSeries t4 = tord_n(f4, dir, ord);
    FormalSeries fac = star(tord_n({fam[3], fam[2]}, dir, ord),
                            tord_n({fam[1], fam[0]}, dir, ord), pj);
    rep.add(make_check("t3_factorization_n4", "T_4 = T_2 star T_2 for causally ordered"
                       " blocks", series_distance(t4, fac, probes), 1e-10));
    FormalSeries perm = tord_n({fam[1], fam[3], fam[2]}, dir, ord);
    rep.add(make_check("permutation_symmetry", "T_n symmetric in its arguments",
                       series_distance(t3, perm, probes), 1e-12));
  }
  return rep;
}

// ---------------------------------------------------------------------------
inline Report bogoliubov_suite(const SuiteContext& ctx) {
  Report rep;
  rep.suite = "bogoliubov";
  const auto& g = *ctx.grid;
  auto rng = ctx.rng(0xb09);
  auto pj = make_kernel(ctx.K, KernelKind::PauliJordan);
  auto dir = make_kernel(ctx.K, KernelKind::Dirac);
  auto probes = random_probes(g, rng, 2);
  const int vb = 8;  // degree bound for quartic chains
  TruncationOrders ord{ctx.interaction.set ? ctx.interaction.lambda_orders : 2, 4};

  // quartic vertex: the configured window, or a compact default
  GridFunction vw =
      ctx.interaction.set
          ? hard_window(g, ctx.interaction.t_lo, ctx.interaction.t_hi, ctx.interaction.x_lo,
                        ctx.interaction.x_hi, ctx.interaction.coupling)
          : hard_window(g, g.nt() / 2 - 1, g.nt() / 2 + 1, 5, 7);
  RegularFunctional V4 = Complex(-1.0 / 24.0) * make_monomial(ctx.grid, 4, vw, vb);
  FormalSeries V(ctx.grid, ord, vb);
  V.set(1, 0, V4);
  // observable in the causal past of nothing in particular
  GridFunction fw = hard_window(g, g.nt() / 4 - 1, g.nt() / 4 + 1, 9, 11);
  RegularFunctional F = make_monomial(ctx.grid, 2, fw, vb);

  FormalSeries one = FormalSeries::unit(ctx.grid, ord, vb);
  {
    FormalSeries zeroV(ctx.grid, ord, vb);
    rep.add(make_check("smatrix_zero", "S(0) = 1",
                       series_distance(smatrix(zeroV, dir), one, probes), 1e-14));
    FormalSeries S = smatrix(V, dir);
    // coupling-order-1 coefficient is (i/hbar) V
    FormalSeries lin(ctx.grid, ord, vb);
    if (const RegularFunctional* c = S.get(1, -1)) lin.set(1, -1, *c);
    FormalSeries want(ctx.grid, ord, vb);
    want.set(1, -1, Complex(0, 1) * V4);
    rep.add(make_check("smatrix_order1", "coupling-order-1 term of S(V) is (i/hbar) V",
                       series_distance(lin, want, probes), 1e-13));
    rep.add(make_check("unitarity", "S(V)* star S(V) = 1",
                       series_distance(star(S.conjugated(), S, pj), one, probes), 1e-10));
    rep.add(make_check("star_inverse", "S^{*-1} star S = 1",
                       series_distance(star(star_inverse(S, pj), S, pj), one, probes), 1e-10));
  }
  {
    // geometric series check for the inverse
    RegularFunctional A = random_functional(ctx.grid, rng, 2, vb);
    FormalSeries SA(ctx.grid, ord, vb);
    SA.set(0, 0, RegularFunctional::constant(ctx.grid, 1.0, vb));
    SA.set(1, 0, A);
    FormalSeries inv = star_inverse(SA, pj);
    FormalSeries mA(ctx.grid, ord, vb);
    mA.set(1, 0, Complex(-1.0) * A);
    FormalSeries AA = star(FormalSeries::lift(A, ord), FormalSeries::lift(A, ord), pj);
    FormalSeries AA2(ctx.grid, ord, vb);
    for (const auto& [pq, c] : AA.coefficients()) AA2.accumulate(2, pq.second, c);
    FormalSeries want2 = FormalSeries::unit(ctx.grid, ord, vb);
    want2 += mA;
    want2 += AA2;
    rep.add(make_check("neumann_inverse", "(1 + c A)^{-1} = 1 - c A + c^2 A star A - ...",
                       series_distance(inv, want2, probes), 1e-11));
  }
  {
    FormalSeries R0 = bogoliubov(FormalSeries(ctx.grid, ord, vb), F, pj, dir);
    FormalSeries TF = tord_unary(FormalSeries::lift(F, ord), dir);
    rep.add(make_check("r0_is_tf", "R_0(F) = T F", series_distance(R0, TF, probes), 1e-14));

    // first-order coefficient against the direct expansion
    FormalSeries R = bogoliubov(V, F, pj, dir);
    FormalSeries TFs = tord_unary(FormalSeries::lift(F, ord), dir);
    FormalSeries Vs(ctx.grid, ord, vb);
    Vs.set(0, 0, V4);  // V without the coupling grade for the hand expansion
    FormalSeries hand = tord(Vs, TFs, dir) - star(Vs, TFs, pj);
    double dev = 0;
    for (const auto& phi : probes) {
      auto er = R.evaluate(phi);
      auto eh = hand.evaluate(phi);
      double scale = 1.0;
      for (auto& [pq, v] : eh) scale = std::max(scale, std::abs(v));
      for (auto& [pq, v] : eh) {
        Complex got = 0;
        auto it = er.find({1, pq.second - 1});
        if (it != er.end()) got = it->second;
        dev = std::max(dev, std::abs(got - Complex(0, 1) * v) / scale);
      }
    }
    rep.add(make_check("bogoliubov_order1",
                       "coupling-order-1 of R_V(F) = (i/hbar)[V .T TF - V star TF]", dev,
                       1e-12));
  }

  // locality: perturbations of V strictly outside J-(supp F)
  {
    Region sF = F.support();
    // future-placed perturbation: exactly outside the past of F
    GridFunction dwf = hard_window(g, 3 * g.nt() / 4, 3 * g.nt() / 4 + 2, 1, 3, 0.7);
    RegularFunctional dV4 = Complex(-1.0 / 24.0) * make_monomial(ctx.grid, 4, dwf, vb);
    FormalSeries Vpert = V;
    FormalSeries dVs(ctx.grid, ord, vb);
    dVs.set(1, 0, dV4);
    Vpert += dVs;
    Region pastF = causal_past(g, sF);
    rep.add(make_flag_check("probe_outside_past", "perturbation window avoids J-(supp F)",
                            !dwf.support(g).intersects(pastF)));
    FormalSeries R1 = bogoliubov(V, F, pj, dir);
    FormalSeries R2 = bogoliubov(Vpert, F, pj, dir);
    rep.add(make_check("locality_outside", "R_V(F) unchanged by V-perturbations outside"
                       " J-(supp F)", series_distance(R1, R2, probes), 1e-10));
    // inside perturbation: strictly earlier than F, inside its past cone
    GridFunction dwin = hard_window(g, g.margin() + 1, g.margin() + 2, 9, 11, 0.7);
    RegularFunctional dV4i = Complex(-1.0 / 24.0) * make_monomial(ctx.grid, 4, dwin, vb);
    FormalSeries Vpin = V;
    FormalSeries dVi(ctx.grid, ord, vb);
    dVi.set(1, 0, dV4i);
    Vpin += dVi;
    FormalSeries R3 = bogoliubov(Vpin, F, pj, dir);
    rep.add(make_flag_check("locality_inside", "past-cone perturbations change R_V(F)",
                            series_distance(R1, R3, probes) > 1e-6,
                            "change " + std::to_string(series_distance(R1, R3, probes))));
  }

  // relative S-matrices for two couplings agreeing on the causal completion
  // of the observable region are conjugate by the computed unitary S(dV)
  {
    GridFunction fw2 = hard_window(g, g.nt() / 2 - 1, g.nt() / 2 + 1, 9, 11);
    RegularFunctional Flin = make_linear(ctx.grid, fw2, vb);
    FormalSeries Fv(ctx.grid, ord, vb);
    Fv.set(1, 0, Flin);
    auto relative_s = [&](const FormalSeries& Vbase) {
      FormalSeries sum = Vbase;
      sum += Fv;
      return star(star_inverse(smatrix(Vbase, dir), pj), smatrix(sum, dir), pj);
    };
    // dV strictly earlier than everything else
    GridFunction dwp = hard_window(g, g.margin() + 1, g.margin() + 2, 2, 4, 0.6);
    FormalSeries dV(ctx.grid, ord, vb);
    dV.set(1, 0, Complex(-1.0 / 24.0) * make_monomial(ctx.grid, 4, dwp, vb));
    FormalSeries Vp = V;
    Vp += dV;
    FormalSeries U = smatrix(dV, dir);
    FormalSeries lhs = relative_s(Vp);
    FormalSeries rhs = star(star(star_inverse(U, pj), relative_s(V), pj), U, pj);
    rep.add(make_check("relative_smatrix_covariance",
                       "S_{V+dV}(F) = U^{-1} star S_V(F) star U with U = S(dV) for"
                       " past-placed dV",
                       series_distance(lhs, rhs, probes), 1e-8));
  }

  // spacelike perturbation at first order on the finer grid (smooth windows)
  {
    SuiteContext wide = wide_context(ctx);
    const auto& gw = *wide.grid;
    auto pjw = make_kernel(wide.K, KernelKind::PauliJordan);
    auto dirw = make_kernel(wide.K, KernelKind::Dirac);
    TruncationOrders o1{1, 4};
    auto probesw = random_probes(gw, rng, 2);
    int it0 = gw.nt() / 2;
    GridFunction fwin = random_smooth_in_box(gw, rng, it0 - 1, it0 + 1, gw.x(8), gw.x(12),
                                             1.2, 1.8, 1);
    RegularFunctional Fw = make_monomial(wide.grid, 2, fwin, vb);
    GridFunction vwin = random_smooth_in_box(gw, rng, it0 - 1, it0 + 1, gw.x(40), gw.x(44),
                                             1.2, 1.8, 1);
    RegularFunctional Vw = make_monomial(wide.grid, 2, vwin, vb);
    FormalSeries Vser(wide.grid, o1, vb);
    Vser.set(1, 0, Vw);
    FormalSeries R0w = bogoliubov(FormalSeries(wide.grid, o1, vb), Fw, pjw, dirw);
    FormalSeries Rw = bogoliubov(Vser, Fw, pjw, dirw);
    rep.add(make_check("locality_spacelike",
                       "spacelike vertex perturbations leave R_V(F) unchanged",
                       series_distance(Rw, R0w, probesw), 1e-10));
  }
  return rep;
}

// ---------------------------------------------------------------------------
inline Report rg_group(const SuiteContext& ctx) {
  Report rep;
  rep.suite = "rg-group";
  const auto& g = *ctx.grid;
  auto rng = ctx.rng(0x269);
  auto pj = make_kernel(ctx.K, KernelKind::PauliJordan);
  auto dir = make_kernel(ctx.K, KernelKind::Dirac);
  auto probes = random_probes(g, rng, 3);
  const int vb = 12;  // fused vertices reach degree 6; pair products degree 12
  TruncationOrders ord{2, 4};
  GridFunction ambient1 = random_configuration(g, rng);
  GridFunction ambient2 = random_configuration(g, rng);

  // probe family of local polynomials with controllable supports
  auto make_poly = [&](int ilo, int ihi, int jlo, int jhi, double amp) {
    LocalPolynomial P{ctx.grid, {}};
    P.windows[2] = hard_window(g, ilo, ihi, jlo, jhi, amp);
    P.windows[4] = hard_window(g, ilo, ihi, jlo, jhi, 0.3 * amp);
    return P;
  };

  auto run_z_checks = [&](const std::string& label, const RenormalizationMap& Z,
                          bool expect_z5_pass) {
    LocalPolynomial A = make_poly(g.nt() / 2, g.nt() / 2 + 1, 3, 5, 0.8);
    LocalPolynomial B = make_poly(g.nt() / 2, g.nt() / 2 + 1, 8, 10, 0.6);
    LocalPolynomial Gm = make_poly(g.nt() / 2, g.nt() / 2 + 1, 6, 7, 0.5);
    // Z1: Z(0) = 0
    LocalPolynomial zero{ctx.grid, {}};
    auto z0 = Z.apply(zero, ambient1);
    double z1dev = 0;
    for (auto& [q, poly] : z0)
      if (!poly.empty()) z1dev = std::max(z1dev, 1.0);
    rep.add(make_check(label + "_z1", "Z(0) = 0", z1dev, 0.5));
    // Z2: linearization at 0 is the identity at hbar order 0
    // (quadratic parts cancel in 2 Z(eF)/e - Z(2eF)/(2e))
    {
      const double eps = 1e-3;
      auto za = Z.apply(A.scaled(eps), ambient1);
      auto zb = Z.apply(A.scaled(2.0 * eps), ambient1);
      double dev = 0;
      for (const auto& phi : probes) {
        Complex lin = (2.0 / eps) * za[0].realize(vb).evaluate(phi) -
                      (0.5 / eps) * zb[0].realize(vb).evaluate(phi);
        Complex want = A.realize(vb).evaluate(phi);
        dev = std::max(dev, std::abs(lin - want) / std::max(1.0, std::abs(want)));
      }
      rep.add(make_check(label + "_z2", "Z^{(1)}(0) = id at hbar^0", dev, 1e-9));
    }
    // Z3: Z - id carries at least one power of hbar
    {
      auto za = Z.apply(A, ambient1);
      double dev = 0;
      for (const auto& phi : probes) {
        Complex l = za[0].realize(vb).evaluate(phi);
        Complex r = A.realize(vb).evaluate(phi);
        dev = std::max(dev, std::abs(l - r) / std::max(1.0, std::abs(r)));
      }
      rep.add(make_check(label + "_z3", "Z = id + O(hbar)", dev, 1e-12));
    }
    // Z4: additivity for disjoint outer supports
    {
      auto lhs = Z.apply(A.plus(Gm).plus(B), ambient1);
      auto r1 = Z.apply(A.plus(Gm), ambient1);
      auto r2 = Z.apply(Gm.plus(B), ambient1);
      auto r3 = Z.apply(Gm, ambient1);
      double dev = 0;
      for (const auto& phi : probes)
        for (int q = 0; q <= 1; ++q) {
          Complex l = lhs.count(q) ? lhs[q].realize(vb).evaluate(phi) : 0.0;
          Complex r = (r1.count(q) ? r1[q].realize(vb).evaluate(phi) : 0.0) +
                      (r2.count(q) ? r2[q].realize(vb).evaluate(phi) : 0.0) -
                      (r3.count(q) ? r3[q].realize(vb).evaluate(phi) : 0.0);
          dev = std::max(dev, std::abs(l - r) / std::max(1.0, std::abs(l) + std::abs(r)));
        }
      rep.add(make_check(label + "_z4", "Z(F+G+H) = Z(F+G) + Z(G+H) - Z(G)", dev, 1e-12));
    }
    // Z5: no explicit configuration dependence
    {
      auto za = Z.apply(A, ambient1);
      auto zb = Z.apply(A, ambient2);
      double dev = 0;
      for (const auto& phi : probes)
        for (int q = 0; q <= 1; ++q) {
          Complex l = za.count(q) ? za[q].realize(vb).evaluate(phi) : 0.0;
          Complex r = zb.count(q) ? zb[q].realize(vb).evaluate(phi) : 0.0;
          dev = std::max(dev, std::abs(l - r) / std::max(1.0, std::abs(l) + std::abs(r)));
        }
      if (expect_z5_pass)
        rep.add(make_check(label + "_z5", "dZ/dphi = 0", dev, 1e-12));
      else
        rep.add(make_flag_check(label + "_z5_violation_detected",
                                "phi-dependent shift is flagged by the dZ/dphi = 0 check",
                                dev > 1e-6));
    }
  };

  RenormalizationMap zId;
  run_z_checks("id", zId, true);
  RenormalizationMap zQuad;
  zQuad.c_quadratic = 0.05;
  run_z_checks("quad", zQuad, true);
  RenormalizationMap zTrace;
  zTrace.c_linear_trace = 0.05;
  run_z_checks("trace", zTrace, true);
  RenormalizationMap zBad;
  zBad.c_phi_shift = 0.05;
  run_z_checks("phishift", zBad, false);

  // S o Z still factorizes causally and fixes S(0) = 1
  {
    auto hatS = [&](const LocalPolynomial& P, const RenormalizationMap& Z) {
      auto zp = Z.apply(P, ambient1);
      FormalSeries V(ctx.grid, ord, vb);
      for (auto& [q, poly] : zp) {
        RegularFunctional r = poly.realize(vb);
        r *= Complex(-1.0);  // interaction sign convention
        if (!r.is_zero()) V.accumulate(1, q, r);
      }
      return smatrix(V, dir);
    };
    LocalPolynomial late = make_poly(3 * g.nt() / 4, 3 * g.nt() / 4 + 1, 3, 5, 0.6);
    LocalPolynomial early = make_poly(g.nt() / 4, g.nt() / 4 + 1, 8, 10, 0.6);
    for (auto& [label, Z] : std::vector<std::pair<std::string, RenormalizationMap>>{
             {"id", zId}, {"quad", zQuad}, {"trace", zTrace}}) {
      FormalSeries Sab = hatS(late.plus(early), Z);
      FormalSeries fac = star(hatS(late, Z), hatS(early, Z), pj);
      rep.add(make_check("factorization_" + label,
                         "S(Z(A+B)) = S(Z(A)) star S(Z(B)) for A later than B",
                         series_distance(Sab, fac, probes), 1e-10));
    }
    LocalPolynomial zero{ctx.grid, {}};
    rep.add(make_check("hat_s_unit", "S(Z(0)) = 1",
                       series_distance(hatS(zero, zQuad),
                                       FormalSeries::unit(ctx.grid, ord, vb), probes),
                       1e-14));
  }
  return rep;
}

// ---------------------------------------------------------------------------
inline Report microlocal_calibration(const SuiteContext& ctx) {
  Report rep;
  rep.suite = "microlocal-calibration";
  const auto& g = *ctx.grid;
  WfParams p;

  // delta: all directions at the site, nothing beyond the window radius
  {
    Eigen::ArrayXXcd v = Eigen::ArrayXXcd::Zero(g.nt(), g.nx());
    int ic = g.nt() / 2, jc = g.nx() / 2;
    v(ic, jc) = 1.0;
    WFEstimate est = wf_estimate_2d(v, 1.0, 1.0, p);
    std::uint32_t all = (1u << p.directions) - 1;
    bool at_site = est.flags.count({ic, jc}) && est.flags.at({ic, jc}) == all;
    bool confined = true;
    for (const auto& [pt, m] : est.flags) {
      int d = std::max(std::abs(pt.first - ic),
                       std::min(std::abs(pt.second - jc), g.nx() - std::abs(pt.second - jc)));
      if (d > p.window) confined = false;
    }
    rep.add(make_flag_check("delta_all", "delta flags every direction at its site",
                            at_site && !est.empty()));
    rep.add(make_flag_check("delta_confined", "delta flags stay within the window radius",
                            confined));
  }
  // Gaussian: empty estimate
  {
    GridFunction b = gaussian_bump(g, g.t(g.nt() / 2), M_PI, 2.0, 2.0);
    WFEstimate est = wf_estimate_2d(b.values(), 1.0, 1.0, p);
    rep.add(make_flag_check("gauss_none", "a smooth Gaussian has an empty estimate",
                            est.empty()));
  }
  // oscillatory family: e^{i w0 t} flags exactly the +t bucket
  {
    double w0 = 0.8 * p.rmax_frac * M_PI;  // cell units
    Eigen::ArrayXXcd v(g.nt(), g.nx());
    for (int i = 0; i < g.nt(); ++i)
      for (int j = 0; j < g.nx(); ++j) v(i, j) = std::exp(Complex(0, w0 * i));
    WFEstimate est = wf_estimate_2d(v, 1.0, 1.0, p);
    auto dirs = est.all_directions();
    rep.add(make_flag_check("wave_single", "e^{i w t} flags only its own frequency bucket",
                            dirs.size() == 1 && dirs.count(0) == 1));
  }
  // Hoermander criterion
  {
    Eigen::ArrayXXcd d1 = Eigen::ArrayXXcd::Zero(g.nt(), g.nx());
    d1(g.nt() / 2, g.nx() / 2) = 1.0;
    WFEstimate ed = wf_estimate_2d(d1, 1.0, 1.0, p);
    rep.add(make_flag_check("hormander_dd", "delta . delta rejected",
                            !hormander_product_ok(ed, ed)));
    GridFunction b = gaussian_bump(g, g.t(g.nt() / 2), M_PI, 2.0, 2.0);
    WFEstimate eg = wf_estimate_2d(b.values(), 1.0, 1.0, p);
    rep.add(make_flag_check("hormander_ds", "delta . smooth accepted",
                            hormander_product_ok(ed, eg)));
    // vacuum two-point section: one-sided cone, square well defined
    auto W = make_kernel(ctx.K, KernelKind::Wightman);
    int x0 = g.nx() / 2;
    Eigen::ArrayXXcd sec(g.nt(), g.nt());
    for (int i = 0; i < g.nt(); ++i)
      for (int j = 0; j < g.nt(); ++j) sec(i, j) = W->entry(i, x0, j, x0);
    WFEstimate ew = wf_estimate_2d(sec, g.dt(), g.dt(), p, /*periodic_x=*/false);
    rep.add(make_flag_check("hormander_pp", "W . W accepted (one-sided cones)",
                            hormander_product_ok(ew, ew) && !ew.empty()));
    Report mc = microcausal_check(sec, g.dt(), p);
    rep.add(make_check("microcausal_w", "vacuum W passes the cone condition",
                       mc.checks[0].deviation, mc.checks[0].tolerance));
    // negative control: both-forward oscillation
    double w0 = 0.8 * p.rmax_frac * M_PI / g.dt();
    Eigen::ArrayXXcd bad(g.nt(), g.nt());
    for (int i = 0; i < g.nt(); ++i)
      for (int j = 0; j < g.nt(); ++j) bad(i, j) = std::exp(Complex(0, w0 * g.dt() * (i + j)));
    Report mc2 = microcausal_check(bad, g.dt(), p);
    rep.add(make_flag_check("microcausal_control", "e^{i w(t1 + t2)} violates the cone"
                            " condition", !mc2.checks[0].pass));
  }
  // vacuum restricted to a timelike line: only positive-frequency buckets.
  // The second time difference weights the modes by omega^2 without moving
  // any singular direction; it makes the one-sided high-frequency content
  // dominant on the short line the grid affords.
  {
    SuiteContext lctx = long_context(ctx);
    const auto& gl = *lctx.grid;
    auto W = make_kernel(lctx.K, KernelKind::Wightman);
    int x0 = gl.nx() / 3;
    Eigen::ArrayXcd line(gl.nt());
    for (int i = 0; i < gl.nt(); ++i) line(i) = W->entry(i, x0, 0, x0);
    Eigen::ArrayXcd d2(gl.nt() - 2);
    for (int i = 1; i + 1 < gl.nt(); ++i)
      d2(i - 1) = (line(i + 1) - 2.0 * line(i) + line(i - 1)) / (gl.dt() * gl.dt());
    WFEstimate est = wf_estimate_1d(d2, gl.dt(), p);
    bool pos_only = !est.empty();
    for (const auto& [pt, m] : est.flags)
      if ((m >> 1) & 1u) pos_only = false;
    rep.add(make_flag_check("vacuum_line_positive",
                            "W on a timelike line flags only positive frequencies", pos_only));
  }
  // invariances
  {
    Eigen::ArrayXXcd v = Eigen::ArrayXXcd::Zero(g.nt(), g.nx());
    v(g.nt() / 2, 3 * g.nx() / 4) = 1.0;
    Eigen::ArrayXXcd vs = Eigen::ArrayXXcd::Zero(g.nt(), g.nx());
    vs(g.nt() / 2, (3 * g.nx() / 4 + 5) % g.nx()) = 1.0;
    WFEstimate e1 = wf_estimate_2d(v, 1.0, 1.0, p);
    WFEstimate e2 = wf_estimate_2d(vs, 1.0, 1.0, p);
    bool covariant = e1.flags.size() == e2.flags.size();
    for (const auto& [pt, m] : e1.flags) {
      auto it = e2.flags.find({pt.first, (pt.second + 5) % g.nx()});
      if (it == e2.flags.end() || it->second != m) covariant = false;
    }
    rep.add(make_flag_check("translation_covariance",
                            "periodic shifts move base points, directions unchanged",
                            covariant));
    WfParams p6 = p;
    p6.decay_degree = 6;
    WFEstimate e6 = wf_estimate_2d(v, 1.0, 1.0, p6);
    bool superset = true;
    for (const auto& [pt, m] : e1.flags) {
      auto it = e6.flags.find(pt);
      if (it == e6.flags.end() || (it->second & m) != m) superset = false;
    }
    rep.add(make_flag_check("degree_monotonicity", "stricter decay degree flags a superset",
                            superset));
    WFEstimate e1b = wf_estimate_2d(v, 1.0, 1.0, p);
    rep.add(make_flag_check("reproducible", "identical inputs give identical estimates",
                            e1.flags == e1b.flags));
    // smooth + singular on a wider synthetic array, so that no window sees
    // both the delta and the Gaussian above the significance floor
    {
      Eigen::ArrayXXcd vd = Eigen::ArrayXXcd::Zero(48, 64);
      vd(24, 48) = 1.0;
      Eigen::ArrayXXcd sm = vd;
      for (int i = 0; i < 48; ++i)
        for (int j = 0; j < 64; ++j) {
          double ddt = (i - 24.0) / 2.0;
          double ddx = (std::min(std::abs(j - 16.0), 64.0 - std::abs(j - 16.0))) / 2.0;
          sm(i, j) += 0.3 * std::exp(-0.5 * (ddt * ddt + ddx * ddx));
        }
      WFEstimate ed = wf_estimate_2d(vd, 1.0, 1.0, p);
      WFEstimate emix = wf_estimate_2d(sm, 1.0, 1.0, p);
      rep.add(make_flag_check("smooth_plus_singular", "wf(delta + smooth) = wf(delta)",
                              emix.flags == ed.flags));
    }
  }
  return rep;
}

}  // namespace suites

// ---------------------------------------------------------------------------
using SuiteFn = std::function<Report(const SuiteContext&)>;

inline const std::vector<std::pair<std::string, SuiteFn>>& suite_registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> reg = {
      {"geometry", suites::geometry},
      {"green", suites::green},
      {"hadamard", suites::hadamard},
      {"kms", suites::kms},
      {"weyl", suites::weyl},
      {"star-assoc", suites::star_assoc},
      {"wick", suites::wick},
      {"peierls", suites::peierls},
      {"causality-net", suites::causality_net},
      {"timeslice", suites::timeslice},
      {"tord-axioms", suites::tord_axioms},
      {"bogoliubov", suites::bogoliubov_suite},
      {"rg-group", suites::rg_group},
      {"microlocal-calibration", suites::microlocal_calibration},
  };
  return reg;
}

inline std::vector<std::string> list_suites() {
  std::vector<std::string> names;
  for (const auto& [n, fn] : suite_registry()) names.push_back(n);
  return names;
}

inline Report run_suite(const std::string& name, const SuiteContext& ctx) {
  for (const auto& [n, fn] : suite_registry()) {
    if (n != name) continue;
    try {
      return fn(ctx);
    } catch (const std::exception& e) {
      Report rep;
      rep.suite = name;
      rep.add(make_flag_check("suite_error", "suite completed", false, e.what()));
      return rep;
    }
  }
  throw ConfigError("tasks.suite", "unknown suite '" + name + "'");
}

}  // namespace paqft
