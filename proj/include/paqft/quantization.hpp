#pragma once

#include <random>
#include <vector>

#include "paqft/contraction.hpp"
#include "paqft/functionals.hpp"
#include "paqft/propagators.hpp"
#include "paqft/report.hpp"
#include "paqft/series.hpp"

namespace paqft {

// Mode-wise deviation of 2 Im W from the commutator function; < tol means W
// is an admissible two-point function for the normal-ordered product.
inline double hadamard_defect(const PropagatorKernel& W) {
  PropagatorKernel pj(W.op_ptr(), KernelKind::PauliJordan);
  double worst = 0;
  for (int k = 0; k < W.n_modes(); ++k) {
    Eigen::MatrixXcd d = 2.0 * W.mode(k).imag().cast<Complex>() - pj.mode(k);
    double scale = std::max(1.0, pj.mode(k).cwiseAbs().maxCoeff());
    worst = std::max(worst, d.cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

// H = W - (i/2) Delta; real and symmetric for admissible W.
inline KernelPtr derive_h_kernel(const PropagatorKernel& W) {
  PropagatorKernel pj(W.op_ptr(), KernelKind::PauliJordan);
  std::vector<Eigen::MatrixXcd> modes(W.n_modes());
  for (int k = 0; k < W.n_modes(); ++k)
    modes[k] = W.mode(k) - Complex(0, 0.5) * pj.mode(k);
  return std::make_shared<const PropagatorKernel>(W.op_ptr(), KernelKind::HadamardH,
                                                  W.params(), std::move(modes));
}

inline double h_symmetry_defect(const PropagatorKernel& H) {
  double worst = 0;
  for (int k = 0; k < H.n_modes(); ++k) {
    const auto& m = H.mode(k);
    double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    worst = std::max(worst, (m - m.transpose()).cwiseAbs().maxCoeff() / scale);
    worst = std::max(worst, m.imag().cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Products. All are the same contraction template with different kernels:
//   star    : per-pair weight (i/2) Delta
//   star_H  : per-pair weight W
// The hbar grade rises by one per contracted pair.

inline FormalSeries star(const FormalSeries& F, const FormalSeries& G, KernelPtr pj) {
  if (pj->kind() != KernelKind::PauliJordan)
    throw DomainError("star: kernel must be pauli_jordan");
  PairingEngine eng(std::move(pj));
  return kernel_product(F, G, eng, Complex(0, 0.5));
}

inline FormalSeries star(const RegularFunctional& F, const RegularFunctional& G, KernelPtr pj,
                         TruncationOrders orders) {
  return star(FormalSeries::lift(F, orders), FormalSeries::lift(G, orders), std::move(pj));
}

inline FormalSeries star_h(const FormalSeries& F, const FormalSeries& G, KernelPtr W,
                           double compat_tol = 1e-8) {
  double defect = hadamard_defect(*W);
  if (defect > compat_tol)
    throw DomainError("star_h: kernel fails 2 Im W = Delta by " + std::to_string(defect));
  PairingEngine eng(std::move(W));
  return kernel_product(F, G, eng, 1.0);
}

// alpha_H = exp(+(hbar/2) Gamma_H); inverse flips the per-pair sign.
inline FormalSeries alpha_h(const FormalSeries& F, KernelPtr H, bool inverse = false,
                            double sym_tol = 1e-8) {
  double defect = h_symmetry_defect(*H);
  if (defect > sym_tol)
    throw DomainError("alpha_h: H is not real symmetric (defect " + std::to_string(defect) +
                      ")");
  PairingEngine eng(std::move(H));
  return gamma_exp(F, eng, inverse ? Complex(-1.0) : Complex(1.0));
}

inline FormalSeries alpha_h(const RegularFunctional& F, KernelPtr H, TruncationOrders orders,
                            bool inverse = false) {
  return alpha_h(FormalSeries::lift(F, orders), std::move(H), inverse);
}

// F star_H G = alpha_H((alpha_H^{-1} F) star (alpha_H^{-1} G)), checked on
// probe configurations coefficient by coefficient.
inline Report star_equivalence_check(const FormalSeries& F, const FormalSeries& G, KernelPtr pj,
                                     KernelPtr W, const std::vector<GridFunction>& probes,
                                     double tol = 1e-10) {
  Report rep;
  rep.suite = "star-equivalence";
  double compat = hadamard_defect(*W);
  rep.add(make_check("hadamard_compat", "2 Im W = Delta", compat, 1e-8));
  if (compat > 1e-8) return rep;
  KernelPtr H = derive_h_kernel(*W);
  double sym = h_symmetry_defect(*H);
  rep.add(make_check("h_symmetric", "H real symmetric", sym, 1e-8));
  if (sym > 1e-8) return rep;
  FormalSeries lhs = star_h(F, G, W);
  FormalSeries rhs = alpha_h(star(alpha_h(F, H, true), alpha_h(G, H, true), pj), H, false);
  rep.add(make_check("hprod", "F *_H G = a_H((a_H^-1 F) * (a_H^-1 G))",
                     series_distance(lhs, rhs, probes), tol));
  return rep;
}

// Peierls bracket <Delta F'(phi), G'(phi)>, oriented so that
// {F_f, F_h} = sigma(f,h).
inline Complex peierls(const RegularFunctional& F, const RegularFunctional& G, KernelPtr pj,
                       const GridFunction& phi) {
  if (pj->kind() != KernelKind::PauliJordan)
    throw DomainError("peierls: kernel must be pauli_jordan");
  GridFunction dF = F.gradient(phi);
  GridFunction dG = G.gradient(phi);
  GridFunction DdG = pj->apply(dG);
  const auto& g = pj->op().grid();
  Complex s = 0;
  for (int i = 0; i < g.nt(); ++i)
    for (int j = 0; j < g.nx(); ++j) s += dF(i, j) * DdG(i, j) * g.weight(j);
  return s;
}

// hbar^0 part of [F,G]_star / (i hbar) against the Peierls bracket.
inline Report classical_limit_check(const RegularFunctional& F, const RegularFunctional& G,
                                    KernelPtr pj, const std::vector<GridFunction>& probes,
                                    double tol = 1e-12) {
  Report rep;
  rep.suite = "classical-limit";
  TruncationOrders orders{0, 2};
  FormalSeries comm = star(F, G, pj, orders) - star(G, F, pj, orders);
  double worst = 0;
  for (const auto& phi : probes) {
    Complex lhs = 0;
    if (const RegularFunctional* c1 = comm.get(0, 1)) lhs = c1->evaluate(phi) / Complex(0, 1);
    Complex rhs = peierls(F, G, pj, phi);
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
  }
  rep.add(make_check("classical_limit", "[F,G]_star/(i hbar) -> {F,G} at hbar^0", worst, tol));
  return rep;
}

// ---------------------------------------------------------------------------
// Weyl family: W(f) = exp(i F_f), closed under star. The phase is kept as an
// exact function of hbar: stored accumulated sigma plus any explicit factor.
struct WeylElement {
  GridFunction f;
  Complex extra_phase = 1.0;   // explicit unit-modulus factor
  Complex sigma_accum = 0.0;   // accumulated sigma; phase(hbar) = e^{-i hbar sigma/2}

  Complex phase(double hbar = 1.0) const {
    return extra_phase * std::exp(Complex(0, -0.5 * hbar) * sigma_accum);
  }
};

inline WeylElement weyl(const GridFunction& f) { return WeylElement{f, 1.0, 0.0}; }

inline WeylElement weyl_star(const WeylElement& a, const WeylElement& b, KernelPtr pj) {
  Complex s = sigma_bilinear(*pj, a.f, b.f);
  WeylElement out;
  out.f = a.f + b.f;
  out.extra_phase = a.extra_phase * b.extra_phase;
  out.sigma_accum = a.sigma_accum + b.sigma_accum + s;
  return out;
}

// ---------------------------------------------------------------------------
// Net checks.

// Commutators of functionals with spacelike-separated supports must vanish.
inline Report net_causality_check(
    KernelPtr pj, const Region& r1, const Region& r2,
    const std::function<RegularFunctional(std::mt19937_64&, const Region&)>& builder,
    std::mt19937_64& rng, const std::vector<GridFunction>& probes, int trials = 4,
    double tol = 1e-10) {
  const auto& g = pj->op().grid();
  if (r1.empty() || r2.empty() || r1.intersects(r2) || !spacelike_separated(g, r1, r2))
    throw DomainError("net_causality_check: regions must be nonempty, disjoint and spacelike");
  Report rep;
  rep.suite = "net-causality";
  TruncationOrders orders{0, 4};
  double worst = 0;
  for (int t = 0; t < trials; ++t) {
    RegularFunctional F = builder(rng, r1);
    RegularFunctional G = builder(rng, r2);
    FormalSeries comm = star(F, G, pj, orders) - star(G, F, pj, orders);
    for (const auto& phi : probes)
      for (const auto& [pq, v] : comm.evaluate(phi)) worst = std::max(worst, std::abs(v));
  }
  rep.add(make_check("einstein_causality", "[A,B]_star = 0 for spacelike-separated supports",
                     worst, tol));
  return rep;
}

// Time-slice property: any W(f) agrees, modulo the field-equation ideal, with
// a W(f') whose f' is supported in the slab. Ideal membership is probed by
// sigma pairings (sigma(P h, .) = 0 characterizes the ideal for linear
// generators).
inline Report timeslice_check(SpectralPtr K, KernelPtr pj, const GridFunction& f, int i1, int i2,
                              const std::vector<GridFunction>& pair_probes, double tol = 1e-8) {
  Report rep;
  rep.suite = "timeslice";
  GridFunction phi = pj->apply(f);
  GridFunction fprime = solution_from_slab(*K, phi, i1, i2);
  GridFunction phiprime = pj->apply(fprime);
  double resid = rel_l2_error(phiprime, phi);
  rep.add(make_check("slab_reconstruction", "Delta f' = Delta f with supp f' in the slab",
                     resid, 1e-6));
  Region slab(K->grid().nt(), K->grid().nx());
  for (int i = std::max(0, i1 - 1); i <= std::min(K->grid().nt() - 1, i2 + 1); ++i)
    for (int j = 0; j < K->grid().nx(); ++j) slab.insert(i, j);
  rep.add(make_flag_check("slab_support", "supp f' inside the slab",
                          fprime.support(K->grid()).subset_of(slab)));
  double worst = 0;
  for (const auto& gp : pair_probes) {
    Complex s1 = sigma_bilinear(*pj, f, gp);
    Complex s2 = sigma_bilinear(*pj, fprime, gp);
    worst = std::max(worst, std::abs(s1 - s2) / std::max(1.0, std::abs(s1)));
  }
  rep.add(make_check("sigma_pairings", "sigma(f,g) = sigma(f',g) for all g", worst, tol));
  return rep;
}

// State probe omega_{H,phi}(F) = (alpha_H F)(phi) at hbar = 1; positive on
// squares.
inline Complex state_eval(const FormalSeries& F, KernelPtr H, const GridFunction& phi) {
  return alpha_h(F, std::move(H)).evaluate_total(phi);
}

}  // namespace paqft
