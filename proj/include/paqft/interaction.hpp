#pragma once

#include <functional>
#include <map>
#include <vector>

#include "paqft/contraction.hpp"
#include "paqft/quantization.hpp"

namespace paqft {

// ---------------------------------------------------------------------------
// Classical side.

struct LagrangianSpec {
  enum class Kind { Free, Phi4 };
  Kind kind = Kind::Free;
  double coupling = 0.0;     // quartic coupling
  GridFunction window;       // cutoff of the interaction density, phi4 only
};

// Equation-of-motion density: P phi (free) or P phi + (lambda/3!) w phi^3.
// The cubic term carries the interaction window.
inline GridFunction euler_lagrange(const SpectralOperator& K, const LagrangianSpec& spec,
                                   const GridFunction& phi) {
  GridFunction out = klein_gordon_apply(K, phi);
  if (spec.kind == LagrangianSpec::Kind::Phi4 && spec.coupling != 0.0) {
    const auto& g = K.grid();
    for (int i = 1; i + 1 < g.nt(); ++i)
      for (int j = 0; j < g.nx(); ++j)
        out(i, j) += spec.coupling / 6.0 * spec.window(i, j) * phi(i, j) * phi(i, j) * phi(i, j);
  }
  return out;
}

// Windowed action value generating the discrete equation of motion; used by
// the finite-difference oracle for the Euler-Lagrange derivative.
inline Complex action_window(const SpectralOperator& K, const LagrangianSpec& spec,
                             const GridFunction& phi) {
  const auto& g = K.grid();
  GridFunction Pphi = klein_gordon_apply(K, phi);
  Complex s = 0;
  const GridFunction* w = spec.kind == LagrangianSpec::Kind::Phi4 ? &spec.window : nullptr;
  for (int i = 0; i < g.nt(); ++i)
    for (int j = 0; j < g.nx(); ++j) {
      Complex wv = w ? (*w)(i, j) : 1.0;
      double a2 = g.lapse(j) * g.lapse(j);
      s += 0.5 * wv * phi(i, j) * (a2 * Pphi(i, j)) * g.dt() * g.dx();
      if (w && spec.coupling != 0.0) {
        Complex p2 = phi(i, j) * phi(i, j);
        s += spec.coupling / 24.0 * wv * p2 * p2 * g.weight(j);
      }
    }
  return s;
}

// Retarded/advanced/causal propagators of the linearized operator
// P + (lambda/2) w phi^2 around a background, built by marching the time
// recurrence column by column. The lambda = 0 case reproduces the free
// kernels exactly (same recurrence, same data).
class LinearizedPropagator {
 public:
  LinearizedPropagator(SpectralPtr K, const LagrangianSpec& spec, GridFunction background)
      : K_(std::move(K)), background_(std::move(background)) {
    const auto& g = K_->grid();
    const int nt = g.nt(), nx = g.nx(), n = nt * nx;
    K_->require_time_resolution();

    // per-slice diagonal potential (lambda/2) a^2 w phi^2
    pot_ = Eigen::ArrayXXd::Zero(nt, nx);
    if (spec.kind == LagrangianSpec::Kind::Phi4 && spec.coupling != 0.0) {
      for (int i = 0; i < nt; ++i)
        for (int j = 0; j < nx; ++j) {
          double a2 = g.lapse(j) * g.lapse(j);
          double w = std::real(spec.window(i, j));
          double p = std::abs(background_(i, j));
          pot_(i, j) = 0.5 * spec.coupling * a2 * w * p * p;
        }
    }

    // K_tilde in position space: eigenvectors of K, eigenvalues omega_tilde^2
    Eigen::VectorXd wt2(K_->n_modes());
    for (int k = 0; k < K_->n_modes(); ++k) wt2[k] = omega_tilde2(K_->omega(k), g.dt());
    Ktilde_ = K_->eigenvectors() * wt2.asDiagonal() * K_->eigenvectors().transpose();

    double lam_max = pot_.maxCoeff();
    double disc_max = wt2.maxCoeff() + lam_max;
    substeps_ = 1;
    while (disc_max * (g.dt() / substeps_) * (g.dt() / substeps_) > 3.96) substeps_ *= 2;

    R_ = Eigen::MatrixXcd::Zero(n, n);
    A_ = Eigen::MatrixXcd::Zero(n, n);
    parallel_for(n, [&](int col) {
      int s = col / nx, y = col % nx;
      march(col, s, y, /*forward=*/true);
      march(col, s, y, /*forward=*/false);
    });
  }

  const SpectralOperator& op() const { return *K_; }
  int substeps() const { return substeps_; }
  const Eigen::MatrixXcd& retarded() const { return R_; }
  const Eigen::MatrixXcd& advanced() const { return A_; }
  Eigen::MatrixXcd causal() const { return R_ - A_; }

  Complex retarded_entry(int i, int x, int j, int y) const {
    const int nx = K_->grid().nx();
    return R_(i * nx + x, j * nx + y);
  }

  // Residual of the linearized equation applied (in the first argument) to
  // the causal kernel; zero off the source rows by construction, and the
  // causal combination cancels the sources as well.
  double bisolution_residual() const {
    const auto& g = K_->grid();
    const int nt = g.nt(), nx = g.nx();
    Eigen::MatrixXcd D = causal();
    double worst = 0, scale = std::max(1.0, D.cwiseAbs().maxCoeff());
    for (int col = 0; col < D.cols(); ++col) {
      for (int i = 1; i + 1 < nt; ++i) {
        for (int x = 0; x < nx; ++x) {
          Complex d2 = (D((i + 1) * nx + x, col) - 2.0 * D(i * nx + x, col) +
                        D((i - 1) * nx + x, col)) /
                       (g.dt() * g.dt());
          Complex kx = 0;
          for (int xx = 0; xx < nx; ++xx) kx += Ktilde_(x, xx) * D(i * nx + xx, col);
          Complex r = d2 + kx + pot_(i, x) * D(i * nx + x, col);
          worst = std::max(worst, std::abs(r));
        }
      }
    }
    return worst / scale;
  }

 private:
  // March the recurrence for a unit density source at (s,y). With substeps
  // the potential is frozen per outer slice; the free part stays exact for
  // substeps == 1 (same recurrence as the closed-form kernels).
  void march(int col, int s, int y, bool forward) {
    const auto& g = K_->grid();
    const int nt = g.nt(), nx = g.nx();
    Eigen::MatrixXcd& M = forward ? R_ : A_;
    const double h = g.dt() / substeps_;
    const int dir = forward ? 1 : -1;
    Eigen::VectorXcd prev = Eigen::VectorXcd::Zero(nx);
    Eigen::VectorXcd cur = Eigen::VectorXcd::Zero(nx);
    bool kicked = false;
    const double growth_limit = 1e6 * std::max(1.0, g.dt() / g.dx());
    for (int i = s;; i += dir) {
      int next = i + dir;
      if (next < 0 || next >= nt) break;
      for (int sub = 0; sub < substeps_; ++sub) {
        Eigen::VectorXcd acc = -(Ktilde_ * cur);
        for (int x = 0; x < nx; ++x) acc[x] -= pot_(i, x) * cur[x];
        Eigen::VectorXcd nxt = 2.0 * cur - prev + h * h * acc;
        if (!kicked) {
          nxt[y] += h / g.dx();  // unit density: impulse dt over the outer step
          kicked = true;
        }
        prev = cur;
        cur = nxt;
      }
      if (cur.cwiseAbs().maxCoeff() > growth_limit)
        throw DomainError("linearized_propagator: instability detected; reduce dt");
      for (int x = 0; x < nx; ++x) M(next * nx + x, col) = cur[x];
    }
  }

  SpectralPtr K_;
  GridFunction background_;
  Eigen::ArrayXXd pot_;
  Eigen::MatrixXd Ktilde_;
  Eigen::MatrixXcd R_, A_;
  int substeps_ = 1;
};

inline LinearizedPropagator linearized_propagator(SpectralPtr K, const LagrangianSpec& spec,
                                                  const GridFunction& background) {
  return LinearizedPropagator(std::move(K), spec, background);
}

// ---------------------------------------------------------------------------
// Time-ordered product: same contraction template with the Dirac kernel
// (per-pair weight i Delta^D, pairing with star) or the Feynman kernel
// (per-pair weight W_F, pairing with star_H).

inline Complex tord_pair_weight(const PropagatorKernel& D) {
  if (D.kind() == KernelKind::Dirac) return Complex(0, 1);
  if (D.kind() == KernelKind::Feynman) return Complex(1, 0);
  throw DomainError("tord: kernel must be dirac or feynman");
}

inline FormalSeries tord(const FormalSeries& F, const FormalSeries& G, KernelPtr D) {
  Complex w = tord_pair_weight(*D);
  PairingEngine eng(std::move(D));
  return kernel_product(F, G, eng, w);
}

// Unary ordering map T = exp((hbar/2) Gamma) with the same per-pair weight;
// inverse flips the sign.
inline FormalSeries tord_unary(const FormalSeries& F, KernelPtr D, bool inverse = false) {
  Complex w = tord_pair_weight(*D);
  if (inverse) w = -w;
  PairingEngine eng(std::move(D));
  return gamma_exp(F, eng, w);
}

inline Report ordering_check(const RegularFunctional& F, const RegularFunctional& G, KernelPtr pj,
                             KernelPtr D, const std::vector<GridFunction>& probes,
                             TruncationOrders orders, double tol = 1e-10) {
  Region sf = F.support();
  Region sg = G.support();
  if (sf.empty() || sg.empty()) throw DomainError("ordering_check: empty support");
  bool f_later = sg.max_time() <= sf.min_time();
  bool g_later = sf.max_time() <= sg.min_time();
  if (!f_later && !g_later)
    throw DomainError("ordering_check: supports are not separated by a constant-t surface");
  FormalSeries sF = FormalSeries::lift(F, orders), sG = FormalSeries::lift(G, orders);
  FormalSeries lhs = tord(sF, sG, D);
  FormalSeries rhs = f_later ? star(sF, sG, pj) : star(sG, sF, pj);
  Report rep;
  rep.suite = "ordering";
  rep.add(make_check("causal_ordering",
                     f_later ? "F .T G = F * G (F later)" : "F .T G = G * F (G later)",
                     series_distance(lhs, rhs, probes), tol));
  return rep;
}

inline FormalSeries regrade(const FormalSeries& S, TruncationOrders orders, int dq = 0) {
  FormalSeries out(S.grid_ptr(), orders, S.degree_bound());
  if (S.truncation_hit()) out.note_truncation();
  for (const auto& [pq, F] : S.coefficients()) out.accumulate(pq.first, pq.second + dq, F);
  return out;
}

inline FormalSeries shift_hbar(const FormalSeries& S, int dq) {
  return regrade(S, S.orders(), dq);
}

// S(V) = sum_n (i/hbar)^n / n! V^{.T n}; every vertex lowers the hbar floor
// by one, consistent with the q >= -p series invariant. The n-fold powers
// are accumulated in a window widened by lambda_max so that coefficients
// whose grade only drops below hbar_max after the 1/hbar^n shift survive.
inline FormalSeries smatrix(const FormalSeries& V, KernelPtr D) {
  for (const auto& [pq, F] : V.coefficients())
    if (pq.first < 1) throw DomainError("smatrix: interaction must carry the coupling grade");
  TruncationOrders target = V.orders();
  TruncationOrders wide{target.lambda_max, target.hbar_max + target.lambda_max};
  FormalSeries S = FormalSeries::unit(V.grid_ptr(), target, V.degree_bound());
  FormalSeries Vw = regrade(V, wide);
  FormalSeries Vpow = FormalSeries::unit(V.grid_ptr(), wide, V.degree_bound());
  double fact = 1.0;
  Complex in = 1.0;
  for (int n = 1; n <= target.lambda_max; ++n) {
    Vpow = tord(Vpow, Vw, D);
    fact *= n;
    in *= Complex(0, 1);
    FormalSeries term = regrade(Vpow, target, -n);
    term *= in / fact;
    S += term;
  }
  S.compress();
  return S;
}

// Neumann inverse in the coupling grading: S = c 1 + N with N of coupling
// order >= 1.
inline FormalSeries star_inverse(const FormalSeries& S, KernelPtr pj) {
  const RegularFunctional* lead = S.get(0, 0);
  Complex c = 0;
  if (lead) {
    if (lead->degree() > 0)
      throw DomainError("star_inverse: leading coefficient is not a scalar multiple of 1");
    GridFunction zero(S.grid_ptr()->nt(), S.grid_ptr()->nx());
    c = lead->evaluate(zero);
  }
  for (const auto& [pq, F] : S.coefficients())
    if (pq.first == 0 && pq.second != 0 && !F.is_zero())
      throw DomainError("star_inverse: non-scalar coupling-order-zero part");
  if (std::abs(c) < 1e-14)
    throw DomainError("star_inverse: leading coefficient is not invertible");
  FormalSeries N = S;
  N.accumulate(0, 0, RegularFunctional::constant(S.grid_ptr(), -c, S.degree_bound()));
  N.compress();
  FormalSeries inv = FormalSeries::scalar(S.grid_ptr(), 1.0 / c, S.orders(), S.degree_bound());
  FormalSeries pow = FormalSeries::unit(S.grid_ptr(), S.orders(), S.degree_bound());
  Complex sign = 1.0;
  for (int m = 1; m <= S.orders().lambda_max; ++m) {
    pow = star(pow, N, pj);
    pow *= 1.0 / c;
    sign = -sign;
    FormalSeries term = pow;
    term *= sign / c;
    inv += term;
  }
  inv.compress();
  return inv;
}

// R_V(F) = S(V)^{*-1} * (S(V) .T  T F); R_0(F) = T F.
inline FormalSeries bogoliubov(const FormalSeries& V, const RegularFunctional& F, KernelPtr pj,
                               KernelPtr D) {
  FormalSeries S = smatrix(V, D);
  FormalSeries TF = tord_unary(FormalSeries::lift(F, V.orders()), D);
  FormalSeries right = tord(S, TF, D);
  FormalSeries R = star(star_inverse(S, pj), right, pj);
  R.compress();
  return R;
}

// n-ary time-ordered product T_n(F_1,..,F_n) = (T F_1) .T ... .T (T F_n);
// the empty product is the unit.
inline FormalSeries tord_n(const std::vector<RegularFunctional>& fs, KernelPtr D,
                           TruncationOrders orders) {
  if (fs.empty()) return FormalSeries::unit(D->op().grid_ptr(), orders);
  FormalSeries acc = tord_unary(FormalSeries::lift(fs[0], orders), D);
  for (std::size_t i = 1; i < fs.size(); ++i)
    acc = tord(acc, tord_unary(FormalSeries::lift(fs[i], orders), D), D);
  return acc;
}

// ---------------------------------------------------------------------------
// Finite renormalizations Z acting on local polynomial observables
// sum_n int f_n phi^n dmu.

struct LocalPolynomial {
  GridPtr grid;
  std::map<int, GridFunction> windows;  // degree -> window density

  bool empty() const {
    for (const auto& [n, w] : windows)
      if (w.max_abs() > 0) return false;
    return true;
  }
  RegularFunctional realize(int degree_bound = 8) const {
    RegularFunctional F(grid, degree_bound);
    for (const auto& [n, w] : windows) F += make_monomial(grid, n, w, degree_bound);
    return F;
  }
  LocalPolynomial scaled(double c) const {
    LocalPolynomial out{grid, {}};
    for (const auto& [n, w] : windows) {
      GridFunction s = w;
      s *= Complex(c);
      out.windows[n] = std::move(s);
    }
    return out;
  }
  LocalPolynomial plus(const LocalPolynomial& o) const {
    LocalPolynomial out = *this;
    for (const auto& [n, w] : o.windows) {
      auto it = out.windows.find(n);
      if (it == out.windows.end())
        out.windows[n] = w;
      else
        it->second += w;
    }
    return out;
  }
};

// Z(F) = F + hbar-graded local counterterms. Pieces:
//  - quadratic fuse: coefficient c2, window pairs fused pointwise,
//    degree (n,m) -> n+m-2; quadratic in F, additive over disjoint supports
//  - linear trace: coefficient c1, adds the window integral as a constant
//  - phi_dependent (negative control): a shift that reads the ambient
//    configuration, violating the configuration-independence property
struct RenormalizationMap {
  double c_quadratic = 0.0;
  double c_linear_trace = 0.0;
  double c_phi_shift = 0.0;

  // returns hbar-power -> polynomial
  std::map<int, LocalPolynomial> apply(const LocalPolynomial& F,
                                       const GridFunction& ambient) const {
    std::map<int, LocalPolynomial> out;
    out[0] = F;
    if (c_quadratic != 0.0) {
      LocalPolynomial q{F.grid, {}};
      for (const auto& [n, wn] : F.windows)
        for (const auto& [m, wm] : F.windows) {
          if (n + m < 2) continue;
          GridFunction fused(F.grid->nt(), F.grid->nx());
          fused.values() = c_quadratic * wn.values() * wm.values();
          auto it = q.windows.find(n + m - 2);
          if (it == q.windows.end())
            q.windows[n + m - 2] = std::move(fused);
          else
            it->second += fused;
        }
      out[1] = out.count(1) ? out[1].plus(q) : q;
    }
    if (c_linear_trace != 0.0) {
      LocalPolynomial t{F.grid, {}};
      GridFunction tot(F.grid->nt(), F.grid->nx());
      for (const auto& [n, wn] : F.windows) tot += wn;
      tot *= Complex(c_linear_trace);
      t.windows[0] = std::move(tot);
      out[1] = out.count(1) ? out[1].plus(t) : t;
    }
    if (c_phi_shift != 0.0) {
      LocalPolynomial v{F.grid, {}};
      for (const auto& [n, wn] : F.windows) {
        GridFunction sh(F.grid->nt(), F.grid->nx());
        sh.values() = c_phi_shift * wn.values() * ambient.values();
        auto it = v.windows.find(n);
        if (it == v.windows.end())
          v.windows[n] = std::move(sh);
        else
          it->second += sh;
      }
      out[1] = out.count(1) ? out[1].plus(v) : v;
    }
    return out;
  }
};

}  // namespace paqft
