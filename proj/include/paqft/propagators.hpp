#pragma once

#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "paqft/grid.hpp"
#include "paqft/parallel.hpp"
#include "paqft/report.hpp"
#include "paqft/spectral.hpp"

namespace paqft {

// All time kernels are built from the closed-form mode solutions of the
// three-term recurrence that realizes d^2/dt^2 on the grid. With
//   omega_bar    = sin(omega dt)/dt
//   omega_tilde2 = 4 sin^2(omega dt/2)/dt^2
// the kernel s(tau) = sin(omega tau) dt / sin(omega dt) satisfies the
// recurrence identically, so composition identities (P o Delta^{R/A} = id,
// the slab reconstruction, sigma degeneracy) hold to rounding error rather
// than to a finite difference order. omega_bar -> omega as dt -> 0.
inline double omega_bar(double omega, double dt) {
  double wdt = omega * dt;
  if (wdt < 1e-8) return omega;  // sin(w dt)/dt -> w
  return std::sin(wdt) / dt;
}

inline double omega_tilde2(double omega, double dt) {
  double s = std::sin(0.5 * omega * dt);
  return 4.0 * s * s / (dt * dt);
}

enum class KernelKind {
  Retarded,
  Advanced,
  PauliJordan,
  Wightman,
  Dirac,
  Feynman,
  HadamardH,
};

enum class StateKind { Vacuum, Kms };

struct TwoPointParams {
  StateKind state = StateKind::Vacuum;
  double beta = 0.0;  // inverse temperature, Kms only
};

inline std::string kernel_kind_name(KernelKind kind, const TwoPointParams& p) {
  switch (kind) {
    case KernelKind::Retarded: return "retarded";
    case KernelKind::Advanced: return "advanced";
    case KernelKind::PauliJordan: return "pauli_jordan";
    case KernelKind::Wightman:
      return p.state == StateKind::Vacuum ? "wightman_vacuum" : "wightman_kms";
    case KernelKind::Dirac: return "dirac";
    case KernelKind::Feynman: return "feynman";
    case KernelKind::HadamardH: return "hadamard_H";
  }
  return "?";
}

// Propagator stored mode-by-mode: one nt x nt time kernel per spatial mode.
// Position-space entries are synthesized on demand.
class PropagatorKernel {
 public:
  PropagatorKernel(SpectralPtr K, KernelKind kind, TwoPointParams params = {})
      : K_(std::move(K)), kind_(kind), params_(params) {
    const auto& g = K_->grid();
    K_->require_time_resolution();
    const bool needs_positive_gap = kind == KernelKind::Wightman ||
                                    kind == KernelKind::HadamardH ||
                                    kind == KernelKind::Feynman;
    if (needs_positive_gap && K_->has_zero_mode())
      throw DomainError("infrared obstruction: zero mode present (m = 0 with this lapse)");
    if (kind != KernelKind::Retarded && kind != KernelKind::Advanced &&
        kind != KernelKind::PauliJordan && kind != KernelKind::Dirac) {
      if (params_.state == StateKind::Kms && !(params_.beta > 0))
        throw DomainError("KMS state requires beta > 0");
    }
    const int nt = g.nt(), nm = K_->n_modes();
    mode_.resize(nm);
    parallel_for(nm, [&](int k) {
      mode_[k] = build_mode(k, nt, g.dt());
    });
  }

  // Kernel with explicit mode matrices (derived or perturbed kernels).
  PropagatorKernel(SpectralPtr K, KernelKind kind, TwoPointParams params,
                   std::vector<Eigen::MatrixXcd> custom_modes)
      : K_(std::move(K)), kind_(kind), params_(params), mode_(std::move(custom_modes)) {
    if (static_cast<int>(mode_.size()) != K_->n_modes())
      throw DomainError("custom kernel: one time kernel per spatial mode required");
  }

  KernelKind kind() const { return kind_; }
  const TwoPointParams& params() const { return params_; }
  std::string name() const { return kernel_kind_name(kind_, params_); }
  const SpectralOperator& op() const { return *K_; }
  SpectralPtr op_ptr() const { return K_; }
  const Eigen::MatrixXcd& mode(int k) const { return mode_[k]; }
  int n_modes() const { return static_cast<int>(mode_.size()); }

  // Kernel value in the volume-form pairing convention:
  // (Ker f)(x) = sum_y Ker(x,y) f(y) a(y)^2 dt dx.
  Complex entry(int i, int x, int j, int y) const {
    Complex s = 0;
    for (int k = 0; k < n_modes(); ++k)
      s += K_->mode_vector(k, x) * K_->mode_vector(k, y) * mode_[k](i, j);
    return s / K_->grid().dx();
  }

  GridFunction apply(const GridFunction& f) const {
    const auto& g = K_->grid();
    Eigen::MatrixXcd C = K_->to_modes_weighted(f);
    Eigen::MatrixXcd U(g.nt(), n_modes());
    for (int k = 0; k < n_modes(); ++k) U.col(k) = g.dt() * (mode_[k] * C.col(k));
    return K_->from_modes(U);
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = name();
    if (params_.state == StateKind::Kms) j["beta"] = params_.beta;
    j["nt"] = K_->grid().nt();
    auto modes = nlohmann::ordered_json::array();
    for (int k = 0; k < n_modes(); ++k) {
      nlohmann::ordered_json mj;
      mj["omega"] = K_->omega(k);
      auto coeffs = nlohmann::ordered_json::array();
      for (int i = 0; i < mode_[k].rows(); ++i)
        for (int jj = 0; jj < mode_[k].cols(); ++jj)
          coeffs.push_back({mode_[k](i, jj).real(), mode_[k](i, jj).imag()});
      mj["coeffs"] = coeffs;
      modes.push_back(mj);
    }
    j["modes"] = modes;
    return j;
  }

  void write_csv_dense(const std::string& path) const {
    const auto& g = K_->grid();
    std::size_t entries = static_cast<std::size_t>(g.nt()) * g.nx();
    entries *= entries;
    if (entries > 20'000'000)
      throw DomainError("dense CSV export too large for this grid; export JSON mode coefficients");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "ti,xj,si,yj,re,im\n";
    for (int i = 0; i < g.nt(); ++i)
      for (int x = 0; x < g.nx(); ++x)
        for (int j = 0; j < g.nt(); ++j)
          for (int y = 0; y < g.nx(); ++y) {
            Complex v = entry(i, x, j, y);
            out << i << ',' << x << ',' << j << ',' << y << ',' << v.real() << ',' << v.imag()
                << '\n';
          }
  }

 private:
  // s(tau) with the omega -> 0 ramp limit.
  static Complex osc(double omega, double dt, double tau) {
    double wdt = omega * dt;
    if (wdt < 1e-8) return tau;
    return std::sin(omega * tau) * dt / std::sin(wdt);
  }

  Eigen::MatrixXcd build_mode(int k, int nt, double dt) const {
    const double w = K_->omega(k);
    Eigen::MatrixXcd m(nt, nt);
    const double wbar = w * dt < 1e-8 ? 0.0 : std::sin(w * dt) / dt;
    const double nbar =
        params_.state == StateKind::Kms && w > 0
            ? std::exp(-params_.beta * w) / (1.0 - std::exp(-params_.beta * w))
            : 0.0;
    for (int i = 0; i < nt; ++i) {
      for (int j = 0; j < nt; ++j) {
        double tau = (i - j) * dt;
        Complex v = 0;
        switch (kind_) {
          case KernelKind::Retarded:
            v = i > j ? osc(w, dt, tau) : 0.0;
            break;
          case KernelKind::Advanced:
            v = j > i ? osc(w, dt, -tau) : 0.0;
            break;
          case KernelKind::PauliJordan:
            v = osc(w, dt, tau);
            break;
          case KernelKind::Wightman: {
            Complex e = std::exp(Complex(0, w * tau));
            v = (e * (nbar + 1.0) + std::conj(e) * nbar) / (2.0 * wbar);
            break;
          }
          case KernelKind::Dirac:
            v = 0.5 * osc(w, dt, std::abs(tau));
            break;
          case KernelKind::Feynman: {
            // theta-interleave of the Wightman kernel: H + i Delta^D
            double h = std::cos(w * tau) * (2.0 * nbar + 1.0) / (2.0 * wbar);
            v = Complex(h, 0.5 * osc(w, dt, std::abs(tau)).real());
            break;
          }
          case KernelKind::HadamardH:
            v = std::cos(w * tau) * (2.0 * nbar + 1.0) / (2.0 * wbar);
            break;
        }
        m(i, j) = v;
      }
    }
    return m;
  }

  SpectralPtr K_;
  KernelKind kind_;
  TwoPointParams params_;
  std::vector<Eigen::MatrixXcd> mode_;
};

using KernelPtr = std::shared_ptr<const PropagatorKernel>;

inline KernelPtr make_kernel(SpectralPtr K, KernelKind kind, TwoPointParams params = {}) {
  return std::make_shared<const PropagatorKernel>(std::move(K), kind, params);
}

// Spec-facing factory for the two-point kinds.
inline KernelPtr two_point(SpectralPtr K, KernelKind kind, TwoPointParams params = {}) {
  if (kind == KernelKind::Retarded || kind == KernelKind::Advanced)
    throw DomainError("two_point: use green_operator for retarded/advanced application");
  return make_kernel(std::move(K), kind, params);
}

// ---------------------------------------------------------------------------
// Discrete Klein-Gordon operator P = a^{-2} (D_tt + K_tilde), where D_tt is
// the centered second time difference and K_tilde shares K's eigenvectors
// with eigenvalues omega_tilde^2. Boundary rows (no stencil) are zero.
inline GridFunction klein_gordon_apply(const SpectralOperator& K, const GridFunction& f) {
  const auto& g = K.grid();
  const int nt = g.nt();
  Eigen::MatrixXcd U = K.to_modes(f);
  Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(nt, K.n_modes());
  const double idt2 = 1.0 / (g.dt() * g.dt());
  for (int k = 0; k < K.n_modes(); ++k) {
    double wt2 = omega_tilde2(K.omega(k), g.dt());
    for (int i = 1; i + 1 < nt; ++i)
      V(i, k) = (U(i + 1, k) - 2.0 * U(i, k) + U(i - 1, k)) * idt2 + wt2 * U(i, k);
  }
  GridFunction out = K.from_modes(V);
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < g.nx(); ++j) out(i, j) /= g.lapse(j) * g.lapse(j);
  return out;
}

// Relative size of P phi on the interior rows; 0 for discrete solutions.
inline double solution_residual(const SpectralOperator& K, const GridFunction& phi) {
  GridFunction r = klein_gordon_apply(K, phi);
  double ref = phi.norm_l2();
  return ref == 0 ? r.norm_l2() : r.norm_l2() / ref;
}

inline GridFunction green_operator(const SpectralPtr& K, KernelKind kind,
                                   const GridFunction& f) {
  if (kind != KernelKind::Retarded && kind != KernelKind::Advanced)
    throw DomainError("green_operator: kind must be retarded or advanced");
  const auto& g = K->grid();
  if (!f.clears_time_boundary(g.margin(), g.support_threshold()))
    throw DomainError("green_operator: source support touches the time window boundary");
  PropagatorKernel ker(K, kind);
  return ker.apply(f);
}

// Cheaper entry point when kernels are reused.
inline GridFunction green_apply(const PropagatorKernel& ker, const GridFunction& f) {
  const auto& g = ker.op().grid();
  if (!f.clears_time_boundary(g.margin(), g.support_threshold()))
    throw DomainError("green_operator: source support touches the time window boundary");
  return ker.apply(f);
}

// sigma(f,h) = int f (Delta h) dmu.
inline Complex sigma_bilinear(const PropagatorKernel& pj, const GridFunction& f,
                              const GridFunction& h) {
  if (pj.kind() != KernelKind::PauliJordan)
    throw DomainError("sigma_bilinear: kernel must be pauli_jordan");
  const auto& g = pj.op().grid();
  GridFunction dh = pj.apply(h);
  Complex s = 0;
  for (int i = 0; i < g.nt(); ++i)
    for (int j = 0; j < g.nx(); ++j) s += f(i, j) * dh(i, j) * g.weight(j);
  return s;
}

// ---------------------------------------------------------------------------
// Cauchy data at a constant-t slice. pi carries the slice volume weight dx,
// so sigma2 below is a plain spatial sum. The central time difference is the
// one conserved exactly by the discrete evolution (discrete Wronskian).
struct CauchyData {
  Eigen::VectorXcd phi;
  Eigen::VectorXcd pi;
};

inline CauchyData cauchy_data(const SpectralOperator& K, const GridFunction& phi, int slice,
                              double residual_tol = 1e-6) {
  const auto& g = K.grid();
  if (slice < 1 || slice + 1 >= g.nt())
    throw DomainError("cauchy_data: slice must be an interior time index");
  double res = solution_residual(K, phi);
  if (res > residual_tol)
    throw DomainError("cauchy_data: input is not a solution (residual " + std::to_string(res) +
                      ")");
  CauchyData d;
  d.phi.resize(g.nx());
  d.pi.resize(g.nx());
  for (int j = 0; j < g.nx(); ++j) {
    d.phi[j] = phi(slice, j);
    d.pi[j] = (phi(slice + 1, j) - phi(slice - 1, j)) / (2.0 * g.dt()) * g.dx();
  }
  return d;
}

// sigma2((phi1,pi1),(phi2,pi2)); oriented so that
// sigma(f,h) = sigma2(data(Delta f), data(Delta h)) on every interior slice.
inline Complex sigma2(const CauchyData& a, const CauchyData& b) {
  if (a.phi.size() != b.phi.size()) throw DomainError("sigma2: slice size mismatch");
  Complex s = 0;
  for (int j = 0; j < a.phi.size(); ++j) s += a.pi[j] * b.phi[j] - a.phi[j] * b.pi[j];
  return s;
}

// ---------------------------------------------------------------------------
// Constructive inverse of Delta: given a solution phi and a time slab,
// produce f = P(chi phi) supported in the slab with Delta f = phi.
inline GridFunction solution_from_slab(const SpectralOperator& K, const GridFunction& phi,
                                       int i1, int i2, double residual_tol = 1e-6) {
  const auto& g = K.grid();
  if (i2 - i1 < 4) throw DomainError("solution_from_slab: slab thinner than 4 time steps");
  if (i1 < g.margin() || i2 > g.nt() - 1 - g.margin())
    throw DomainError("solution_from_slab: slab must lie strictly inside the window");
  double res = solution_residual(K, phi);
  if (res > residual_tol)
    throw DomainError("solution_from_slab: input is not a solution (residual " +
                      std::to_string(res) + ")");
  GridFunction chiphi(g.nt(), g.nx());
  for (int i = 0; i < g.nt(); ++i) {
    double u = (static_cast<double>(i) - i1) / (i2 - i1);
    u = std::clamp(u, 0.0, 1.0);
    double chi = u * u * u * (u * (6.0 * u - 15.0) + 10.0);  // quintic step
    for (int j = 0; j < g.nx(); ++j) chiphi(i, j) = chi * phi(i, j);
  }
  return klein_gordon_apply(K, chiphi);
}

// ---------------------------------------------------------------------------
// Imaginary-time periodicity of the thermal kernel, verified per mode from
// the closed form: w(tau + i beta) = w(-tau).
inline Report kms_identity_check(const PropagatorKernel& ker,
                                 const std::vector<double>& taus = {0.3}) {
  if (ker.kind() != KernelKind::Wightman || ker.params().state != StateKind::Kms)
    throw DomainError("kms_identity_check: not a KMS kernel");
  const double beta = ker.params().beta;
  Report rep;
  rep.suite = "kms-identity";
  double worst = 0;
  for (int k = 0; k < ker.n_modes(); ++k) {
    double w = ker.op().omega(k);
    double wbar = std::sin(w * ker.op().grid().dt()) / ker.op().grid().dt();
    double nbar = std::exp(-beta * w) / (1.0 - std::exp(-beta * w));
    for (double tau : taus) {
      Complex lhs;
      if (beta * w < 500) {
        // direct analytic continuation of the two-term mode formula
        Complex e1 = std::exp(Complex(0, w) * Complex(tau, beta));
        Complex e2 = std::exp(Complex(0, -w) * Complex(tau, beta));
        lhs = (e1 * (nbar + 1.0) + e2 * nbar) / (2.0 * wbar);
      } else {
        lhs = (std::exp(Complex(0, w * tau)) * nbar +
               std::exp(Complex(0, -w * tau)) / (1.0 - std::exp(-beta * w))) /
              (2.0 * wbar);
      }
      Complex rhs = (std::exp(Complex(0, -w * tau)) * (nbar + 1.0) +
                     std::exp(Complex(0, w * tau)) * nbar) /
                    (2.0 * wbar);
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
  }
  rep.add(make_check("kms_identity", "w(tau + i beta) = w(-tau) per mode", worst, 1e-12));
  return rep;
}

}  // namespace paqft
