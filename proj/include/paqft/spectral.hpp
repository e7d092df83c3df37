#pragma once

#include <memory>

#include <Eigen/Dense>

#include "paqft/grid.hpp"
#include "paqft/report.hpp"

namespace paqft {

// Spatial operator K = -d^2/dx^2 + m^2 a(x)^2 on the periodic slice.
// The second derivative is the Fourier (spectral) one: exact multiplication
// by k_n^2 = (2 pi n / L)^2 on the retained modes, assembled as a dense
// symmetric circulant and then diagonalized together with the mass term.
//
// Eigenvectors are orthonormal in the plain l2 inner product on the slice;
// the a^2 volume weight enters only through the quadrature of functionals.
class SpectralOperator {
 public:
  explicit SpectralOperator(GridPtr grid) : grid_(std::move(grid)) {
    const auto& g = *grid_;
    const int n = g.nx();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
    // D_{jl} = (1/n) sum_m k_m^2 cos(k_m (x_j - x_l)); k^2 even in m, so real.
    std::vector<double> k2(n);
    for (int m = 0; m < n; ++m) {
      int f = m <= n / 2 ? m : m - n;  // frequencies 0,1,..,n/2,..,-1
      double k = 2.0 * M_PI * f / g.L();
      k2[m] = k * k;
    }
    for (int j = 0; j < n; ++j) {
      for (int l = j; l < n; ++l) {
        double s = 0;
        for (int m = 0; m < n; ++m) s += k2[m] * std::cos(2.0 * M_PI * m * (j - l) / n);
        s /= n;
        K(j, l) = s;
        K(l, j) = s;
      }
      K(j, j) += g.mass() * g.mass() * g.lapse(j) * g.lapse(j);
    }
    K_ = K;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(K);
    if (solver.info() != Eigen::Success)
      throw DomainError("assemble_K: eigensolver failed to converge (ill-conditioned lapse?)");
    eigval_ = solver.eigenvalues();
    eigvec_ = solver.eigenvectors();
    omega_.resize(n);
    for (int k = 0; k < n; ++k) omega_[k] = std::sqrt(std::max(0.0, eigval_[k]));
  }

  const SpacetimeGrid& grid() const { return *grid_; }
  GridPtr grid_ptr() const { return grid_; }
  int n_modes() const { return static_cast<int>(eigval_.size()); }
  const Eigen::MatrixXd& matrix() const { return K_; }
  const Eigen::VectorXd& eigenvalues() const { return eigval_; }
  const Eigen::MatrixXd& eigenvectors() const { return eigvec_; }
  double omega(int k) const { return omega_[k]; }
  double omega_max() const { return omega_[n_modes() - 1]; }
  double mode_vector(int k, int j) const { return eigvec_(j, k); }

  bool has_zero_mode(double tol = 1e-9) const { return omega_[0] < tol; }

  // Every mode must be temporally resolved before propagator kernels exist:
  // the closed-form time kernels divide by sin(omega dt).
  void require_time_resolution() const {
    double wdt = omega_max() * grid_->dt();
    if (!(wdt < M_PI))
      throw DomainError(
          "time step does not resolve the top spatial mode (omega_max*dt = " +
          std::to_string(wdt) + " >= pi); refine the time grid");
  }

  // Plain-mode analysis of the a^2-weighted field: C(i,k) = sum_j e_k(j) a(j)^2 f(i,j).
  Eigen::MatrixXcd to_modes_weighted(const GridFunction& f) const {
    const auto& g = *grid_;
    Eigen::MatrixXcd w(f.nt(), g.nx());
    for (int i = 0; i < f.nt(); ++i)
      for (int j = 0; j < g.nx(); ++j) w(i, j) = f(i, j) * g.lapse(j) * g.lapse(j);
    return w.matrix() * eigvec_;
  }

  // Plain-mode analysis without the volume weight.
  Eigen::MatrixXcd to_modes(const GridFunction& f) const {
    return f.values().matrix() * eigvec_;
  }

  GridFunction from_modes(const Eigen::MatrixXcd& U) const {
    GridFunction out(static_cast<int>(U.rows()), grid_->nx());
    out.values() = (U * eigvec_.transpose()).array();
    return out;
  }

  // Diagnostics used by the unit tests.
  double orthonormality_defect() const {
    Eigen::MatrixXd I = eigvec_.transpose() * eigvec_;
    I -= Eigen::MatrixXd::Identity(n_modes(), n_modes());
    return I.cwiseAbs().maxCoeff();
  }
  double reconstruction_defect() const {
    Eigen::MatrixXd R = eigvec_ * eigval_.asDiagonal() * eigvec_.transpose() - K_;
    return R.cwiseAbs().maxCoeff();
  }

 private:
  GridPtr grid_;
  Eigen::MatrixXd K_;
  Eigen::VectorXd eigval_;
  Eigen::MatrixXd eigvec_;
  std::vector<double> omega_;
};

using SpectralPtr = std::shared_ptr<const SpectralOperator>;

inline SpectralPtr assemble_K(GridPtr grid) {
  return std::make_shared<const SpectralOperator>(std::move(grid));
}

}  // namespace paqft
