#pragma once

#include <random>

#include "paqft/functionals.hpp"
#include "paqft/grid.hpp"

namespace paqft {

// Periodically wrapped Gaussian bump; sigma in cells. Spectrally resolved for
// sigma >= ~1.8 cells, which is what the causal-support and commutator tests
// rely on.
inline GridFunction gaussian_bump(const SpacetimeGrid& g, double t0, double x0, double sigma_t,
                                  double sigma_x, Complex amp = 1.0) {
  GridFunction f(g);
  double st = sigma_t * g.dt(), sx = sigma_x * g.dx();
  for (int i = 0; i < g.nt(); ++i) {
    double dt0 = g.t(i) - t0;
    double et = std::exp(-0.5 * dt0 * dt0 / (st * st));
    for (int j = 0; j < g.nx(); ++j) {
      double s = 0;
      for (int img = -1; img <= 1; ++img) {
        double dx0 = g.x(j) - x0 + img * g.L();
        s += std::exp(-0.5 * dx0 * dx0 / (sx * sx));
      }
      f(i, j) = amp * et * s;
    }
  }
  return f;
}

// Spatial bump on a single time slice (exactly retarded sources for the
// causal-support tests: no time tails at all).
inline GridFunction slice_bump(const SpacetimeGrid& g, int i0, double x0, double sigma_x,
                               Complex amp = 1.0) {
  GridFunction f(g);
  double sx = sigma_x * g.dx();
  for (int j = 0; j < g.nx(); ++j) {
    double s = 0;
    for (int img = -1; img <= 1; ++img) {
      double dx0 = g.x(j) - x0 + img * g.L();
      s += std::exp(-0.5 * dx0 * dx0 / (sx * sx));
    }
    f(i0, j) = amp * s;
  }
  return f;
}

// Random real field: low spatial modes times a smooth interior time profile.
inline GridFunction random_band_limited(const SpacetimeGrid& g, std::mt19937_64& rng,
                                        int max_mode = 0, int time_harmonics = 3) {
  if (max_mode <= 0) max_mode = std::max(1, g.nx() / 4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GridFunction f(g);
  int m = g.margin();
  int span = g.nt() - 2 * m;
  for (int n = 0; n <= max_mode; ++n) {
    double ac = u(rng), as = u(rng);
    for (int h = 1; h <= time_harmonics; ++h) {
      double bc = u(rng) / h;
      for (int i = m; i < g.nt() - m; ++i) {
        // interior sine window vanishing at the margins
        double s = std::sin(M_PI * (i - m + 0.5) / span);
        double tp = s * s * std::sin(M_PI * h * (i - m + 0.5) / span + 0.3 * bc);
        for (int j = 0; j < g.nx(); ++j) {
          double k = 2.0 * M_PI * n / g.L();
          f(i, j) += bc * tp * (ac * std::cos(k * g.x(j)) + as * std::sin(k * g.x(j)));
        }
      }
    }
  }
  double scale = f.max_abs();
  if (scale > 0) f *= Complex(1.0 / scale);
  return f;
}

// Random real probe configuration (no margin requirement).
inline GridFunction random_configuration(const SpacetimeGrid& g, std::mt19937_64& rng,
                                         int max_mode = 0) {
  if (max_mode <= 0) max_mode = std::max(1, g.nx() / 3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GridFunction f(g);
  for (int n = 0; n <= max_mode; ++n) {
    double ac = u(rng), as = u(rng), w = u(rng);
    for (int i = 0; i < g.nt(); ++i)
      for (int j = 0; j < g.nx(); ++j) {
        double k = 2.0 * M_PI * n / g.L();
        double tphase = 2.0 * M_PI * (n + 1) * g.t(i) / g.T();
        f(i, j) += (ac * std::cos(k * g.x(j)) + as * std::sin(k * g.x(j))) *
                   std::cos(tphase * 0.5 + w);
      }
  }
  double scale = f.max_abs();
  if (scale > 0) f *= Complex(1.0 / scale);
  return f;
}

inline std::vector<GridFunction> random_probes(const SpacetimeGrid& g, std::mt19937_64& rng,
                                               int count) {
  std::vector<GridFunction> out;
  out.reserve(count);
  for (int c = 0; c < count; ++c) out.push_back(random_configuration(g, rng));
  return out;
}

// Smooth random bump combination centered inside a time-x box.
inline GridFunction random_smooth_in_box(const SpacetimeGrid& g, std::mt19937_64& rng, int i_lo,
                                         int i_hi, double x_lo, double x_hi, double sigma_t,
                                         double sigma_x, int bumps = 2) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  GridFunction f(g);
  for (int b = 0; b < bumps; ++b) {
    double t0 = g.t(i_lo) + u(rng) * (g.t(i_hi) - g.t(i_lo));
    double x0 = x_lo + u(rng) * (x_hi - x_lo);
    f += gaussian_bump(g, t0, x0, sigma_t, sigma_x, amp(rng));
  }
  return f;
}

// Random regular functional with smooth factors placed in a spacetime box:
// c0 + c1 F_u + c2 (monomial of degree <= 2 windowed in the box).
inline RegularFunctional random_functional_in_box(GridPtr grid, std::mt19937_64& rng, int i_lo,
                                                  int i_hi, double x_lo, double x_hi,
                                                  double sigma_t, double sigma_x,
                                                  int degree_bound = 6) {
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  const auto& g = *grid;
  GridFunction u = random_smooth_in_box(g, rng, i_lo, i_hi, x_lo, x_hi, sigma_t, sigma_x);
  GridFunction w = random_smooth_in_box(g, rng, i_lo, i_hi, x_lo, x_hi, sigma_t, sigma_x, 1);
  RegularFunctional F(grid, degree_bound);
  F += amp(rng) * make_linear(grid, u, degree_bound);
  F += amp(rng) * make_monomial(grid, 2, w, degree_bound);
  return F;
}

// Small random functional of the requested degree, dense smooth factors.
inline RegularFunctional random_functional(GridPtr grid, std::mt19937_64& rng, int degree,
                                           int degree_bound = 6, int terms = 2) {
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  RegularFunctional F(grid, degree_bound);
  F += RegularFunctional::constant(grid, 0.25 * amp(rng), degree_bound);
  for (int t = 0; t < terms; ++t) {
    KernelTerm term;
    term.c = amp(rng);
    int d = 1 + static_cast<int>(std::floor(std::abs(amp(rng)) * degree));
    d = std::min(d, degree);
    for (int s = 0; s < d; ++s)
      term.f.push_back(Factor::dense(std::make_shared<const GridFunction>(
          random_band_limited(*grid, rng))));
    F.add_term(std::move(term));
  }
  return F;
}

}  // namespace paqft
