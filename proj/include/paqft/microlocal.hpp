#pragma once

#include <cmath>
#include <map>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "paqft/grid.hpp"
#include "paqft/parallel.hpp"
#include "paqft/report.hpp"

namespace paqft {

// Windowed-Fourier singular-direction estimator. A fixed grid has no true
// wave front set; the estimator classifies the directional high-frequency
// content of gridded data and is calibrated on three references (delta: all
// directions; Gaussian: none; plane wave: its own frequency bucket).
//
// Transform convention: F(xi) = sum f(z) taper(z) e^{-i xi.z}, so a plane
// wave e^{+i w t} concentrates in the bucket of +w. Direction buckets are
// one-sided: bucket b covers angle 2 pi b / D, antipodal buckets distinct.
struct WfParams {
  int window = 8;          // half-width in cells
  int directions = 16;     // buckets on the covector circle (2 for 1d data)
  int decay_degree = 4;    // polynomial order of the decay test
  double cutoff_ratio = 10.0;
  int n_radii = 6;
  double rmax_frac = 0.85;     // of the Nyquist frequency
  double significance = 2e-3;  // windows below this fraction of the global scale are clean
  double dominance = 0.33;     // a flagged direction must carry this share of the worst score
  int center_stride = 1;
};

struct WFEstimate {
  WfParams params;
  int nt = 0, nx = 0;  // nx = 1 for 1d data
  // flagged directions per point, bitmask over buckets
  std::map<std::pair<int, int>, std::uint32_t> flags;

  bool flagged(int i, int j, int dir) const {
    auto it = flags.find({i, j});
    return it != flags.end() && (it->second >> dir) & 1u;
  }
  bool empty() const { return flags.empty(); }
  std::set<int> all_directions() const {
    std::set<int> s;
    for (const auto& [p, m] : flags)
      for (int b = 0; b < params.directions; ++b)
        if ((m >> b) & 1u) s.insert(b);
    return s;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["params"] = {{"window", params.window},
                   {"directions", params.directions},
                   {"decay_degree", params.decay_degree},
                   {"cutoff_ratio", params.cutoff_ratio}};
    auto pts = nlohmann::ordered_json::array();
    for (const auto& [p, m] : flags) {
      nlohmann::ordered_json pj;
      pj["t"] = p.first;
      pj["x"] = p.second;
      auto dirs = nlohmann::ordered_json::array();
      for (int b = 0; b < params.directions; ++b)
        if ((m >> b) & 1u) dirs.push_back(b);
      pj["dirs"] = dirs;
      pts.push_back(pj);
    }
    j["points"] = pts;
    return j;
  }
};

namespace detail {

// Gaussian profile for angular selectivity times a cos^4 factor giving a
// C^3 zero at the window edge. Smooth content cut by the window edge then
// leaks like 1/xi^4, which the degree-4 decay test does not mistake for a
// singular direction; harder truncations do get mistaken.
inline double taper(int cells, int w) {
  double sigma = w / 2.2;
  double c = std::cos(0.5 * M_PI * cells / (w + 1));
  return std::exp(-0.5 * (cells / sigma) * (cells / sigma)) * c * c * c * c;
}

}  // namespace detail

// 2d estimator on an (nt x nx) array with axis steps ht, hx. Periodic in the
// second axis, clamped centers in the first.
inline WFEstimate wf_estimate_2d(const Eigen::ArrayXXcd& v, double ht, double hx,
                                 const WfParams& p, bool periodic_x = true) {
  const int nt = static_cast<int>(v.rows());
  const int nx = static_cast<int>(v.cols());
  if (nt < 4 * p.window || (periodic_x ? nx : nx) < 4 * p.window)
    throw DomainError("wf_estimate: grid smaller than 4 window widths per axis");
  const int w = p.window;
  WFEstimate est;
  est.params = p;
  est.nt = nt;
  est.nx = nx;

  double global_scale = v.abs().maxCoeff();
  if (global_scale == 0) return est;

  const double rmax = p.rmax_frac * M_PI / std::max(ht, hx);
  std::vector<std::pair<double, double>> dirs(p.directions);
  for (int b = 0; b < p.directions; ++b) {
    double th = 2.0 * M_PI * b / p.directions;
    dirs[b] = {std::cos(th), std::sin(th)};
  }

  std::vector<int> centers_t, centers_x;
  for (int i = w; i + w < nt; i += p.center_stride) centers_t.push_back(i);
  for (int j = 0; j < nx; j += p.center_stride) centers_x.push_back(j);
  if (!periodic_x) {
    centers_x.clear();
    for (int j = w; j + w < nx; j += p.center_stride) centers_x.push_back(j);
  }

  std::vector<std::map<std::pair<int, int>, std::uint32_t>> partial(centers_t.size());
  parallel_for(static_cast<int>(centers_t.size()), [&](int ci) {
    int i0 = centers_t[ci];
    for (int j0 : centers_x) {
      // tapered window
      Eigen::ArrayXXcd win(2 * w + 1, 2 * w + 1);
      double l1 = 0;
      for (int di = -w; di <= w; ++di)
        for (int dj = -w; dj <= w; ++dj) {
          int jj = periodic_x ? (j0 + dj + nx) % nx : j0 + dj;
          Complex val = v(i0 + di, jj);
          win(di + w, dj + w) = val * detail::taper(di, w) * detail::taper(dj, w);
          l1 += std::abs(win(di + w, dj + w));
        }
      if (l1 < 1e-13 * global_scale) continue;  // empty window
      std::uint32_t mask = 0;
      std::vector<std::vector<double>> amp(p.directions, std::vector<double>(p.n_radii, 0.0));
      for (int b = 0; b < p.directions; ++b) {
        for (int m = 0; m < p.n_radii; ++m) {
          double r = rmax * (m + 1) / p.n_radii;
          double xt = r * dirs[b].first, xx = r * dirs[b].second;
          Complex z = 0;
          for (int di = -w; di <= w; ++di)
            for (int dj = -w; dj <= w; ++dj)
              z += win(di + w, dj + w) *
                   std::exp(Complex(0, -(xt * di * ht + xx * dj * hx)));
          amp[b][m] = std::abs(z);
        }
      }
      // decay is judged against the strongest sampled response in the window;
      // insignificant windows cannot witness a singular direction
      double ref = 0;
      for (int b = 0; b < p.directions; ++b)
        for (int m = 0; m < p.n_radii; ++m) ref = std::max(ref, amp[b][m]);
      if (ref < p.significance * global_scale) continue;
      std::vector<double> score(p.directions, 0.0);
      double top = 0;
      for (int b = 0; b < p.directions; ++b) {
        for (int m = p.n_radii / 2; m < p.n_radii; ++m) {
          double rho = p.rmax_frac * M_PI * (m + 1) / p.n_radii;  // cell units
          score[b] = std::max(score[b], amp[b][m] * std::pow(1.0 + rho, p.decay_degree));
        }
        top = std::max(top, score[b]);
      }
      for (int b = 0; b < p.directions; ++b)
        if (score[b] >= p.cutoff_ratio * ref && score[b] >= p.dominance * top)
          mask |= 1u << b;
      if (mask) partial[ci][{i0, j0}] = mask;
    }
  });
  for (auto& m : partial)
    for (auto& [k, v2] : m) est.flags[k] = v2;
  return est;
}

// 1d estimator: directions are the two covector signs, bucket 0 = positive.
inline WFEstimate wf_estimate_1d(const Eigen::ArrayXcd& v, double h, const WfParams& pin) {
  WfParams p = pin;
  p.directions = 2;
  const int n = static_cast<int>(v.size());
  if (n < 4 * p.window) throw DomainError("wf_estimate: grid smaller than 4 window widths");
  const int w = p.window;
  WFEstimate est;
  est.params = p;
  est.nt = n;
  est.nx = 1;
  double global_scale = v.abs().maxCoeff();
  if (global_scale == 0) return est;
  const double rmax = p.rmax_frac * M_PI / h;
  for (int i0 = w; i0 + w < n; i0 += p.center_stride) {
    Eigen::ArrayXcd win(2 * w + 1);
    double l1 = 0;
    for (int di = -w; di <= w; ++di) {
      win(di + w) = v(i0 + di) * detail::taper(di, w);
      l1 += std::abs(win(di + w));
    }
    if (l1 < 1e-13 * global_scale) continue;
    std::uint32_t mask = 0;
    std::vector<std::vector<double>> amp(2, std::vector<double>(p.n_radii, 0.0));
    for (int b = 0; b < 2; ++b) {
      double sgn = b == 0 ? 1.0 : -1.0;
      for (int m = 0; m < p.n_radii; ++m) {
        double r = sgn * rmax * (m + 1) / p.n_radii;
        Complex z = 0;
        for (int di = -w; di <= w; ++di) z += win(di + w) * std::exp(Complex(0, -r * di * h));
        amp[b][m] = std::abs(z);
      }
    }
    double ref = 0;
    for (int b = 0; b < 2; ++b)
      for (int m = 0; m < p.n_radii; ++m) ref = std::max(ref, amp[b][m]);
    if (ref < p.significance * global_scale) continue;
    std::vector<double> score(2, 0.0);
    for (int b = 0; b < 2; ++b)
      for (int m = p.n_radii / 2; m < p.n_radii; ++m) {
        double rho = p.rmax_frac * M_PI * (m + 1) / p.n_radii;
        score[b] = std::max(score[b], amp[b][m] * std::pow(1.0 + rho, p.decay_degree));
      }
    double top = std::max(score[0], score[1]);
    for (int b = 0; b < 2; ++b)
      if (score[b] >= p.cutoff_ratio * ref && score[b] >= p.dominance * top) mask |= 1u << b;
    if (mask) est.flags[{i0, 0}] = mask;
  }
  return est;
}

// Hoermander product criterion at the bucket level: no shared point may carry
// a direction in one factor whose antipode is flagged in the other.
inline bool hormander_product_ok(const WFEstimate& a, const WFEstimate& b) {
  if (a.nt != b.nt || a.nx != b.nx || a.params.directions != b.params.directions)
    throw DomainError("hormander_product_ok: estimates have different layouts");
  const int D = a.params.directions;
  for (const auto& [pt, ma] : a.flags) {
    auto it = b.flags.find(pt);
    if (it == b.flags.end()) continue;
    std::uint32_t mb = it->second;
    for (int d = 0; d < D; ++d) {
      int anti = (d + D / 2) % D;
      if (((ma >> d) & 1u) && ((mb >> anti) & 1u)) return false;
    }
  }
  return true;
}

// Microcausal cone test for a two-point section S(t1,t2): flagged covector
// pairs must not have both components in the closed forward (or both in the
// closed backward) cone. In a fixed-time-pair section that means both
// frequency components strictly positive, or both strictly negative.
inline Report microcausal_check(const Eigen::ArrayXXcd& section, double ht, const WfParams& p) {
  Report rep;
  rep.suite = "microcausal";
  WFEstimate est = wf_estimate_2d(section, ht, ht, p, /*periodic_x=*/false);
  int violations = 0;
  const int D = p.directions;
  for (const auto& [pt, mask] : est.flags) {
    for (int b = 0; b < D; ++b) {
      if (!((mask >> b) & 1u)) continue;
      double th = 2.0 * M_PI * b / D;
      double c = std::cos(th), s = std::sin(th);
      const double tol = 1e-9;
      bool both_fwd = c > tol && s > tol;
      bool both_bwd = c < -tol && s < -tol;
      if (both_fwd || both_bwd) ++violations;
    }
  }
  rep.add(make_check("microcausal_cone",
                     "no flagged covector pair lies entirely in V+ x V+ or V- x V-",
                     violations, 0.5,
                     violations ? std::to_string(violations) + " violating directions" : ""));
  return rep;
}

}  // namespace paqft
