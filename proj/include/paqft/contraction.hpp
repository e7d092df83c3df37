#pragma once

#include <functional>
#include <unordered_map>
#include <vector>

#include "paqft/functionals.hpp"
#include "paqft/propagators.hpp"
#include "paqft/series.hpp"

namespace paqft {

// Bilinear pairing Pair_B(u,v) = int int u(x) B(x,y) v(y) dmu(x) dmu(y),
// evaluated mode-by-mode. Factor-level results are memoized; dense factors
// additionally cache their weighted mode transform.
class PairingEngine {
 public:
  explicit PairingEngine(KernelPtr B) : B_(std::move(B)) {}

  const PropagatorKernel& kernel() const { return *B_; }

  Complex pair(const Factor& u, const Factor& v) const {
    std::uint64_t cache_key = 0;
    bool cacheable = u.is_point() && v.is_point();
    if (cacheable) {
      cache_key = (u.key() << 32) | v.key();
      auto it = ptpt_.find(cache_key);
      if (it != ptpt_.end()) return it->second;
    }
    Complex val = compute(u, v);
    if (cacheable) ptpt_.emplace(cache_key, val);
    return val;
  }

 private:
  Complex compute(const Factor& u, const Factor& v) const {
    const auto& K = B_->op();
    const auto& g = K.grid();
    const double dt = g.dt(), dx = g.dx();
    if (u.is_point() && v.is_point()) {
      return g.weight(u.xj()) * g.weight(v.xj()) * B_->entry(u.ti(), u.xj(), v.ti(), v.xj());
    }
    if (u.is_point()) {
      const Eigen::MatrixXcd& V = modes(v);
      Complex s = 0;
      for (int k = 0; k < K.n_modes(); ++k)
        s += K.mode_vector(k, u.xj()) *
             (B_->mode(k).row(u.ti()) * V.col(k))(0, 0);
      return s * g.weight(u.xj()) * dt;
    }
    if (v.is_point()) {
      const Eigen::MatrixXcd& U = modes(u);
      Complex s = 0;
      for (int k = 0; k < K.n_modes(); ++k)
        s += K.mode_vector(k, v.xj()) *
             (U.col(k).transpose() * B_->mode(k).col(v.ti()))(0, 0);
      return s * g.weight(v.xj()) * dt;
    }
    const Eigen::MatrixXcd& U = modes(u);
    const Eigen::MatrixXcd& V = modes(v);
    Complex s = 0;
    for (int k = 0; k < K.n_modes(); ++k)
      s += (U.col(k).transpose() * B_->mode(k) * V.col(k))(0, 0);
    return s * dx * dt * dt;
  }

  const Eigen::MatrixXcd& modes(const Factor& f) const {
    const GridFunction* p = f.ptr().get();
    auto it = dense_modes_.find(p);
    if (it != dense_modes_.end()) return it->second;
    return dense_modes_.emplace(p, B_->op().to_modes_weighted(f.fn())).first->second;
  }

  KernelPtr B_;
  mutable std::unordered_map<std::uint64_t, Complex> ptpt_;
  mutable std::unordered_map<const GridFunction*, Eigen::MatrixXcd> dense_modes_;
};

namespace detail {

// Permanent of the n x n minor P[rows, cols]; sums products over bijections.
inline Complex permanent(const std::vector<std::vector<Complex>>& P, const std::vector<int>& rows,
                         std::vector<int>& cols, std::size_t level) {
  if (level == rows.size()) return 1.0;
  Complex s = 0;
  for (std::size_t c = level; c < cols.size(); ++c) {
    std::swap(cols[level], cols[c]);
    Complex pv = P[rows[level]][cols[level]];
    if (pv != 0.0) s += pv * permanent(P, rows, cols, level + 1);
    std::swap(cols[level], cols[c]);
  }
  return s;
}

template <typename F>
inline void for_each_subset(int n, int k, F&& fn) {
  if (k == 0) {
    std::vector<int> empty;
    fn(empty);
    return;
  }
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

// m(e^{hbar <B, d_L d_R>} F (x) G): returns the contraction-order-n pieces
// separately (n = number of contracted pairs); the caller grades them with
// hbar^n and the per-pair scalar weight. The left slot is the first kernel
// argument, which is what orients antisymmetric kernels.
inline std::vector<RegularFunctional> contract_orders(const RegularFunctional& F,
                                                      const RegularFunctional& G,
                                                      const PairingEngine& eng,
                                                      Complex per_pair_weight,
                                                      bool* degree_dropped = nullptr) {
  GridPtr grid = F.grid_ptr();
  int bound = std::max(F.degree_bound(), G.degree_bound());
  std::vector<RegularFunctional> out;
  auto at = [&](std::size_t n) -> RegularFunctional& {
    while (out.size() <= n) out.emplace_back(grid, bound);
    return out[n];
  };
  at(0);
  for (const auto& tf : F.terms()) {
    for (const auto& tg : G.terms()) {
      const int p = tf.degree(), q = tg.degree();
      const int nmax = std::min(p, q);
      std::vector<std::vector<Complex>> P(p, std::vector<Complex>(q));
      for (int a = 0; a < p; ++a)
        for (int b = 0; b < q; ++b) P[a][b] = eng.pair(tf.f[a], tg.f[b]);
      Complex base = tf.c * tg.c;
      Complex wn = 1.0;
      for (int n = 0; n <= nmax; ++n) {
        if (p + q - 2 * n > bound) {
          if (degree_dropped) *degree_dropped = true;
          wn *= per_pair_weight;
          continue;  // this order cannot be stored; higher n may fit
        }
        Complex wfixed = base * wn;
        detail::for_each_subset(p, n, [&](const std::vector<int>& rows) {
          detail::for_each_subset(q, n, [&](const std::vector<int>& cols_in) {
            std::vector<int> cols = cols_in;
            Complex perm = detail::permanent(P, rows, cols, 0);
            if (perm == 0.0) return;
            KernelTerm t;
            t.c = wfixed * perm;
            t.f.reserve(p + q - 2 * n);
            std::size_t ri = 0;
            for (int s = 0; s < p; ++s) {
              if (ri < rows.size() && rows[ri] == s) {
                ++ri;
                continue;
              }
              t.f.push_back(tf.f[s]);
            }
            std::size_t ci = 0;
            for (int s = 0; s < q; ++s) {
              if (ci < cols_in.size() && cols_in[ci] == s) {
                ++ci;
                continue;
              }
              t.f.push_back(tg.f[s]);
            }
            at(n).add_term(std::move(t));
          });
        });
        wn *= per_pair_weight;
      }
    }
  }
  for (auto& F_n : out) F_n.merge_terms();
  return out;
}

// Exponential of a self-contraction: e^{sum over slot pairs} applied term by
// term, returning the m-pair pieces. Used with symmetric kernels only (the
// Gamma-map of normal ordering and the unary time-ordering map).
inline std::vector<RegularFunctional> self_contract_orders(const RegularFunctional& F,
                                                           const PairingEngine& eng,
                                                           Complex per_pair_weight) {
  GridPtr grid = F.grid_ptr();
  int bound = F.degree_bound();
  std::vector<RegularFunctional> out;
  auto at = [&](std::size_t m) -> RegularFunctional& {
    while (out.size() <= m) out.emplace_back(grid, bound);
    return out[m];
  };
  at(0);
  for (const auto& t : F.terms()) {
    const int p = t.degree();
    std::vector<std::vector<Complex>> P(p, std::vector<Complex>(p));
    for (int a = 0; a < p; ++a)
      for (int b = a + 1; b < p; ++b) P[a][b] = P[b][a] = eng.pair(t.f[a], t.f[b]);
    // enumerate partial matchings; each pair is created at its lower slot
    std::vector<int> partner(p, -1);
    std::function<void(int, int, Complex)> rec = [&](int s, int m, Complex acc) {
      if (s == p) {
        KernelTerm nt;
        nt.c = t.c * acc;
        for (int r = 0; r < p; ++r)
          if (partner[r] == -1) nt.f.push_back(t.f[r]);
        at(m).add_term(std::move(nt));
        return;
      }
      if (partner[s] != -1) {
        rec(s + 1, m, acc);
        return;
      }
      rec(s + 1, m, acc);  // slot s stays uncontracted
      for (int r = s + 1; r < p; ++r) {
        if (partner[r] != -1) continue;
        partner[s] = r;
        partner[r] = s;
        rec(s + 1, m + 1, acc * per_pair_weight * P[s][r]);
        partner[s] = -1;
        partner[r] = -1;
      }
    };
    rec(0, 0, 1.0);
  }
  for (auto& F_m : out) F_m.merge_terms();
  return out;
}

// Series-level contraction product: coefficients convolve in (p,q), each
// contraction order n raising the hbar grade by n.
inline FormalSeries kernel_product(const FormalSeries& F, const FormalSeries& G,
                                   const PairingEngine& eng, Complex per_pair_weight) {
  FormalSeries out(F.grid_ptr(), F.orders(), std::max(F.degree_bound(), G.degree_bound()));
  if (F.truncation_hit() || G.truncation_hit()) out.note_truncation();
  for (const auto& [pq1, A] : F.coefficients()) {
    for (const auto& [pq2, B] : G.coefficients()) {
      int p = pq1.first + pq2.first;
      int q0 = pq1.second + pq2.second;
      if (p > F.orders().lambda_max) {
        out.note_truncation();
        continue;
      }
      bool dropped = false;
      auto orders = contract_orders(A, B, eng, per_pair_weight, &dropped);
      if (dropped) out.note_truncation();
      for (std::size_t n = 0; n < orders.size(); ++n) {
        if (orders[n].is_zero()) continue;
        out.accumulate(p, q0 + static_cast<int>(n), orders[n]);
      }
    }
  }
  out.compress();
  return out;
}

// Series-level self-contraction exponential (normal ordering / unary maps).
inline FormalSeries gamma_exp(const FormalSeries& F, const PairingEngine& eng,
                              Complex per_pair_weight) {
  FormalSeries out(F.grid_ptr(), F.orders(), F.degree_bound());
  if (F.truncation_hit()) out.note_truncation();
  for (const auto& [pq, A] : F.coefficients()) {
    auto orders = self_contract_orders(A, eng, per_pair_weight);
    for (std::size_t m = 0; m < orders.size(); ++m) {
      if (orders[m].is_zero()) continue;
      out.accumulate(pq.first, pq.second + static_cast<int>(m), orders[m]);
    }
  }
  out.compress();
  return out;
}

}  // namespace paqft
