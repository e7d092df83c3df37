#pragma once

#include <map>
#include <utility>

#include "paqft/functionals.hpp"

namespace paqft {

struct TruncationOrders {
  int lambda_max = 3;  // coupling powers kept: 0..lambda_max
  int hbar_max = 4;    // hbar powers kept: -lambda_power..hbar_max
};

// Truncated bivariate formal series in the coupling (grade p >= 0) and in
// hbar (grade q). Negative hbar powers are bounded below by -p: each
// interaction vertex carries one 1/hbar and nothing else does.
class FormalSeries {
 public:
  FormalSeries() = default;
  FormalSeries(GridPtr grid, TruncationOrders orders, int degree_bound = 6)
      : grid_(std::move(grid)), orders_(orders), degree_bound_(degree_bound) {}

  static FormalSeries scalar(GridPtr grid, Complex c, TruncationOrders orders,
                             int degree_bound = 6) {
    FormalSeries s(grid, orders, degree_bound);
    s.set(0, 0, RegularFunctional::constant(std::move(grid), c, degree_bound));
    return s;
  }
  static FormalSeries unit(GridPtr grid, TruncationOrders orders, int degree_bound = 6) {
    return scalar(std::move(grid), 1.0, orders, degree_bound);
  }
  static FormalSeries lift(const RegularFunctional& F, TruncationOrders orders) {
    FormalSeries s(F.grid_ptr(), orders, F.degree_bound());
    s.set(0, 0, F);
    return s;
  }

  const GridPtr& grid_ptr() const { return grid_; }
  const TruncationOrders& orders() const { return orders_; }
  int degree_bound() const { return degree_bound_; }
  bool truncation_hit() const { return truncated_; }
  void note_truncation() { truncated_ = true; }

  bool admissible(int p, int q) const {
    return p >= 0 && p <= orders_.lambda_max && q >= -p && q <= orders_.hbar_max;
  }

  // Adds a contribution; out-of-window orders are dropped and flagged.
  void accumulate(int p, int q, const RegularFunctional& F) {
    if (F.is_zero()) return;
    if (q < -p) throw DomainError("formal series: hbar power below the -lambda floor");
    if (!admissible(p, q)) {
      truncated_ = true;
      return;
    }
    auto it = coeff_.find({p, q});
    if (it == coeff_.end())
      coeff_.emplace(std::make_pair(p, q), F);
    else
      it->second += F;
  }

  void set(int p, int q, RegularFunctional F) {
    if (!admissible(p, q)) {
      truncated_ = true;
      return;
    }
    coeff_[{p, q}] = std::move(F);
  }

  const RegularFunctional* get(int p, int q) const {
    auto it = coeff_.find({p, q});
    return it == coeff_.end() ? nullptr : &it->second;
  }
  const std::map<std::pair<int, int>, RegularFunctional>& coefficients() const { return coeff_; }

  FormalSeries& operator+=(const FormalSeries& o) {
    truncated_ = truncated_ || o.truncated_;
    for (const auto& [pq, F] : o.coeff_) accumulate(pq.first, pq.second, F);
    return *this;
  }
  FormalSeries& operator-=(const FormalSeries& o) {
    truncated_ = truncated_ || o.truncated_;
    for (const auto& [pq, F] : o.coeff_) {
      RegularFunctional neg = F;
      neg *= Complex(-1.0);
      accumulate(pq.first, pq.second, neg);
    }
    return *this;
  }
  FormalSeries& operator*=(Complex c) {
    for (auto& [pq, F] : coeff_) F *= c;
    return *this;
  }
  friend FormalSeries operator+(FormalSeries a, const FormalSeries& b) { return a += b; }
  friend FormalSeries operator-(FormalSeries a, const FormalSeries& b) { return a -= b; }
  friend FormalSeries operator*(Complex c, FormalSeries a) { return a *= c; }

  FormalSeries conjugated() const {
    FormalSeries out(grid_, orders_, degree_bound_);
    out.truncated_ = truncated_;
    for (const auto& [pq, F] : coeff_) out.coeff_[pq] = F.conjugated();
    return out;
  }

  void compress() {
    for (auto it = coeff_.begin(); it != coeff_.end();) {
      it->second.merge_terms();
      if (it->second.is_zero())
        it = coeff_.erase(it);
      else
        ++it;
    }
  }

  // Coefficients keyed by their "(p,q)" grade labels.
  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["orders"] = {{"lambda_max", orders_.lambda_max}, {"hbar_max", orders_.hbar_max}};
    j["truncated"] = truncated_;
    auto coeffs = nlohmann::ordered_json::object();
    for (const auto& [pq, F] : coeff_) {
      std::string key = "(" + std::to_string(pq.first) + "," + std::to_string(pq.second) + ")";
      coeffs[key] = F.to_json();
    }
    j["coefficients"] = coeffs;
    return j;
  }

  // Evaluation of every kept coefficient at a probe configuration.
  std::map<std::pair<int, int>, Complex> evaluate(const GridFunction& phi) const {
    std::map<std::pair<int, int>, Complex> out;
    for (const auto& [pq, F] : coeff_) out[pq] = F.evaluate(phi);
    return out;
  }

  // Sum of coefficients with lambda = hbar = 1 (state-probe evaluations).
  Complex evaluate_total(const GridFunction& phi) const {
    Complex s = 0;
    for (const auto& [pq, F] : coeff_) s += F.evaluate(phi);
    return s;
  }

 private:
  GridPtr grid_;
  TruncationOrders orders_;
  int degree_bound_ = 6;
  bool truncated_ = false;
  std::map<std::pair<int, int>, RegularFunctional> coeff_;
};

// Pointwise (classical) product, coefficient-wise convolution in (p,q).
inline FormalSeries series_pointwise(const FormalSeries& A, const FormalSeries& B) {
  FormalSeries out(A.grid_ptr(), A.orders(), std::max(A.degree_bound(), B.degree_bound()));
  if (A.truncation_hit() || B.truncation_hit()) out.note_truncation();
  for (const auto& [pq1, F] : A.coefficients())
    for (const auto& [pq2, G] : B.coefficients()) {
      if (pq1.first + pq2.first > A.orders().lambda_max) {
        out.note_truncation();
        continue;
      }
      out.accumulate(pq1.first + pq2.first, pq1.second + pq2.second, pointwise_product(F, G));
    }
  out.compress();
  return out;
}

// Coefficient-wise distance on a set of probe configurations; the workhorse
// comparison behind every algebraic identity check.
inline double series_distance(const FormalSeries& A, const FormalSeries& B,
                              const std::vector<GridFunction>& probes) {
  double worst = 0;
  for (const auto& phi : probes) {
    auto ea = A.evaluate(phi);
    auto eb = B.evaluate(phi);
    std::map<std::pair<int, int>, Complex> all;
    for (const auto& [pq, v] : ea) all[pq] += v;
    for (const auto& [pq, v] : eb) all[pq] -= v;
    double scale = 0;
    for (const auto& [pq, v] : ea) scale = std::max(scale, std::abs(v));
    for (const auto& [pq, v] : eb) scale = std::max(scale, std::abs(v));
    for (const auto& [pq, v] : all) worst = std::max(worst, std::abs(v) / std::max(1.0, scale));
  }
  return worst;
}

}  // namespace paqft
