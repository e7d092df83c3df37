#pragma once

#include <algorithm>
#include <complex>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "paqft/grid.hpp"
#include "paqft/report.hpp"

namespace paqft {

// One tensor slot of an elementary symmetric tensor. Either a shared dense
// grid function or a single-cell indicator (the storage that keeps local
// monomials cheap: one term per grid point, point factors need no array).
class Factor {
 public:
  static Factor point(int i, int j) {
    Factor f;
    f.i_ = i;
    f.j_ = j;
    return f;
  }
  static Factor dense(GridFunctionPtr g) {
    Factor f;
    f.dense_ = std::move(g);
    return f;
  }

  bool is_point() const { return dense_ == nullptr; }
  int ti() const { return i_; }
  int xj() const { return j_; }
  const GridFunction& fn() const { return *dense_; }
  const GridFunctionPtr& ptr() const { return dense_; }

  // mu-weighted pairing with a configuration: <f, phi>_mu.
  Complex pair_config(const SpacetimeGrid& g, const GridFunction& phi) const {
    if (is_point()) return phi(i_, j_) * g.weight(j_);
    Complex s = 0;
    for (int i = 0; i < g.nt(); ++i)
      for (int j = 0; j < g.nx(); ++j) s += dense_->operator()(i, j) * phi(i, j) * g.weight(j);
    return s;
  }

  Region support(const SpacetimeGrid& g) const {
    if (is_point()) return Region::point(g.nt(), g.nx(), i_, j_);
    return dense_->support(g);
  }

  Factor conjugated() const {
    if (is_point()) return *this;
    return dense(std::make_shared<const GridFunction>(dense_->conjugated()));
  }

  // Stable identity for term merging.
  std::uint64_t key() const {
    if (is_point()) return (static_cast<std::uint64_t>(i_) << 20) | static_cast<std::uint64_t>(j_);
    return reinterpret_cast<std::uint64_t>(dense_.get()) | (1ull << 63);
  }

 private:
  int i_ = -1, j_ = -1;
  GridFunctionPtr dense_;
};

struct KernelTerm {
  Complex c;
  std::vector<Factor> f;  // degree = f.size()
  int degree() const { return static_cast<int>(f.size()); }
};

// A symmetric kernel of fixed degree, stored as a sum of elementary tensors.
// Symmetric semantics come from symmetrized application; the term list itself
// is not reordered.
struct SymmetricKernel {
  int degree = 0;
  std::vector<KernelTerm> terms;

  // <kernel, psi_1 (x) ... (x) psi_n> with explicit symmetrization.
  Complex apply(const SpacetimeGrid& g, const std::vector<const GridFunction*>& psi) const {
    if (static_cast<int>(psi.size()) != degree)
      throw DomainError("symmetric kernel applied to wrong number of arguments");
    if (degree == 0) {
      Complex s = 0;
      for (const auto& t : terms) s += t.c;
      return s;
    }
    std::vector<int> perm(degree);
    for (int i = 0; i < degree; ++i) perm[i] = i;
    Complex total = 0;
    double nperm = 0;
    do {
      for (const auto& t : terms) {
        Complex p = t.c;
        for (int s = 0; s < degree; ++s) p *= t.f[s].pair_config(g, *psi[perm[s]]);
        total += p;
      }
      nperm += 1;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total / nperm;
  }
};

// Finite sum of symmetric kernels over grid points; the concrete carrier of
// polynomial observables. Values are taken on real or complex configurations.
class RegularFunctional {
 public:
  RegularFunctional() = default;
  RegularFunctional(GridPtr grid, int degree_bound = 6)
      : grid_(std::move(grid)), bound_(degree_bound) {}

  static RegularFunctional constant(GridPtr grid, Complex c, int degree_bound = 6) {
    RegularFunctional F(std::move(grid), degree_bound);
    if (c != 0.0) F.terms_.push_back({c, {}});
    return F;
  }

  const GridPtr& grid_ptr() const { return grid_; }
  const SpacetimeGrid& grid() const { return *grid_; }
  int degree_bound() const { return bound_; }
  const std::vector<KernelTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  int degree() const {
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, t.degree());
    return d;
  }

  void add_term(KernelTerm t) {
    if (t.degree() > bound_)
      throw DomainError("functional degree " + std::to_string(t.degree()) +
                        " exceeds the configured bound " + std::to_string(bound_));
    if (t.c != 0.0) terms_.push_back(std::move(t));
  }

  Complex evaluate(const GridFunction& phi) const {
    Complex s = 0;
    for (const auto& t : terms_) {
      Complex p = t.c;
      for (const auto& f : t.f) {
        p *= f.pair_config(*grid_, phi);
        if (p == 0.0) break;
      }
      s += p;
    }
    return s;
  }

  RegularFunctional& operator+=(const RegularFunctional& o) {
    check_same_grid(o);
    bound_ = std::max(bound_, o.bound_);
    for (const auto& t : o.terms_) terms_.push_back(t);
    return *this;
  }
  RegularFunctional& operator*=(Complex c) {
    if (c == 0.0) {
      terms_.clear();
      return *this;
    }
    for (auto& t : terms_) t.c *= c;
    return *this;
  }
  friend RegularFunctional operator+(RegularFunctional a, const RegularFunctional& b) {
    return a += b;
  }
  friend RegularFunctional operator*(Complex c, RegularFunctional a) { return a *= c; }

  RegularFunctional conjugated() const {
    RegularFunctional out(grid_, bound_);
    for (const auto& t : terms_) {
      KernelTerm nt;
      nt.c = std::conj(t.c);
      for (const auto& f : t.f) nt.f.push_back(f.conjugated());
      out.terms_.push_back(std::move(nt));
    }
    return out;
  }

  Region support() const {
    Region r(grid_->nt(), grid_->nx());
    for (const auto& t : terms_)
      for (const auto& f : t.f) r = r.united(f.support(*grid_));
    return r;
  }

  // Collapses terms sharing the same factor multiset; keeps products from
  // blowing up when local monomials are contracted repeatedly.
  void merge_terms(double drop_below = 0.0) {
    std::unordered_map<std::string, std::size_t> seen;
    std::vector<KernelTerm> merged;
    merged.reserve(terms_.size());
    for (auto& t : terms_) {
      std::vector<std::uint64_t> keys;
      keys.reserve(t.f.size());
      for (const auto& f : t.f) keys.push_back(f.key());
      std::sort(keys.begin(), keys.end());
      std::string key(reinterpret_cast<const char*>(keys.data()),
                      keys.size() * sizeof(std::uint64_t));
      auto it = seen.find(key);
      if (it == seen.end()) {
        seen.emplace(std::move(key), merged.size());
        merged.push_back(std::move(t));
      } else {
        merged[it->second].c += t.c;
      }
    }
    terms_.clear();
    double scale = 0;
    for (const auto& t : merged) scale = std::max(scale, std::abs(t.c));
    for (auto& t : merged)
      if (std::abs(t.c) > drop_below * scale && t.c != 0.0) terms_.push_back(std::move(t));
  }

  // Serialization: terms grouped by degree; dense factors stored once in a
  // side table and referenced by id, point factors inline.
  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json out;
    std::map<const GridFunction*, int> ids;
    auto functions = nlohmann::ordered_json::object();
    auto factor_json = [&](const Factor& f) -> nlohmann::ordered_json {
      if (f.is_point()) return {{"kind", "point"}, {"t", f.ti()}, {"x", f.xj()}};
      auto it = ids.find(f.ptr().get());
      int id;
      if (it != ids.end()) {
        id = it->second;
      } else {
        id = static_cast<int>(ids.size());
        ids.emplace(f.ptr().get(), id);
        auto vals = nlohmann::ordered_json::array();
        for (int i = 0; i < f.fn().nt(); ++i)
          for (int j = 0; j < f.fn().nx(); ++j)
            vals.push_back({f.fn()(i, j).real(), f.fn()(i, j).imag()});
        functions[std::to_string(id)] = {{"nt", f.fn().nt()}, {"nx", f.fn().nx()},
                                         {"values", vals}};
      }
      return {{"kind", "dense"}, {"ref", id}};
    };
    std::map<int, nlohmann::ordered_json> by_degree;
    for (const auto& t : terms_) {
      nlohmann::ordered_json tj;
      tj["coeff"] = {t.c.real(), t.c.imag()};
      auto fs = nlohmann::ordered_json::array();
      for (const auto& f : t.f) fs.push_back(factor_json(f));
      tj["factors"] = fs;
      int n = t.degree();
      if (!by_degree.count(n)) by_degree[n] = nlohmann::ordered_json::array();
      by_degree[n].push_back(tj);
    }
    auto dt = nlohmann::ordered_json::array();
    for (auto& [n, terms] : by_degree) dt.push_back({{"n", n}, {"terms", terms}});
    out["degree_terms"] = dt;
    out["functions"] = functions;
    return out;
  }

  // d^k/d eps^k F(phi + eps psi)|_0 packaged as a degree-k kernel.
  SymmetricKernel derivative(const GridFunction& phi, int k) const {
    SymmetricKernel out;
    out.degree = k;
    if (k == 0) {
      out.terms.push_back({evaluate(phi), {}});
      return out;
    }
    double kfact = 1;
    for (int n = 2; n <= k; ++n) kfact *= n;
    for (const auto& t : terms_) {
      const int p = t.degree();
      if (p < k) continue;
      // iterate over k-subsets of slots
      std::vector<int> idx(k);
      for (int i = 0; i < k; ++i) idx[i] = i;
      while (true) {
        Complex rest = t.c * kfact;
        std::vector<Factor> fac;
        fac.reserve(k);
        std::size_t pos = 0;
        for (int s = 0; s < p; ++s) {
          if (pos < idx.size() && idx[pos] == s) {
            fac.push_back(t.f[s]);
            ++pos;
          } else {
            rest *= t.f[s].pair_config(*grid_, phi);
          }
        }
        if (rest != 0.0) out.terms.push_back({rest, std::move(fac)});
        int i = k - 1;
        while (i >= 0 && idx[i] == p - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int jj = i + 1; jj < k; ++jj) idx[jj] = idx[jj - 1] + 1;
      }
    }
    return out;
  }

  // First derivative collapsed to a grid function: <F'(phi), psi> = <g, psi>_mu.
  GridFunction gradient(const GridFunction& phi) const {
    GridFunction g(*grid_);
    for (const auto& t : terms_) {
      const int p = t.degree();
      if (p == 0) continue;
      std::vector<Complex> pairings(p);
      for (int s = 0; s < p; ++s) pairings[s] = t.f[s].pair_config(*grid_, phi);
      for (int s = 0; s < p; ++s) {
        Complex rest = t.c;
        for (int r = 0; r < p; ++r)
          if (r != s) rest *= pairings[r];
        if (rest == 0.0) continue;
        const Factor& f = t.f[s];
        if (f.is_point()) {
          g(f.ti(), f.xj()) += rest;
        } else {
          g.values() += rest * f.fn().values();
        }
      }
    }
    return g;
  }

 private:
  void check_same_grid(const RegularFunctional& o) const {
    if (grid_.get() != o.grid_.get()) throw DomainError("functionals live on different grids");
  }
  GridPtr grid_;
  int bound_ = 6;
  std::vector<KernelTerm> terms_;
};

// F_f(phi) = int f phi dmu.
inline RegularFunctional make_linear(GridPtr grid, const GridFunction& f, int degree_bound = 6) {
  const auto& g = *grid;
  if (!f.clears_time_boundary(g.margin(), g.support_threshold()))
    throw DomainError("make_linear: source support touches the time window boundary");
  RegularFunctional F(grid, degree_bound);
  if (f.max_abs() > 0) {
    KernelTerm t;
    t.c = 1.0;
    t.f.push_back(Factor::dense(std::make_shared<const GridFunction>(f)));
    F.add_term(std::move(t));
  }
  return F;
}

// Local monomial int f phi^n dmu: one diagonal term per grid point of supp f.
inline RegularFunctional make_monomial(GridPtr grid, int n, const GridFunction& window,
                                       int degree_bound = 6) {
  if (n < 0) throw DomainError("make_monomial: negative degree");
  if (n > degree_bound)
    throw DomainError("make_monomial: degree exceeds the configured bound");
  const auto& g = *grid;
  RegularFunctional F(grid, degree_bound);
  if (n == 0) {
    Complex c = 0;
    for (int i = 0; i < g.nt(); ++i)
      for (int j = 0; j < g.nx(); ++j) c += window(i, j) * g.weight(j);
    return RegularFunctional::constant(grid, c, degree_bound);
  }
  for (int i = 0; i < g.nt(); ++i)
    for (int j = 0; j < g.nx(); ++j) {
      Complex w = window(i, j);
      if (std::abs(w) <= g.support_threshold()) continue;
      KernelTerm t;
      t.c = w * std::pow(g.weight(j), 1.0 - n);
      t.f.assign(n, Factor::point(i, j));
      F.add_term(std::move(t));
    }
  return F;
}

inline RegularFunctional pointwise_product(const RegularFunctional& F,
                                           const RegularFunctional& G) {
  if (F.grid_ptr().get() != G.grid_ptr().get())
    throw DomainError("pointwise_product: functionals live on different grids");
  int bound = std::max(F.degree_bound(), G.degree_bound());
  if (F.degree() + G.degree() > bound)
    throw DomainError("pointwise_product: degree overflow (" +
                      std::to_string(F.degree() + G.degree()) + " > " + std::to_string(bound) +
                      ")");
  RegularFunctional out(F.grid_ptr(), bound);
  for (const auto& tf : F.terms())
    for (const auto& tg : G.terms()) {
      KernelTerm t;
      t.c = tf.c * tg.c;
      t.f = tf.f;
      t.f.insert(t.f.end(), tg.f.begin(), tg.f.end());
      out.add_term(std::move(t));
    }
  out.merge_terms();
  return out;
}

}  // namespace paqft
