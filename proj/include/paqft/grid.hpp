#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "paqft/report.hpp"

namespace paqft {

using Complex = std::complex<double>;

struct LapseProfile {
  enum class Kind { Constant, Cosine };
  Kind kind = Kind::Constant;
  // Constant: params = {value}. Cosine: params = {base, amplitude[, harmonic]}.
  std::vector<double> params = {1.0};

  double operator()(double x, double L) const {
    switch (kind) {
      case Kind::Constant:
        return params.empty() ? 1.0 : params[0];
      case Kind::Cosine: {
        double base = params.size() > 0 ? params[0] : 1.0;
        double amp = params.size() > 1 ? params[1] : 0.0;
        double harmonic = params.size() > 2 ? params[2] : 1.0;
        return base + amp * std::cos(2.0 * M_PI * harmonic * x / L);
      }
    }
    return 1.0;
  }
};

struct GridConfig {
  int nt = 32;
  int nx = 32;
  double T = M_PI;
  double L = 2.0 * M_PI;
  double mass = 1.0;
  LapseProfile lapse;
  double support_threshold = 1e-12;  // absolute; see SpacetimeGrid::support
  int margin = 3;                    // time cells test data must keep clear of the window ends

  static GridConfig from_json(const nlohmann::json& j, const std::string& base = "grid");
};

// Discretized cylinder [0,T] x S^1 with metric a(x)^2 (dt^2 - dx^2).
// Null lines have coordinate slope 1 regardless of the lapse, so causal
// queries are exact interval arithmetic on the lattice.
class SpacetimeGrid {
 public:
  explicit SpacetimeGrid(const GridConfig& cfg) : cfg_(cfg) {
    if (cfg.nt <= 0) throw ConfigError("grid.Nt", "Nt must be positive");
    if (cfg.nx <= 0 || cfg.nx % 2 != 0)
      throw ConfigError("grid.Nx", "Nx must be positive and even");
    if (!(cfg.T > 0)) throw ConfigError("grid.T", "T must be positive");
    if (!(cfg.L > 0)) throw ConfigError("grid.L", "L must be positive");
    if (cfg.mass < 0) throw ConfigError("grid.mass", "mass must be nonnegative");
    dt_ = cfg.T / cfg.nt;
    dx_ = cfg.L / cfg.nx;
    if (dt_ > dx_ * (1.0 + 1e-12))
      throw ConfigError("grid.T", "dt > dx: time step must not exceed the spatial step");
    a_.resize(cfg.nx);
    for (int j = 0; j < cfg.nx; ++j) {
      a_[j] = cfg.lapse(x(j), cfg.L);
      if (!(a_[j] > 0))
        throw ConfigError("grid.lapse", "lapse profile must be strictly positive");
    }
  }

  int nt() const { return cfg_.nt; }
  int nx() const { return cfg_.nx; }
  double T() const { return cfg_.T; }
  double L() const { return cfg_.L; }
  double mass() const { return cfg_.mass; }
  double dt() const { return dt_; }
  double dx() const { return dx_; }
  int margin() const { return cfg_.margin; }
  double support_threshold() const { return cfg_.support_threshold; }
  const GridConfig& config() const { return cfg_; }

  double t(int i) const { return i * dt_; }
  double x(int j) const { return j * dx_; }
  double lapse(int j) const { return a_[j]; }

  // Discrete volume element a(x)^2 dt dx.
  double weight(int j) const { return a_[j] * a_[j] * dt_ * dx_; }
  double total_volume() const {
    double s = 0;
    for (int j = 0; j < nx(); ++j) s += weight(j);
    return s * nt();
  }

  int wrap_x(int j) const {
    int n = nx();
    j %= n;
    return j < 0 ? j + n : j;
  }

  // Shortest distance on the spatial circle, in cells and in length.
  int circ_cells(int j1, int j2) const {
    int d = std::abs(wrap_x(j1) - wrap_x(j2));
    return std::min(d, nx() - d);
  }
  double circ_dist(int j1, int j2) const { return circ_cells(j1, j2) * dx_; }

  // Closed-cone reachability y in J+(x). Ties (|dx| = dt * steps) included.
  bool causally_after(int i0, int j0, int i1, int j1) const {
    if (i1 < i0) return false;
    return circ_dist(j0, j1) <= (i1 - i0) * dt_ + 1e-9 * dx_;
  }

 private:
  GridConfig cfg_;
  double dt_ = 0, dx_ = 0;
  std::vector<double> a_;
};

using GridPtr = std::shared_ptr<const SpacetimeGrid>;

inline GridPtr build_grid(const GridConfig& cfg) {
  return std::make_shared<const SpacetimeGrid>(cfg);
}

inline GridConfig GridConfig::from_json(const nlohmann::json& j, const std::string& base) {
  GridConfig cfg;
  auto need = [&](const char* key) -> const nlohmann::json& {
    if (!j.contains(key)) throw ConfigError(base + "." + key, "missing field");
    return j.at(key);
  };
  try {
    cfg.nt = need("Nt").get<int>();
    cfg.nx = need("Nx").get<int>();
    cfg.T = need("T").get<double>();
    cfg.L = need("L").get<double>();
    cfg.mass = need("mass").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(base, std::string("malformed grid field: ") + e.what());
  }
  if (j.contains("lapse")) {
    const auto& lj = j.at("lapse");
    std::string kind = lj.value("kind", "constant");
    if (kind == "constant")
      cfg.lapse.kind = LapseProfile::Kind::Constant;
    else if (kind == "cosine")
      cfg.lapse.kind = LapseProfile::Kind::Cosine;
    else
      throw ConfigError(base + ".lapse.kind", "unknown lapse kind '" + kind + "'");
    if (lj.contains("params")) cfg.lapse.params = lj.at("params").get<std::vector<double>>();
    if (cfg.lapse.params.empty()) cfg.lapse.params = {1.0};
  }
  if (j.contains("support_threshold")) cfg.support_threshold = j.at("support_threshold").get<double>();
  if (j.contains("margin")) cfg.margin = j.at("margin").get<int>();
  return cfg;
}

// ---------------------------------------------------------------------------
// Regions: subsets of grid points.

class Region {
 public:
  Region() = default;
  Region(int nt, int nx) : nt_(nt), nx_(nx), mask_(nt * nx, 0) {}

  static Region point(int nt, int nx, int i, int j) {
    Region r(nt, nx);
    r.insert(i, j);
    return r;
  }

  int nt() const { return nt_; }
  int nx() const { return nx_; }
  bool empty() const {
    for (auto b : mask_)
      if (b) return false;
    return true;
  }
  std::size_t size() const {
    std::size_t n = 0;
    for (auto b : mask_) n += b ? 1 : 0;
    return n;
  }
  bool contains(int i, int j) const { return mask_[idx(i, j)] != 0; }
  void insert(int i, int j) { mask_[idx(i, j)] = 1; }

  bool same_layout(const Region& o) const { return nt_ == o.nt_ && nx_ == o.nx_; }

  bool subset_of(const Region& o) const {
    check_layout(o);
    for (std::size_t n = 0; n < mask_.size(); ++n)
      if (mask_[n] && !o.mask_[n]) return false;
    return true;
  }
  bool intersects(const Region& o) const {
    check_layout(o);
    for (std::size_t n = 0; n < mask_.size(); ++n)
      if (mask_[n] && o.mask_[n]) return true;
    return false;
  }
  bool operator==(const Region& o) const { return nt_ == o.nt_ && nx_ == o.nx_ && mask_ == o.mask_; }

  Region united(const Region& o) const {
    check_layout(o);
    Region r = *this;
    for (std::size_t n = 0; n < mask_.size(); ++n) r.mask_[n] |= o.mask_[n];
    return r;
  }

  // Dilation by one grid cell (time and space neighbours, periodic in space).
  Region dilated() const {
    Region r(nt_, nx_);
    for (int i = 0; i < nt_; ++i)
      for (int j = 0; j < nx_; ++j) {
        if (!contains(i, j)) continue;
        for (int di = -1; di <= 1; ++di)
          for (int dj = -1; dj <= 1; ++dj) {
            int ii = i + di;
            if (ii < 0 || ii >= nt_) continue;
            int jj = (j + dj + nx_) % nx_;
            r.insert(ii, jj);
          }
      }
    return r;
  }

  template <typename F>
  void for_each(F&& f) const {
    for (int i = 0; i < nt_; ++i)
      for (int j = 0; j < nx_; ++j)
        if (contains(i, j)) f(i, j);
  }

  int min_time() const {
    for (int i = 0; i < nt_; ++i)
      for (int j = 0; j < nx_; ++j)
        if (contains(i, j)) return i;
    return -1;
  }
  int max_time() const {
    for (int i = nt_ - 1; i >= 0; --i)
      for (int j = 0; j < nx_; ++j)
        if (contains(i, j)) return i;
    return -1;
  }

 private:
  void check_layout(const Region& o) const {
    if (!same_layout(o)) throw DomainError("region layout mismatch");
  }
  int idx(int i, int j) const { return i * nx_ + j; }
  int nt_ = 0, nx_ = 0;
  std::vector<std::uint8_t> mask_;
};

inline Region causal_future(const SpacetimeGrid& g, const Region& r) {
  if (r.empty()) throw DomainError("causal_future: empty region");
  Region out(g.nt(), g.nx());
  r.for_each([&](int i0, int j0) {
    for (int i = i0; i < g.nt(); ++i) {
      // cells reachable at coordinate light speed 1, spatial wrap included
      int reach = static_cast<int>(std::floor((i - i0) * g.dt() / g.dx() + 1e-9));
      reach = std::min(reach, g.nx() / 2);
      for (int d = -reach; d <= reach; ++d) out.insert(i, g.wrap_x(j0 + d));
    }
  });
  return out;
}

inline Region causal_past(const SpacetimeGrid& g, const Region& r) {
  if (r.empty()) throw DomainError("causal_past: empty region");
  Region out(g.nt(), g.nx());
  r.for_each([&](int i0, int j0) {
    for (int i = i0; i >= 0; --i) {
      int reach = static_cast<int>(std::floor((i0 - i) * g.dt() / g.dx() + 1e-9));
      reach = std::min(reach, g.nx() / 2);
      for (int d = -reach; d <= reach; ++d) out.insert(i, g.wrap_x(j0 + d));
    }
  });
  return out;
}

inline bool spacelike_separated(const SpacetimeGrid& g, const Region& r1, const Region& r2) {
  if (r1.empty() || r2.empty()) throw DomainError("spacelike_separated: empty region");
  return !causal_future(g, r1).intersects(r2) && !causal_past(g, r1).intersects(r2);
}

// ---------------------------------------------------------------------------
// Grid functions: complex fields sampled on the grid (nt rows, nx columns).

class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(const SpacetimeGrid& g) : v_(Eigen::ArrayXXcd::Zero(g.nt(), g.nx())) {}
  GridFunction(int nt, int nx) : v_(Eigen::ArrayXXcd::Zero(nt, nx)) {}
  explicit GridFunction(Eigen::ArrayXXcd values) : v_(std::move(values)) {}

  int nt() const { return static_cast<int>(v_.rows()); }
  int nx() const { return static_cast<int>(v_.cols()); }
  Complex& operator()(int i, int j) { return v_(i, j); }
  Complex operator()(int i, int j) const { return v_(i, j); }
  const Eigen::ArrayXXcd& values() const { return v_; }
  Eigen::ArrayXXcd& values() { return v_; }

  double max_abs() const { return v_.abs().maxCoeff(); }
  double norm_l2() const { return std::sqrt(v_.abs2().sum()); }

  Region support(double threshold) const {
    Region r(nt(), nx());
    for (int i = 0; i < nt(); ++i)
      for (int j = 0; j < nx(); ++j)
        if (std::abs(v_(i, j)) > threshold) r.insert(i, j);
    return r;
  }
  Region support(const SpacetimeGrid& g) const { return support(g.support_threshold()); }

  GridFunction& operator+=(const GridFunction& o) {
    v_ += o.v_;
    return *this;
  }
  GridFunction& operator-=(const GridFunction& o) {
    v_ -= o.v_;
    return *this;
  }
  GridFunction& operator*=(Complex c) {
    v_ *= c;
    return *this;
  }
  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
  friend GridFunction operator*(Complex c, GridFunction a) { return a *= c; }

  GridFunction conjugated() const { return GridFunction(v_.conjugate()); }

  // Support must stay `margin` rows away from both window ends.
  bool clears_time_boundary(int margin, double threshold) const {
    for (int i = 0; i < nt(); ++i) {
      bool boundary = i < margin || i >= nt() - margin;
      if (!boundary) continue;
      for (int j = 0; j < nx(); ++j)
        if (std::abs(v_(i, j)) > threshold) return false;
    }
    return true;
  }

 private:
  Eigen::ArrayXXcd v_;
};

using GridFunctionPtr = std::shared_ptr<const GridFunction>;

inline double rel_l2_error(const GridFunction& got, const GridFunction& want) {
  double ref = want.norm_l2();
  if (ref == 0) return got.norm_l2();
  return (got - want).norm_l2() / ref;
}

}  // namespace paqft
