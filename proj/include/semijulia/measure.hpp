#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "semijulia/backward.hpp"
#include "semijulia/error.hpp"
#include "semijulia/rng.hpp"
#include "semijulia/semigroup.hpp"
#include "semijulia/sphere.hpp"

namespace semijulia {

// Rectangular window of the plane split into nx by ny cells. Cell (ix, iy)
// covers [left + ix*dx, left + (ix+1)*dx) horizontally and
// (top - (iy+1)*dy, top - iy*dy] vertically: rows run top to bottom and the
// left and top edges are inclusive.
struct Viewport {
  Complex center{0.0, 0.0};
  double width = 1.0;
  double height = 1.0;
  int nx = 1;
  int ny = 1;

  void validate() const {
    if (!(width > 0.0) || !(height > 0.0) || !std::isfinite(width) || !std::isfinite(height)) {
      throw InvalidArgument("Viewport: width and height must be positive");
    }
    if (nx < 1 || ny < 1) throw InvalidArgument("Viewport: nx and ny must be >= 1");
  }

  double left() const noexcept { return center.real() - width / 2.0; }
  double top() const noexcept { return center.imag() + height / 2.0; }
  double dx() const noexcept { return width / nx; }
  double dy() const noexcept { return height / ny; }
  std::size_t cell_count() const noexcept { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }

  // Row-major cell index, or nullopt when p is outside (or infinite).
  std::optional<std::size_t> cell_of(const SpherePoint& p) const noexcept {
    if (p.is_infinite()) return std::nullopt;
    const double fx = std::floor((p.real() - left()) / dx());
    const double fy = std::floor((top() - p.imag()) / dy());
    if (!(fx >= 0.0 && fx < nx && fy >= 0.0 && fy < ny)) return std::nullopt;
    return static_cast<std::size_t>(fy) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(fx);
  }

  Complex cell_center(std::size_t index) const noexcept {
    const auto ix = static_cast<double>(index % static_cast<std::size_t>(nx));
    const auto iy = static_cast<double>(index / static_cast<std::size_t>(nx));
    return {left() + (ix + 0.5) * dx(), top() - (iy + 0.5) * dy()};
  }

  friend bool operator==(const Viewport&, const Viewport&) = default;
};

struct GridMeasure {
  Viewport viewport;
  std::vector<double> cells;  // row-major, nx * ny
  double outside_mass = 0.0;

  GridMeasure() = default;
  explicit GridMeasure(const Viewport& vp) : viewport(vp), cells(vp.cell_count(), 0.0) { vp.validate(); }

  double at(int ix, int iy) const {
    return cells.at(static_cast<std::size_t>(iy) * static_cast<std::size_t>(viewport.nx) +
                    static_cast<std::size_t>(ix));
  }

  void deposit(const SpherePoint& p, double mass) noexcept {
    if (const auto idx = viewport.cell_of(p)) {
      cells[*idx] += mass;
    } else {
      outside_mass += mass;
    }
  }

  double inside_mass() const noexcept {
    double s = 0.0;
    for (double c : cells) s += c;
    return s;
  }

  double total_mass() const noexcept { return inside_mass() + outside_mass; }
};

inline GridMeasure bin(const WeightedPointCloud& cloud, const Viewport& vp) {
  GridMeasure g(vp);
  for (std::size_t k = 0; k < cloud.size(); ++k) g.deposit(cloud.points[k], cloud.masses[k]);
  return g;
}

// Bins the depth-n full tree without materializing it. Deposits happen in
// the same order as bin(full_backward_tree(...)), so the result is identical.
inline GridMeasure bin_full_backward_tree(const Semigroup& sg, const SpherePoint& a, int depth, const Viewport& vp) {
  GridMeasure g(vp);
  for_each_tree_atom(sg, a, depth, [&](const SpherePoint& p, double mass) { g.deposit(p, mass); });
  return g;
}

// Half the L1 distance between two grid measures, counting the outside bin.
inline double total_variation(const GridMeasure& g1, const GridMeasure& g2) {
  if (!(g1.viewport == g2.viewport)) throw ViewportMismatch("total_variation: grids have different viewports");
  double s = 0.0;
  for (std::size_t k = 0; k < g1.cells.size(); ++k) s += std::abs(g1.cells[k] - g2.cells[k]);
  s += std::abs(g1.outside_mass - g2.outside_mass);
  return 0.5 * s;
}

// sup over a in A of the chordal distance from a to B. Brute force.
inline double directed_distance(std::span<const SpherePoint> from, std::span<const SpherePoint> to) {
  if (from.empty() || to.empty()) throw EmptySet("directed_distance: empty point set");
  double worst = 0.0;
  for (const auto& p : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : to) {
      const double dist = chordal_distance(p, q);
      if (dist < best) {
        best = dist;
        if (best <= worst) break;  // cannot raise the sup any more
      }
    }
    worst = std::max(worst, best);
  }
  return worst;
}

inline double hausdorff_distance(std::span<const SpherePoint> a, std::span<const SpherePoint> b) {
  if (a.empty() || b.empty()) throw EmptySet("hausdorff_distance: empty point set");
  return std::max(directed_distance(a, b), directed_distance(b, a));
}

// Distance from p to a finite reference set.
inline double distance_to_set(const SpherePoint& p, std::span<const SpherePoint> set) {
  if (set.empty()) throw EmptySet("distance_to_set: empty reference set");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& q : set) best = std::min(best, chordal_distance(p, q));
  return best;
}

// n equally spaced points on |z| = radius, starting at angle 0.
inline std::vector<SpherePoint> circle_samples(std::size_t n, double radius = 1.0) {
  std::vector<SpherePoint> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.emplace_back(std::polar(radius, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Test functions and the transfer operator

struct TestFunction {
  std::string name;
  std::function<double(const SpherePoint&)> eval;

  double operator()(const SpherePoint& p) const { return eval(p); }
};

inline TestFunction gaussian_bump(Complex center, double sigma) {
  std::ostringstream os;
  os << "bump(" << center.real() << "," << center.imag() << ";" << sigma << ")";
  return {os.str(), [center, sigma](const SpherePoint& p) {
            if (p.is_infinite()) return 0.0;
            return std::exp(-std::norm(p.value() - center) / (2.0 * sigma * sigma));
          }};
}

// Re z, Im z, |z|^2/(1+|z|^2) and two Gaussian bumps. Re and Im are taken as
// 0 at infinity.
inline std::vector<TestFunction> default_test_functions(Complex bump1 = {1.0, 0.0}, Complex bump2 = {-0.5, 0.5},
                                                        double sigma = 0.5) {
  return {
      {"Re z", [](const SpherePoint& p) { return p.is_infinite() ? 0.0 : p.real(); }},
      {"Im z", [](const SpherePoint& p) { return p.is_infinite() ? 0.0 : p.imag(); }},
      {"|z|^2/(1+|z|^2)",
       [](const SpherePoint& p) {
         if (p.is_infinite()) return 1.0;
         const double r2 = std::norm(p.value());
         return r2 / (1.0 + r2);
       }},
      gaussian_bump(bump1, sigma),
      gaussian_bump(bump2, sigma),
  };
}

// (T phi)(z) = sum_i pi_b(i) phi(g_i z).
inline double apply_transfer_operator(const Semigroup& sg, const IndexDistribution& dist, const TestFunction& phi,
                                      const SpherePoint& z) {
  const auto pre = all_branch_preimages(sg, z);
  double s = 0.0;
  for (std::size_t i = 0; i < pre.size(); ++i) s += dist.probability(i) * phi(pre[i]);
  return s;
}

inline double apply_transfer_operator(const Semigroup& sg, const TestFunction& phi, const SpherePoint& z) {
  return apply_transfer_operator(sg, IndexDistribution(sg), phi, z);
}

struct InvarianceEntry {
  std::string name;
  double integral = 0.0;  // <phi, mu>
  double discrepancy = 0.0;  // |<T phi, mu> - <phi, mu>|
};

struct InvarianceOptions {
  // Above this many atoms, estimate with this many mass-weighted draws.
  std::optional<std::size_t> max_atoms;
  std::uint64_t seed = 0;
};

// |<T phi, mu> - <phi, mu>| for each phi; small values mean the cloud is
// nearly invariant under the adjoint transfer operator. Preimages of each
// atom are computed once and shared by all test functions.
inline std::vector<InvarianceEntry> check_invariance(const Semigroup& sg, const WeightedPointCloud& cloud,
                                                     const std::vector<TestFunction>& phis,
                                                     const InvarianceOptions& opts = {}) {
  const IndexDistribution dist(sg);
  std::vector<double> diff(phis.size(), 0.0);
  std::vector<double> integral(phis.size(), 0.0);

  auto accumulate = [&](const SpherePoint& z, double mass) {
    const auto pre = all_branch_preimages(sg, z);
    for (std::size_t f = 0; f < phis.size(); ++f) {
      double t = 0.0;
      for (std::size_t i = 0; i < pre.size(); ++i) t += dist.probability(i) * phis[f](pre[i]);
      const double v = phis[f](z);
      diff[f] += mass * (t - v);
      integral[f] += mass * v;
    }
  };

  if (opts.max_atoms && cloud.size() > *opts.max_atoms) {
    std::vector<double> cum(cloud.size());
    std::partial_sum(cloud.masses.begin(), cloud.masses.end(), cum.begin());
    const double total = cum.back();
    SplitMix64 rng(opts.seed);
    const double w = total / static_cast<double>(*opts.max_atoms);
    for (std::size_t s = 0; s < *opts.max_atoms; ++s) {
      const double u = rng.uniform() * total;
      auto k = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
      accumulate(cloud.points[std::min(k, cloud.size() - 1)], w);
    }
  } else {
    for (std::size_t k = 0; k < cloud.size(); ++k) accumulate(cloud.points[k], cloud.masses[k]);
  }

  std::vector<InvarianceEntry> out;
  out.reserve(phis.size());
  for (std::size_t f = 0; f < phis.size(); ++f) out.push_back({phis[f].name, integral[f], std::abs(diff[f])});
  return out;
}

// Per-step distance from the orbit to a reference description of J(G).
inline std::vector<double> distance_decay_profile(const BackwardOrbit& orbit,
                                                  const std::function<double(const SpherePoint&)>& distance_to_reference) {
  std::vector<double> out;
  out.reserve(orbit.size());
  for (const auto& p : orbit.points) out.push_back(distance_to_reference(p));
  return out;
}

inline std::vector<double> distance_decay_profile(const BackwardOrbit& orbit, std::span<const SpherePoint> reference) {
  if (reference.empty()) throw EmptySet("distance_decay_profile: empty reference set");
  return distance_decay_profile(orbit, [reference](const SpherePoint& p) { return distance_to_set(p, reference); });
}

// Largest distance from a reference sample to its nearest neighbour in the
// same set: what a finite sampling of a curve can resolve.
inline double sampling_gap(std::span<const SpherePoint> reference) {
  if (reference.size() < 2) return 0.0;
  double gap = 0.0;
  for (std::size_t k = 0; k < reference.size(); ++k) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < reference.size(); ++j) {
      if (j != k) best = std::min(best, chordal_distance(reference[k], reference[j]));
    }
    gap = std::max(gap, best);
  }
  return gap;
}

// ---------------------------------------------------------------------------
// Grid export
//
//   GRIDMEASURE 1
//   viewport <center.re> <center.im> <width> <height>
//   size <nx> <ny>
//   outside <mass>
//   <ny lines of nx cell masses, top row first>

inline void write_grid(std::ostream& os, const GridMeasure& g) {
  const auto& vp = g.viewport;
  os << std::setprecision(17);
  os << "GRIDMEASURE 1\n";
  os << "viewport " << vp.center.real() << " " << vp.center.imag() << " " << vp.width << " " << vp.height << "\n";
  os << "size " << vp.nx << " " << vp.ny << "\n";
  os << "outside " << g.outside_mass << "\n";
  for (int iy = 0; iy < vp.ny; ++iy) {
    for (int ix = 0; ix < vp.nx; ++ix) {
      if (ix) os << ' ';
      os << g.at(ix, iy);
    }
    os << '\n';
  }
}

inline std::string grid_to_string(const GridMeasure& g) {
  std::ostringstream os;
  write_grid(os, g);
  return os.str();
}

inline GridMeasure read_grid(std::istream& is) {
  auto expect = [&](const std::string& word) {
    std::string got;
    if (!(is >> got) || got != word) throw InvalidArgument("read_grid: expected '" + word + "'");
  };
  expect("GRIDMEASURE");
  int version = 0;
  if (!(is >> version) || version != 1) throw InvalidArgument("read_grid: unsupported version");
  Viewport vp;
  double cre = 0, cim = 0;
  expect("viewport");
  if (!(is >> cre >> cim >> vp.width >> vp.height)) throw InvalidArgument("read_grid: bad viewport line");
  vp.center = {cre, cim};
  expect("size");
  if (!(is >> vp.nx >> vp.ny)) throw InvalidArgument("read_grid: bad size line");
  GridMeasure g(vp);
  expect("outside");
  if (!(is >> g.outside_mass)) throw InvalidArgument("read_grid: bad outside line");
  for (auto& c : g.cells) {
    if (!(is >> c)) throw InvalidArgument("read_grid: truncated cell data");
  }
  return g;
}

inline void write_grid_file(const std::string& path, const GridMeasure& g) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_grid(os, g);
  if (!os) throw Error("write failed for " + path);
}

}  // namespace semijulia
