#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "semijulia/error.hpp"
#include "semijulia/polynomial.hpp"
#include "semijulia/sphere.hpp"

namespace semijulia {

// Relative size below which a leading coefficient of numerator - z*denominator
// is treated as cancelled, sending the corresponding preimage to infinity.
inline constexpr double kLeadingCancellation = 1e-14;

// Numerators and denominators whose roots come this close are rejected as
// sharing a factor.
inline constexpr double kCommonRootTolerance = 1e-10;

// A non-constant rational map numerator / denominator on the sphere. Immutable.
class RationalMap {
 public:
  RationalMap(Polynomial numerator, Polynomial denominator)
      : num_(std::move(numerator)), den_(std::move(denominator)) {
    degree_ = std::max(num_.degree(), den_.degree());
    if (degree_ < 1) throw InvalidArgument("RationalMap: constant map (degree 0)");
    if (num_.degree() >= 1 && den_.degree() >= 1) {
      const auto zn = polynomial_roots(num_);
      const auto zd = polynomial_roots(den_);
      for (const auto& r : zn) {
        for (const auto& s : zd) {
          if (chordal_distance(r, s) <= kCommonRootTolerance) {
            throw InvalidArgument("RationalMap: numerator and denominator share a root near " +
                                  std::to_string(r.real()) + "+" + std::to_string(r.imag()) + "i");
          }
        }
      }
    }
  }

  static RationalMap polynomial(Polynomial p) { return RationalMap(std::move(p), Polynomial{1.0}); }

  const Polynomial& numerator() const noexcept { return num_; }
  const Polynomial& denominator() const noexcept { return den_; }
  int degree() const noexcept { return degree_; }
  bool is_polynomial() const noexcept { return den_.degree() == 0; }

  std::string to_string() const { return num_.to_string() + " / " + den_.to_string(); }

 private:
  Polynomial num_;
  Polynomial den_;
  int degree_ = 0;
};

inline SpherePoint evaluate(const RationalMap& f, const SpherePoint& z) {
  const auto& n = f.numerator();
  const auto& d = f.denominator();
  if (z.is_infinite()) {
    if (n.degree() > d.degree()) return SpherePoint::infinity();
    if (n.degree() < d.degree()) return SpherePoint(0.0);
    return SpherePoint(n.leading() / d.leading());
  }
  const Complex w = z.value();
  Complex value;
  if (std::abs(w) <= 1.0) {
    const Complex den = d(w);
    if (den == Complex(0.0, 0.0)) return SpherePoint::infinity();
    value = n(w) / den;
  } else {
    // f(w) = w^(deg n - deg d) * n_rev(1/w) / d_rev(1/w); avoids overflow of
    // large powers in Horner form.
    const Complex u = 1.0 / w;
    const Complex den = d.reversed_at(u);
    if (den == Complex(0.0, 0.0)) return SpherePoint::infinity();
    value = n.reversed_at(u) / den;
    const int shift = n.degree() - d.degree();
    if (shift > 0) {
      for (int k = 0; k < shift; ++k) value *= w;
    } else {
      for (int k = 0; k < -shift; ++k) value *= u;
    }
  }
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) return SpherePoint::infinity();
  return SpherePoint(value);
}

// Lexicographic (real, imag) order with infinity last: the fixed labeling of
// the preimage branches.
inline bool branch_order(const SpherePoint& a, const SpherePoint& b) noexcept {
  if (a.is_infinite() || b.is_infinite()) return !a.is_infinite() && b.is_infinite();
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

// All degree(f) solutions w of f(w) = z, repeated by multiplicity and sorted
// by branch_order. When the equation loses degree at infinity the point at
// infinity is appended once per lost degree.
inline std::vector<SpherePoint> preimages(const RationalMap& f, const SpherePoint& z,
                                          const RootFinderOptions& opts = {}) {
  const int degree = f.degree();
  std::vector<SpherePoint> out;
  out.reserve(static_cast<std::size_t>(degree));

  std::vector<Complex> roots;
  if (z.is_infinite()) {
    roots = polynomial_roots(f.denominator(), opts);
  } else {
    const auto& n = f.numerator().coefficients();
    const auto& d = f.denominator().coefficients();
    std::vector<Complex> q(static_cast<std::size_t>(degree) + 1, Complex(0.0, 0.0));
    for (std::size_t k = 0; k < n.size(); ++k) q[k] += n[k];
    for (std::size_t k = 0; k < d.size(); ++k) q[k] -= z.value() * d[k];
    double scale = 0.0;
    for (const auto& c : q) scale = std::max(scale, std::abs(c));
    while (q.size() > 1 && std::abs(q.back()) <= kLeadingCancellation * scale) q.pop_back();
    if (q.size() > 1) roots = polynomial_roots(Polynomial(std::move(q)), opts);
  }
  for (const auto& r : roots) out.emplace_back(r);
  while (static_cast<int>(out.size()) < degree) out.push_back(SpherePoint::infinity());
  std::sort(out.begin(), out.end(), branch_order);
  return out;
}

}  // namespace semijulia
