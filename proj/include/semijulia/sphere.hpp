#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <ostream>

#include "semijulia/error.hpp"

namespace semijulia {

using Complex = std::complex<double>;

// A point of the extended complex plane. Finite points are stored as plane
// coordinates; infinity has a single canonical encoding and is only ever
// observed through is_infinite().
class SpherePoint {
 public:
  constexpr SpherePoint() = default;

  SpherePoint(Complex z) {  // NOLINT(google-explicit-constructor)
    if (std::isnan(z.real()) || std::isnan(z.imag())) {
      throw InvalidArgument("SpherePoint: NaN coordinate");
    }
    if (std::isinf(z.real()) || std::isinf(z.imag())) {
      z_ = kInfinityCode;
    } else {
      z_ = z;
    }
  }

  SpherePoint(double re, double im = 0.0) : SpherePoint(Complex(re, im)) {}

  static SpherePoint infinity() {
    SpherePoint p;
    p.z_ = kInfinityCode;
    return p;
  }

  bool is_infinite() const noexcept { return std::isinf(z_.real()); }
  bool is_finite() const noexcept { return !is_infinite(); }

  // Plane coordinates. Only meaningful for finite points.
  const Complex& value() const noexcept { return z_; }
  double real() const noexcept { return z_.real(); }
  double imag() const noexcept { return z_.imag(); }

  // 1/z on the sphere, with 0 <-> infinity.
  SpherePoint reciprocal() const {
    if (is_infinite()) return SpherePoint(0.0);
    if (z_ == Complex(0.0, 0.0)) return infinity();
    return SpherePoint(1.0 / z_);
  }

  friend bool operator==(const SpherePoint& a, const SpherePoint& b) noexcept {
    if (a.is_infinite() || b.is_infinite()) return a.is_infinite() == b.is_infinite();
    return a.z_ == b.z_;
  }

  friend std::ostream& operator<<(std::ostream& os, const SpherePoint& p) {
    if (p.is_infinite()) return os << "inf";
    return os << "(" << p.real() << "," << p.imag() << ")";
  }

 private:
  static constexpr Complex kInfinityCode{std::numeric_limits<double>::infinity(), 0.0};
  Complex z_{0.0, 0.0};
};

// Chordal metric 2|p-q| / (sqrt(1+|p|^2) sqrt(1+|q|^2)), extended to infinity.
// Bounded by 2; antipodal points (e.g. 0 and infinity) attain it.
inline double chordal_distance(const SpherePoint& p, const SpherePoint& q) {
  if (p.is_infinite() && q.is_infinite()) return 0.0;
  if (p.is_infinite()) return 2.0 / std::hypot(1.0, std::abs(q.value()));
  if (q.is_infinite()) return 2.0 / std::hypot(1.0, std::abs(p.value()));
  Complex a = p.value();
  Complex b = q.value();
  // Inversion is an isometry; use it to keep both moduli <= 1 when possible
  // so |a-b| cannot overflow.
  if (std::abs(a) > 1.0 && std::abs(b) > 1.0) {
    a = 1.0 / a;
    b = 1.0 / b;
  }
  double d = 2.0 * std::abs(a - b) / (std::hypot(1.0, std::abs(a)) * std::hypot(1.0, std::abs(b)));
  return d > 2.0 ? 2.0 : d;
}

// Chordal distance from p to the circle |z| = radius (radius > 0). The
// nearest circle point is the radial projection of p.
inline double chordal_distance_to_circle(const SpherePoint& p, double radius = 1.0) {
  if (p.is_infinite()) return chordal_distance(p, SpherePoint(radius));
  const double r = std::abs(p.value());
  if (r == 0.0) return chordal_distance(p, SpherePoint(radius));
  return chordal_distance(p, SpherePoint(p.value() * (radius / r)));
}

}  // namespace semijulia
