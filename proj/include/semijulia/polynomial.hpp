#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <sstream>
#include <vector>

#include "semijulia/error.hpp"
#include "semijulia/sphere.hpp"

namespace semijulia {

// Complex polynomial with coefficients in ascending order. Trailing exact
// zeros are dropped on construction so the leading coefficient is nonzero.
class Polynomial {
 public:
  Polynomial() : coeffs_{Complex(1.0, 0.0)} {}

  explicit Polynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
    while (!coeffs_.empty() && coeffs_.back() == Complex(0.0, 0.0)) coeffs_.pop_back();
    if (coeffs_.empty()) throw InvalidArgument("Polynomial: all coefficients are zero");
    for (const auto& c : coeffs_) {
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
        throw InvalidArgument("Polynomial: non-finite coefficient");
      }
    }
  }

  Polynomial(std::initializer_list<Complex> coeffs) : Polynomial(std::vector<Complex>(coeffs)) {}

  static Polynomial monomial(int degree, Complex c = 1.0) {
    std::vector<Complex> v(static_cast<std::size_t>(degree) + 1, Complex(0.0, 0.0));
    v.back() = c;
    return Polynomial(std::move(v));
  }

  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Complex>& coefficients() const noexcept { return coeffs_; }
  const Complex& leading() const noexcept { return coeffs_.back(); }
  const Complex& operator[](std::size_t k) const { return coeffs_.at(k); }

  Complex operator()(const Complex& z) const noexcept {
    Complex acc(0.0, 0.0);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  // Value at 1/u of z^degree * p(1/z), i.e. the reversed polynomial at u.
  Complex reversed_at(const Complex& u) const noexcept {
    Complex acc(0.0, 0.0);
    for (const auto& c : coeffs_) acc = acc * u + c;
    return acc;
  }

  std::string to_string() const {
    std::ostringstream os;
    os.precision(17);
    os << "[";
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
      if (k) os << ", ";
      os << "(" << coeffs_[k].real() << "," << coeffs_[k].imag() << ")";
    }
    os << "]";
    return os.str();
  }

 private:
  std::vector<Complex> coeffs_;
};

struct RootFinderOptions {
  double residual_tolerance = 1e-12;
  int max_iterations = 500;
};

namespace detail {

// Horner evaluation of p and p' together.
inline void eval_with_derivative(std::span<const Complex> c, const Complex& z, Complex& p,
                                 Complex& dp) noexcept {
  p = c.back();
  dp = Complex(0.0, 0.0);
  for (std::size_t k = c.size() - 1; k-- > 0;) {
    dp = dp * z + p;
    p = p * z + c[k];
  }
}

// Sum of |c_k| * max(1,|z|)^k: the scale against which a residual |p(z)| is
// judged. Keeps the test meaningful for clustered roots, where the relative
// backward error stays O(1) until the cluster collapses.
inline double residual_scale(std::span<const Complex> c, double modulus) noexcept {
  const double r = std::max(1.0, modulus);
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * r + std::abs(c[k]);
  return acc;
}

}  // namespace detail

// All roots of a polynomial of degree >= 1, repeated according to
// multiplicity (multiple roots come back as clusters), via Aberth-Ehrlich
// simultaneous iteration on the monic-normalized polynomial. Initial guesses
// sit on a circle of radius 1 + max|a_k/a_n|; each root gets one Newton
// polish after convergence. Throws SolverDivergence when the residual
// tolerance is not reached within the iteration budget.
inline std::vector<Complex> polynomial_roots(const Polynomial& poly,
                                             const RootFinderOptions& opts = {}) {
  const int n = poly.degree();
  if (n < 1) return {};
  const auto& raw = poly.coefficients();
  if (n == 1) return {-raw[0] / raw[1]};

  std::vector<Complex> a(raw.size());
  const Complex lead = raw.back();
  double max_ratio = 0.0;
  for (std::size_t k = 0; k < raw.size(); ++k) {
    a[k] = raw[k] / lead;
    if (k + 1 < raw.size()) max_ratio = std::max(max_ratio, std::abs(a[k]));
  }
  a.back() = Complex(1.0, 0.0);

  std::vector<Complex> w(static_cast<std::size_t>(n));
  const double radius = 1.0 + max_ratio;
  for (int k = 0; k < n; ++k) {
    // Offset angle avoids starting symmetric about the real axis.
    const double theta = 2.0 * std::numbers::pi * k / n + 0.4;
    w[static_cast<std::size_t>(k)] = std::polar(radius, theta);
  }

  std::vector<bool> done(static_cast<std::size_t>(n), false);
  int remaining = n;
  for (int iter = 0; iter < opts.max_iterations && remaining > 0; ++iter) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (done[i]) continue;
      Complex p, dp;
      detail::eval_with_derivative(a, w[i], p, dp);
      if (std::abs(p) <= opts.residual_tolerance * detail::residual_scale(a, std::abs(w[i]))) {
        done[i] = true;
        --remaining;
        continue;
      }
      Complex repulsion(0.0, 0.0);
      for (std::size_t j = 0; j < w.size(); ++j) {
        if (j == i) continue;
        Complex diff = w[i] - w[j];
        if (diff == Complex(0.0, 0.0)) diff = Complex(1e-300, 0.0);
        repulsion += 1.0 / diff;
      }
      Complex step;
      if (dp == Complex(0.0, 0.0)) {
        // Stationary point of p: nudge off it.
        step = Complex(1e-8 * std::max(1.0, std::abs(w[i])), 0.0);
      } else {
        const Complex newton = p / dp;
        step = newton / (1.0 - newton * repulsion);
      }
      if (std::isfinite(step.real()) && std::isfinite(step.imag())) w[i] -= step;
    }
  }
  if (remaining > 0) {
    throw SolverDivergence("root finder did not converge in " +
                           std::to_string(opts.max_iterations) +
                           " iterations; coefficients " + poly.to_string());
  }

  for (auto& root : w) {
    Complex p, dp;
    detail::eval_with_derivative(a, root, p, dp);
    if (dp == Complex(0.0, 0.0)) continue;
    const Complex polished = root - p / dp;
    Complex q, dq;
    detail::eval_with_derivative(a, polished, q, dq);
    if (std::isfinite(polished.real()) && std::isfinite(polished.imag()) && std::abs(q) < std::abs(p)) {
      root = polished;
    }
  }
  return w;
}

}  // namespace semijulia
