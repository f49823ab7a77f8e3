#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "semijulia/error.hpp"
#include "semijulia/ratmap.hpp"
#include "semijulia/rng.hpp"
#include "semijulia/sphere.hpp"

namespace semijulia {

inline constexpr double kProbabilitySumTolerance = 1e-12;

// Strictly positive weights summing to one. The stored weights are adjusted
// so their floating-point sum is exactly 1.
class ProbabilityVector {
 public:
  explicit ProbabilityVector(std::vector<double> weights) : w_(std::move(weights)) {
    if (w_.empty()) throw InvalidArgument("ProbabilityVector: no weights");
    double sum = 0.0;
    for (double x : w_) {
      if (!std::isfinite(x) || !(x > 0.0)) {
        throw InvalidArgument("ProbabilityVector: weights must be strictly positive");
      }
      sum += x;
    }
    if (std::abs(sum - 1.0) > kProbabilitySumTolerance) {
      std::ostringstream os;
      os.precision(17);
      os << "ProbabilityVector: weights sum to " << sum << ", expected 1";
      throw InvalidArgument(os.str());
    }
    for (auto& x : w_) x /= sum;
    double head = 0.0;
    for (std::size_t j = 0; j + 1 < w_.size(); ++j) head += w_[j];
    w_.back() = 1.0 - head;
  }

  static ProbabilityVector uniform(std::size_t k) {
    return ProbabilityVector(std::vector<double>(k, 1.0 / static_cast<double>(k)));
  }

  std::size_t size() const noexcept { return w_.size(); }
  double operator[](std::size_t j) const { return w_.at(j); }
  const std::vector<double>& weights() const noexcept { return w_; }

 private:
  std::vector<double> w_;
};

// G = <f_1, ..., f_k> with its probability vector b.
class Semigroup {
 public:
  explicit Semigroup(std::vector<RationalMap> generators)
      : Semigroup(generators, ProbabilityVector::uniform(generators.empty() ? 1 : generators.size())) {}

  Semigroup(std::vector<RationalMap> generators, ProbabilityVector b)
      : gens_(std::move(generators)), b_(std::move(b)) {
    if (gens_.empty()) throw InvalidArgument("Semigroup: no generators");
    if (b_.size() != gens_.size()) {
      throw InvalidArgument("Semigroup: " + std::to_string(b_.size()) + " weights for " +
                            std::to_string(gens_.size()) + " generators");
    }
    bool has_nonlinear = false;
    for (const auto& g : gens_) {
      total_degree_ += g.degree();
      has_nonlinear = has_nonlinear || g.degree() >= 2;
    }
    if (!has_nonlinear) throw InvalidArgument("Semigroup: no generator of degree two or more");
  }

  const std::vector<RationalMap>& generators() const noexcept { return gens_; }
  const RationalMap& generator(std::size_t j) const { return gens_.at(j); }
  std::size_t size() const noexcept { return gens_.size(); }
  int total_degree() const noexcept { return total_degree_; }
  const ProbabilityVector& b() const noexcept { return b_; }

 private:
  std::vector<RationalMap> gens_;
  ProbabilityVector b_;
  int total_degree_ = 0;
};

struct Branch {
  std::size_t generator = 0;  // j, 0-based
  std::size_t branch = 0;     // position within the sorted preimages under f_j
  friend bool operator==(const Branch&, const Branch&) = default;
};

// The measure on the d branch indices assigning b_j / d_j to each of the d_j
// branches of generator j. Branches of one generator always share a single
// weight; there is no way to construct it otherwise.
class IndexDistribution {
 public:
  explicit IndexDistribution(const Semigroup& sg) {
    const std::size_t d = static_cast<std::size_t>(sg.total_degree());
    prob_.reserve(d);
    decode_.reserve(d);
    for (std::size_t j = 0; j < sg.size(); ++j) {
      const int dj = sg.generator(j).degree();
      const double weight = sg.b()[j] / static_cast<double>(dj);
      for (int r = 0; r < dj; ++r) {
        prob_.push_back(weight);
        decode_.push_back({j, static_cast<std::size_t>(r)});
      }
    }
    cumulative_.resize(d);
    std::partial_sum(prob_.begin(), prob_.end(), cumulative_.begin());
    cumulative_.back() = 1.0;
  }

  std::size_t size() const noexcept { return prob_.size(); }
  double probability(std::size_t i) const { return prob_.at(i); }
  const std::vector<double>& probabilities() const noexcept { return prob_; }
  const Branch& decode(std::size_t i) const { return decode_.at(i); }
  const std::vector<double>& cumulative() const noexcept { return cumulative_; }

 private:
  std::vector<double> prob_;
  std::vector<Branch> decode_;
  std::vector<double> cumulative_;
};

inline IndexDistribution build_index_distribution(const Semigroup& sg) { return IndexDistribution(sg); }

// Draws a 0-based branch index with probability pi_b(i), advancing rng. One
// draw against the cumulative table is the same as choosing f_j with
// probability b_j and then one of its d_j preimages uniformly.
inline std::size_t sample_branch(const IndexDistribution& dist, SplitMix64& rng) {
  const double u = rng.uniform();
  const auto& cum = dist.cumulative();
  const auto it = std::upper_bound(cum.begin(), cum.end(), u);
  const auto idx = static_cast<std::size_t>(it - cum.begin());
  return std::min(idx, cum.size() - 1);
}

// ---------------------------------------------------------------------------
// Assumption checks

inline constexpr double kExceptionalMatchTolerance = 1e-9;
inline constexpr double kRamificationTolerance = 1e-9;

namespace detail {

// Coefficients of p(w0 + t) in t, by repeated synthetic division.
inline std::vector<Complex> taylor_shift(std::vector<Complex> c, const Complex& w0) {
  const std::size_t n = c.size();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    for (std::size_t i = n - 1; i-- > k;) c[i] += w0 * c[i + 1];
  }
  return c;
}

}  // namespace detail

// True when every preimage of w under f equals w, i.e. w is a totally
// ramified point of f. For finite w this means numerator - w*denominator is
// c*(z - w)^degree; for infinity that f is a polynomial.
inline bool preimages_collapse_to(const RationalMap& f, const SpherePoint& w) {
  if (w.is_infinite()) return f.is_polynomial();
  const int degree = f.degree();
  const auto& n = f.numerator().coefficients();
  const auto& d = f.denominator().coefficients();
  std::vector<Complex> q(static_cast<std::size_t>(degree) + 1, Complex(0.0, 0.0));
  for (std::size_t k = 0; k < n.size(); ++k) q[k] += n[k];
  for (std::size_t k = 0; k < d.size(); ++k) q[k] -= w.value() * d[k];
  const auto t = detail::taylor_shift(std::move(q), w.value());
  double scale = 0.0;
  for (const auto& c : t) scale += std::abs(c);
  if (scale == 0.0 || std::abs(t.back()) <= kLeadingCancellation * scale) return false;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    if (std::abs(t[k]) > kRamificationTolerance * scale) return false;
  }
  return true;
}

// Fixed points of f on the sphere (finite ones from numerator - z*denominator).
// The identity map yields no finite candidates.
inline std::vector<SpherePoint> fixed_points(const RationalMap& f) {
  std::vector<SpherePoint> out;
  const auto& n = f.numerator();
  const auto& d = f.denominator();
  if (n.degree() > d.degree()) out.push_back(SpherePoint::infinity());
  const auto& nc = n.coefficients();
  const auto& dc = d.coefficients();
  std::vector<Complex> q(static_cast<std::size_t>(std::max(n.degree(), d.degree() + 1)) + 1,
                         Complex(0.0, 0.0));
  for (std::size_t k = 0; k < nc.size(); ++k) q[k] += nc[k];
  for (std::size_t k = 0; k < dc.size(); ++k) q[k + 1] -= dc[k];
  double scale = 0.0;
  for (const auto& c : q) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return out;
  while (q.size() > 1 && std::abs(q.back()) <= kLeadingCancellation * scale) q.pop_back();
  if (q.size() < 2) return out;
  for (const auto& r : polynomial_roots(Polynomial(std::move(q)))) out.emplace_back(r);
  return out;
}

struct AssumptionReport {
  bool has_nonlinear_generator = false;
  // Common fixed points of the generators that every generator ramifies
  // totally over. A heuristic superset check for the exceptional set.
  std::vector<SpherePoint> exceptional_candidates;
  bool start_point_exceptional = false;
  std::optional<SpherePoint> matched_candidate;

  std::string to_text() const {
    std::ostringstream os;
    os.precision(12);
    os << "degree >= 2 generator present: " << (has_nonlinear_generator ? "PASS" : "FAIL") << "\n";
    os << "exceptional-point candidates (heuristic):";
    if (exceptional_candidates.empty()) os << " none";
    for (const auto& c : exceptional_candidates) os << " " << c;
    os << "\n";
    os << "start point exceptional: " << (start_point_exceptional ? "YES" : "no") << "\n";
    os << "exceptional set inside Fatou set: UNVERIFIED (user-asserted)\n";
    os << "Mobius inverse semigroup condition: UNVERIFIED (user-asserted)\n";
    return os.str();
  }
};

// Non-throwing form of validate_assumptions.
inline AssumptionReport assess_assumptions(const Semigroup& sg, const SpherePoint& a) {
  AssumptionReport report;
  report.has_nonlinear_generator =
      std::any_of(sg.generators().begin(), sg.generators().end(),
                  [](const RationalMap& f) { return f.degree() >= 2; });
  for (const auto& f : sg.generators()) {
    for (const auto& w : fixed_points(f)) {
      const bool collapses = std::all_of(sg.generators().begin(), sg.generators().end(),
                                         [&](const RationalMap& g) { return preimages_collapse_to(g, w); });
      if (!collapses) continue;
      const bool seen = std::any_of(report.exceptional_candidates.begin(), report.exceptional_candidates.end(),
                                    [&](const SpherePoint& c) {
                                      return chordal_distance(c, w) <= kExceptionalMatchTolerance;
                                    });
      if (!seen) report.exceptional_candidates.push_back(w);
    }
  }
  for (const auto& c : report.exceptional_candidates) {
    if (chordal_distance(c, a) <= kExceptionalMatchTolerance) {
      report.start_point_exceptional = true;
      report.matched_candidate = c;
      break;
    }
  }
  return report;
}

// Checks what can be checked of the standing assumptions on G and the start
// point. Throws ExceptionalStartPoint when `a` is a candidate exceptional
// point.
inline AssumptionReport validate_assumptions(const Semigroup& sg, const SpherePoint& a) {
  auto report = assess_assumptions(sg, a);
  if (report.start_point_exceptional) {
    std::ostringstream os;
    os << "start point " << a << " matches exceptional candidate " << *report.matched_candidate
       << "; its backward orbit is finite";
    throw ExceptionalStartPoint(os.str());
  }
  return report;
}

}  // namespace semijulia
