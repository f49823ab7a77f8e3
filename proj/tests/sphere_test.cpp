#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "semijulia/rng.hpp"
#include "semijulia/sphere.hpp"

using namespace semijulia;

namespace {

SpherePoint random_point(SplitMix64& rng, double scale) {
  const double r = scale * std::tan(0.5 * std::numbers::pi * rng.uniform() * 0.999);
  return SpherePoint(std::polar(r, 2.0 * std::numbers::pi * rng.uniform()));
}

}  // namespace

TEST(ChordalDistance, Examples) {
  EXPECT_EQ(chordal_distance(0.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(chordal_distance(0.0, SpherePoint::infinity()), 2.0);
  // 2*2 / (sqrt2*sqrt2)
  EXPECT_NEAR(chordal_distance(1.0, -1.0), 2.0, 1e-15);
  EXPECT_EQ(chordal_distance(SpherePoint::infinity(), SpherePoint::infinity()), 0.0);
}

TEST(ChordalDistance, MatchesFormulaForModerateValues) {
  const Complex p(0.3, -1.2), q(-2.0, 0.5);
  const double expected = 2.0 * std::abs(p - q) / (std::sqrt(1.0 + std::norm(p)) * std::sqrt(1.0 + std::norm(q)));
  EXPECT_NEAR(chordal_distance(p, q), expected, 1e-15);
}

TEST(ChordalDistance, HugeModuliDoNotOverflow) {
  const SpherePoint big(1e300, 0.0), big2(-1e300, 0.0);
  EXPECT_NEAR(chordal_distance(big, big2), 0.0, 1e-200);
  EXPECT_NEAR(chordal_distance(big, SpherePoint::infinity()), 0.0, 1e-250);
  EXPECT_NEAR(chordal_distance(big, 0.0), 2.0, 1e-12);
}

TEST(ChordalDistance, TriangleInequalityOnRandomTriples) {
  SplitMix64 rng(11);
  for (int k = 0; k < 20000; ++k) {
    const auto p = random_point(rng, 1.0), q = random_point(rng, 1.0), r = random_point(rng, 1.0);
    EXPECT_LE(chordal_distance(p, r), chordal_distance(p, q) + chordal_distance(q, r) + 1e-12);
    EXPECT_NEAR(chordal_distance(p, q), chordal_distance(q, p), 0.0);
    EXPECT_LE(chordal_distance(p, q), 2.0);
  }
}

TEST(ChordalDistance, InversionIsAnIsometry) {
  SplitMix64 rng(12);
  for (int k = 0; k < 20000; ++k) {
    const auto p = random_point(rng, 2.0), q = random_point(rng, 0.5);
    if (p.value() == Complex(0.0) || q.value() == Complex(0.0)) continue;
    EXPECT_NEAR(chordal_distance(p, q), chordal_distance(p.reciprocal(), q.reciprocal()), 1e-9);
  }
}

TEST(SpherePoint, SingleInfinity) {
  const double inf = std::numeric_limits<double>::infinity();
  const SpherePoint a(Complex(inf, 0.0)), b(Complex(-inf, 3.0)), c(Complex(1.0, -inf));
  EXPECT_TRUE(a.is_infinite());
  EXPECT_EQ(a, b);
  EXPECT_EQ(b, c);
  EXPECT_EQ(a, SpherePoint::infinity());
  EXPECT_EQ(SpherePoint(0.0).reciprocal(), SpherePoint::infinity());
  EXPECT_EQ(SpherePoint::infinity().reciprocal(), SpherePoint(0.0));
}

TEST(SpherePoint, RejectsNaN) {
  EXPECT_THROW(SpherePoint(std::nan(""), 0.0), InvalidArgument);
}

TEST(ChordalDistance, ToCircle) {
  EXPECT_NEAR(chordal_distance_to_circle(Complex(0.0, 1.0)), 0.0, 1e-15);
  EXPECT_NEAR(chordal_distance_to_circle(3.0), chordal_distance(3.0, 1.0), 1e-15);
  EXPECT_NEAR(chordal_distance_to_circle(SpherePoint::infinity()), std::sqrt(2.0), 1e-15);
}
