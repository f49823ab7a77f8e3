#include <gtest/gtest.h>

#include <cmath>

#include "semijulia/semigroup.hpp"

using namespace semijulia;

namespace {

RationalMap mono(int d, Complex c = 1.0) { return RationalMap::polynomial(Polynomial::monomial(d, c)); }

void expect_probabilities(const IndexDistribution& dist, const std::vector<double>& want) {
  ASSERT_EQ(dist.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(dist.probability(i), want[i], 1e-15) << "index " << i;
}

}  // namespace

TEST(ProbabilityVector, Validation) {
  EXPECT_THROW(ProbabilityVector({0.5, 0.4}), InvalidArgument);
  EXPECT_THROW(ProbabilityVector({1.5, -0.5}), InvalidArgument);
  EXPECT_THROW(ProbabilityVector({1.0, 0.0}), InvalidArgument);
  EXPECT_THROW(ProbabilityVector(std::vector<double>{}), InvalidArgument);
  const ProbabilityVector third({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  EXPECT_EQ(third[0] + third[1] + third[2], 1.0);
}

TEST(Semigroup, DegreesAndAssumptionOne) {
  const Semigroup sg({mono(2), mono(3)});
  EXPECT_EQ(sg.total_degree(), 5);
  EXPECT_DOUBLE_EQ(sg.b()[0], 0.5);
  EXPECT_THROW(Semigroup({mono(1), mono(1, 2.0)}), InvalidArgument);
  EXPECT_THROW(Semigroup({mono(2)}, ProbabilityVector({0.5, 0.5})), InvalidArgument);
}

TEST(IndexDistribution, Examples) {
  expect_probabilities(IndexDistribution(Semigroup({mono(2)})), {0.5, 0.5});
  expect_probabilities(IndexDistribution(Semigroup({mono(2), mono(3)}, ProbabilityVector({0.5, 0.5}))),
                       {0.25, 0.25, 1.0 / 6, 1.0 / 6, 1.0 / 6});
  // b' = (d_j / d) gives the uniform measure 1/d
  expect_probabilities(IndexDistribution(Semigroup({mono(2), mono(3)}, ProbabilityVector({0.4, 0.6}))),
                       {0.2, 0.2, 0.2, 0.2, 0.2});
}

TEST(IndexDistribution, BlockDecoding) {
  const IndexDistribution dist(Semigroup({mono(2), mono(3), mono(1)}, ProbabilityVector({0.2, 0.5, 0.3})));
  const std::vector<Branch> want{{0, 0}, {0, 1}, {1, 0}, {1, 1}, {1, 2}, {2, 0}};
  ASSERT_EQ(dist.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_EQ(dist.decode(i), want[i]);
  EXPECT_EQ(dist.cumulative().back(), 1.0);
}

TEST(IndexDistribution, SumsToOneAndEqualWithinBlocks) {
  SplitMix64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 1 + rng() % 6;
    std::vector<RationalMap> maps;
    std::vector<double> w(k);
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      maps.push_back(mono(j == 0 ? 2 + static_cast<int>(rng() % 5) : 1 + static_cast<int>(rng() % 6)));
      w[j] = 1e-3 + rng.uniform();
      total += w[j];
    }
    for (auto& x : w) x /= total;
    const Semigroup sg(maps, ProbabilityVector(w));
    const IndexDistribution dist(sg);
    double sum = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
      sum += dist.probability(i);
      const auto& br = dist.decode(i);
      const std::size_t first = i - br.branch;
      EXPECT_EQ(dist.probability(i), dist.probability(first));
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(SampleBranch, FrequenciesMatchPi) {
  const IndexDistribution dist(Semigroup({mono(2), mono(3)}, ProbabilityVector({0.5, 0.5})));
  constexpr int kDraws = 1'000'000;
  std::vector<double> counts(dist.size(), 0.0);
  SplitMix64 rng(2024);
  for (int n = 0; n < kDraws; ++n) counts[sample_branch(dist, rng)] += 1.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const double p = dist.probability(i);
    const double freq = counts[i] / kDraws;
    EXPECT_NEAR(freq, p, 0.003);
    EXPECT_LE(std::abs(freq - p), 5.0 * std::sqrt(p / kDraws));
  }
}

TEST(SampleBranch, DeterministicGivenSeed) {
  const IndexDistribution dist(Semigroup({mono(2), mono(3)}));
  SplitMix64 a(99), b(99);
  for (int n = 0; n < 1000; ++n) ASSERT_EQ(sample_branch(dist, a), sample_branch(dist, b));
  EXPECT_EQ(a.state(), b.state());
}

TEST(ValidateAssumptions, SquareMapExceptionalPoints) {
  const Semigroup sg({mono(2)});
  EXPECT_THROW(validate_assumptions(sg, 0.0), ExceptionalStartPoint);
  EXPECT_THROW(validate_assumptions(sg, SpherePoint::infinity()), ExceptionalStartPoint);
  const auto report = validate_assumptions(sg, 1.0);
  EXPECT_TRUE(report.has_nonlinear_generator);
  EXPECT_FALSE(report.start_point_exceptional);
  EXPECT_EQ(report.exceptional_candidates.size(), 2u);
  EXPECT_NE(report.to_text().find("UNVERIFIED"), std::string::npos);
}

TEST(ValidateAssumptions, ChebyshevOnlyInfinity) {
  const Semigroup sg({RationalMap::polynomial(Polynomial({-2.0, 0.0, 1.0}))});
  const auto report = validate_assumptions(sg, 0.0);
  ASSERT_EQ(report.exceptional_candidates.size(), 1u);
  EXPECT_TRUE(report.exceptional_candidates[0].is_infinite());
}

TEST(ValidateAssumptions, CandidatesMustBeCommonToAllGenerators) {
  // 0 is totally ramified for z^2 and z^2/4 alike; for z^2 + 1 it is not fixed.
  EXPECT_THROW(validate_assumptions(Semigroup({mono(2), mono(2, 0.25)}), 0.0), ExceptionalStartPoint);
  const Semigroup mixed({mono(2), RationalMap::polynomial(Polynomial({1.0, 0.0, 1.0}))});
  EXPECT_NO_THROW(validate_assumptions(mixed, 0.0));
  EXPECT_THROW(validate_assumptions(mixed, SpherePoint::infinity()), ExceptionalStartPoint);
}

TEST(ValidateAssumptions, RationalMapsWithoutFiniteCandidates) {
  // 1/z^2 swaps 0 and infinity: a 2-cycle, not a fixed point, so the
  // fixed-point scan does not flag it.
  const Semigroup sg({RationalMap(Polynomial{1.0}, Polynomial::monomial(2))});
  const auto report = assess_assumptions(sg, 0.0);
  EXPECT_FALSE(report.start_point_exceptional);
}

TEST(PreimagesCollapse, TaylorShiftDetectsTotalRamification) {
  // (z - 1)^3 + 1 has 1 totally ramified over 1
  const auto f = RationalMap::polynomial(Polynomial({0.0, 3.0, -3.0, 1.0}));
  EXPECT_TRUE(preimages_collapse_to(f, 1.0));
  EXPECT_FALSE(preimages_collapse_to(f, 0.0));
  EXPECT_TRUE(preimages_collapse_to(f, SpherePoint::infinity()));
  const RationalMap g(Polynomial::monomial(2), Polynomial({1.0, 1.0}));
  EXPECT_FALSE(preimages_collapse_to(g, SpherePoint::infinity()));
}
