#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "semijulia/backward.hpp"
#include "semijulia/measure.hpp"

using namespace semijulia;

namespace {

RationalMap mono(int d, Complex c = 1.0) { return RationalMap::polynomial(Polynomial::monomial(d, c)); }

const Semigroup& square() {
  static const Semigroup sg({mono(2)});
  return sg;
}

const Semigroup& annulus() {
  static const Semigroup sg({mono(2), mono(2, 0.25)}, ProbabilityVector({0.5, 0.5}));
  return sg;
}

// Matches the multiset `got` against `want` greedily within tol.
void expect_same_atoms(const WeightedPointCloud& got, const std::vector<std::pair<SpherePoint, double>>& want, double tol) {
  ASSERT_EQ(got.size(), want.size());
  std::vector<bool> used(want.size(), false);
  for (std::size_t k = 0; k < got.size(); ++k) {
    bool found = false;
    for (std::size_t j = 0; j < want.size() && !found; ++j) {
      if (!used[j] && chordal_distance(got.points[k], want[j].first) <= tol &&
          std::abs(got.masses[k] - want[j].second) <= 1e-15) {
        used[j] = found = true;
      }
    }
    EXPECT_TRUE(found) << "unexpected atom " << got.points[k] << " mass " << got.masses[k];
  }
}

}  // namespace

TEST(FullBackwardTree, Examples) {
  expect_same_atoms(full_backward_tree(square(), 1.0, 1), {{-1.0, 0.5}, {1.0, 0.5}}, 1e-14);
  expect_same_atoms(full_backward_tree(square(), 1.0, 2),
                    {{-1.0, 0.25}, {1.0, 0.25}, {Complex(0, -1), 0.25}, {Complex(0, 1), 0.25}}, 1e-14);
  expect_same_atoms(full_backward_tree(annulus(), 1.0, 1), {{-1.0, 0.25}, {1.0, 0.25}, {-2.0, 0.25}, {2.0, 0.25}}, 1e-14);
  const auto zero_depth = full_backward_tree(square(), 3.0, 0);
  ASSERT_EQ(zero_depth.size(), 1u);
  EXPECT_EQ(zero_depth.points[0], SpherePoint(3.0));
}

TEST(FullBackwardTree, MassIsConserved) {
  const Semigroup sg({mono(2), RationalMap::polynomial(Polynomial({-1.0, 0.0, 1.0})), mono(3, 0.5)},
                     ProbabilityVector({0.2, 0.3, 0.5}));
  for (int n = 0; n <= 6; ++n) {
    const auto tree = full_backward_tree(sg, Complex(0.3, 0.2), n);
    EXPECT_EQ(tree.size(), static_cast<std::size_t>(std::pow(7, n)));
    EXPECT_NEAR(tree.total_mass(), 1.0, 1e-9);
  }
}

TEST(FullBackwardTree, LevelRecursionAndForwardConsistency) {
  const IndexDistribution dist(annulus());
  const auto level3 = full_backward_tree(annulus(), Complex(0.5, 0.7), 3);
  const auto level4 = full_backward_tree(annulus(), Complex(0.5, 0.7), 4);
  const std::size_t d = dist.size();
  ASSERT_EQ(level4.size(), level3.size() * d);
  for (std::size_t k = 0; k < level3.size(); ++k) {
    for (std::size_t i = 0; i < d; ++i) {
      const auto& child = level4.points[k * d + i];
      // child is branch i of the parent: maps forward onto it under f_j
      const auto& f = annulus().generator(dist.decode(i).generator);
      EXPECT_LE(chordal_distance(evaluate(f, child), level3.points[k]), 1e-9);
      EXPECT_LE(chordal_distance(child, branch_preimage(annulus(), dist, i, level3.points[k])), 1e-9);
      EXPECT_DOUBLE_EQ(level4.masses[k * d + i], level3.masses[k] * dist.probability(i));
    }
  }
}

TEST(FullBackwardTree, SupportIndependentOfB) {
  const Semigroup a({mono(2), mono(2, 0.25)}, ProbabilityVector({0.5, 0.5}));
  const Semigroup b({mono(2), mono(2, 0.25)}, ProbabilityVector({0.1, 0.9}));
  const auto ta = full_backward_tree(a, 1.0, 4);
  const auto tb = full_backward_tree(b, 1.0, 4);
  ASSERT_EQ(ta.size(), tb.size());
  for (std::size_t k = 0; k < ta.size(); ++k) EXPECT_EQ(ta.points[k], tb.points[k]);
}

TEST(FullBackwardTree, BudgetExceeded) {
  EXPECT_THROW(full_backward_tree(square(), 1.0, 25), BudgetExceeded);
  EXPECT_THROW(full_backward_tree(square(), 1.0, 5, 16), BudgetExceeded);
  EXPECT_NO_THROW(full_backward_tree(square(), 1.0, 4, 16));
}

TEST(FullBackwardTree, StreamingTraversalMatchesLevels) {
  const auto tree = full_backward_tree(annulus(), 1.0, 5);
  std::size_t k = 0;
  for_each_tree_atom(annulus(), 1.0, 5, [&](const SpherePoint& p, double m) {
    ASSERT_LT(k, tree.size());
    EXPECT_EQ(p, tree.points[k]);
    EXPECT_EQ(m, tree.masses[k]);
    ++k;
  });
  EXPECT_EQ(k, tree.size());
}

TEST(RandomBackwardOrbit, StaysOnUnitCircle) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto orbit = random_backward_orbit(square(), 1.0, 100, seed);
    ASSERT_EQ(orbit.size(), 100u);
    ASSERT_EQ(orbit.symbols.size(), 100u);
    for (const auto& p : orbit.points) EXPECT_LE(std::abs(std::abs(p.value()) - 1.0), 1e-9);
  }
}

TEST(RandomBackwardOrbit, ModulusRecursionFromThree) {
  const auto orbit = random_backward_orbit(square(), 3.0, 40, 17);
  for (std::size_t m = 1; m <= orbit.size(); ++m) {
    const double expected = std::pow(3.0, std::ldexp(1.0, -static_cast<int>(m)));
    EXPECT_NEAR(std::abs(orbit.points[m - 1].value()), expected, 1e-12);
  }
  EXPECT_LE(std::abs(std::abs(orbit.points.back().value()) - 1.0), 1e-9);
}

TEST(RandomBackwardOrbit, DeterministicAndForwardConsistent) {
  const auto a = random_backward_orbit(annulus(), Complex(0.1, 0.9), 2000, 42);
  const auto b = random_backward_orbit(annulus(), Complex(0.1, 0.9), 2000, 42);
  EXPECT_EQ(a.symbols, b.symbols);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a.points[k], b.points[k]);

  const IndexDistribution dist(annulus());
  SpherePoint parent = a.start;
  for (std::size_t m = 0; m < a.size(); ++m) {
    ASSERT_LT(a.symbols[m], dist.size());
    const auto& f = annulus().generator(dist.decode(a.symbols[m]).generator);
    EXPECT_LE(chordal_distance(evaluate(f, a.points[m]), parent), 1e-9);
    parent = a.points[m];
  }
  const auto c = random_backward_orbit(annulus(), Complex(0.1, 0.9), 2000, 43);
  EXPECT_NE(a.symbols, c.symbols);
}

TEST(EmpiricalMeasure, Examples) {
  const auto orbit = random_backward_orbit(square(), 1.0, 5, 9);
  const auto all = empirical_measure(orbit, 0);
  ASSERT_EQ(all.size(), 5u);
  for (double m : all.masses) EXPECT_DOUBLE_EQ(m, 0.2);
  const auto last = empirical_measure(orbit, 4);
  ASSERT_EQ(last.size(), 1u);
  EXPECT_EQ(last.masses[0], 1.0);
  EXPECT_EQ(last.points[0], orbit.points[4]);
  EXPECT_THROW(empirical_measure(orbit, 5), EmptyTail);
}

TEST(RunChains, SingleChainEqualsEmpiricalMeasure) {
  const auto merged = run_chains(annulus(), 1.0, 1000, 100, {77});
  const auto single = empirical_measure(random_backward_orbit(annulus(), 1.0, 1000, 77), 100);
  ASSERT_EQ(merged.size(), single.size());
  for (std::size_t k = 0; k < merged.size(); ++k) {
    EXPECT_EQ(merged.points[k], single.points[k]);
    EXPECT_EQ(merged.masses[k], single.masses[k]);
  }
}

TEST(RunChains, TwoChainsShareMass) {
  const auto merged = run_chains(square(), 1.0, 600, 100, {1, 2});
  ASSERT_EQ(merged.size(), 1000u);
  for (double m : merged.masses) EXPECT_DOUBLE_EQ(m, 1.0 / 1000.0);
  EXPECT_NEAR(merged.total_mass(), 1.0, 1e-12);
}

TEST(RunChains, IndependentOfOrderAndThreads) {
  const Viewport vp{{0.0, 0.0}, 5.0, 5.0, 64, 64};
  const auto seeds = chain_seeds(5, 4);
  auto permuted = seeds;
  std::reverse(permuted.begin(), permuted.end());
  const auto g1 = bin(run_chains(annulus(), 1.0, 5000, 100, seeds, 1), vp);
  const auto g2 = bin(run_chains(annulus(), 1.0, 5000, 100, permuted, 3), vp);
  EXPECT_EQ(g1.cells, g2.cells);
  EXPECT_EQ(g1.outside_mass, g2.outside_mass);
}

TEST(RunChains, RejectsDuplicateSeedsAndEmptyTail) {
  EXPECT_THROW(run_chains(square(), 1.0, 100, 10, {3, 3}), InvalidArgument);
  EXPECT_THROW(run_chains(square(), 1.0, 100, 100, {3}), EmptyTail);
}

// Conditioned on the chain being in a fixed cell, the next branch index
// still follows pi_b and the next point is the labelled preimage.
TEST(MarkovProperty, TransitionsFromAFixedCell) {
  const IndexDistribution dist(square());
  const auto orbit = random_backward_orbit(square(), dist, 1.0, 2'000'000, 31);
  const Viewport vp{{0.0, 0.0}, 3.0, 3.0, 8, 8};
  const auto target = vp.cell_of(SpherePoint(1.0));
  ASSERT_TRUE(target.has_value());
  std::vector<double> counts(dist.size(), 0.0);
  double visits = 0.0;
  for (std::size_t m = 0; m + 1 < orbit.size(); ++m) {
    if (vp.cell_of(orbit.points[m]) != target) continue;
    visits += 1.0;
    counts[orbit.symbols[m + 1]] += 1.0;
    if (visits <= 2000) {
      const auto pre = all_branch_preimages(square(), orbit.points[m]);
      EXPECT_EQ(pre[orbit.symbols[m + 1]], orbit.points[m + 1]);
    }
  }
  ASSERT_GE(visits, 1e5);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    EXPECT_LE(std::abs(counts[i] / visits - dist.probability(i)), 5.0 * std::sqrt(dist.probability(i) / visits));
  }
}

TEST(CesaroAverages, RealPartAveragesToZeroOnTheCircle) {
  const auto orbit = random_backward_orbit(square(), 1.0, 1'000'000, 123);
  double sum = 0.0;
  for (const auto& p : orbit.points) sum += p.real();
  EXPECT_LE(std::abs(sum / static_cast<double>(orbit.size())), 0.01);
}
