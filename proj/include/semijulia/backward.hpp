#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "semijulia/error.hpp"
#include "semijulia/ratmap.hpp"
#include "semijulia/rng.hpp"
#include "semijulia/semigroup.hpp"
#include "semijulia/sphere.hpp"

namespace semijulia {

// Finite atomic measure: points[k] carries masses[k].
struct WeightedPointCloud {
  std::vector<SpherePoint> points;
  std::vector<double> masses;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }

  void add(const SpherePoint& p, double mass) {
    points.push_back(p);
    masses.push_back(mass);
  }

  void reserve(std::size_t n) {
    points.reserve(n);
    masses.reserve(n);
  }

  double total_mass() const noexcept { return std::accumulate(masses.begin(), masses.end(), 0.0); }
};

// z_0 = start, then points[m] is the branch symbols[m] preimage of points[m-1].
struct BackwardOrbit {
  SpherePoint start;
  std::vector<std::size_t> symbols;  // 0-based branch indices
  std::vector<SpherePoint> points;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return points.size(); }
};

inline constexpr std::size_t kDefaultAtomBudget = std::size_t{1} << 24;
inline constexpr std::size_t kDefaultBurnIn = 100;

// All d preimages of z in branch-index order: the d_1 preimages under f_1
// (sorted), then the d_2 under f_2, and so on.
inline std::vector<SpherePoint> all_branch_preimages(const Semigroup& sg, const SpherePoint& z) {
  std::vector<SpherePoint> out;
  out.reserve(static_cast<std::size_t>(sg.total_degree()));
  for (const auto& f : sg.generators()) {
    auto pre = preimages(f, z);
    out.insert(out.end(), pre.begin(), pre.end());
  }
  return out;
}

// g_i(z): the preimage labelled i.
inline SpherePoint branch_preimage(const Semigroup& sg, const IndexDistribution& dist, std::size_t i,
                                   const SpherePoint& z) {
  const Branch& br = dist.decode(i);
  return preimages(sg.generator(br.generator), z)[br.branch];
}

inline std::size_t tree_atom_count(int d, int depth, std::size_t cap) {
  std::size_t count = 1;
  for (int m = 0; m < depth; ++m) {
    if (count > cap / static_cast<std::size_t>(d)) return cap + 1;
    count *= static_cast<std::size_t>(d);
  }
  return count;
}

// mu_n^{a,b}: all d^depth atoms g_{i_n} o ... o g_{i_1}(a) with mass
// pi(i_1)...pi(i_n), built level by level. Atom order is lexicographic in
// the word (i_1, ..., i_n).
inline WeightedPointCloud full_backward_tree(const Semigroup& sg, const SpherePoint& a, int depth,
                                             std::size_t max_atoms = kDefaultAtomBudget) {
  if (depth < 0) throw InvalidArgument("full_backward_tree: negative depth");
  const int d = sg.total_degree();
  const std::size_t atoms = tree_atom_count(d, depth, max_atoms);
  if (atoms > max_atoms) {
    throw BudgetExceeded("full_backward_tree: " + std::to_string(d) + "^" + std::to_string(depth) +
                         " atoms exceeds budget of " + std::to_string(max_atoms));
  }
  const IndexDistribution dist(sg);
  WeightedPointCloud level;
  level.add(a, 1.0);
  for (int m = 0; m < depth; ++m) {
    WeightedPointCloud next;
    next.reserve(level.size() * static_cast<std::size_t>(d));
    for (std::size_t k = 0; k < level.size(); ++k) {
      const auto children = all_branch_preimages(sg, level.points[k]);
      for (std::size_t i = 0; i < children.size(); ++i) {
        next.add(children[i], level.masses[k] * dist.probability(i));
      }
    }
    level = std::move(next);
  }
  return level;
}

// Depth-first traversal of the same tree, calling visit(point, mass) on each
// leaf in the same order full_backward_tree lays atoms out. Memory is
// O(depth * d), so there is no atom budget.
inline void for_each_tree_atom(const Semigroup& sg, const SpherePoint& a, int depth,
                               const std::function<void(const SpherePoint&, double)>& visit) {
  if (depth < 0) throw InvalidArgument("for_each_tree_atom: negative depth");
  const IndexDistribution dist(sg);
  std::function<void(const SpherePoint&, double, int)> descend = [&](const SpherePoint& z, double mass,
                                                                     int level) {
    if (level == depth) {
      visit(z, mass);
      return;
    }
    const auto children = all_branch_preimages(sg, z);
    for (std::size_t i = 0; i < children.size(); ++i) descend(children[i], mass * dist.probability(i), level + 1);
  };
  descend(a, 1.0, 0);
}

// Random backward orbit of length n: i.i.d. symbols from pi_b, each step
// recomputing the preimages of the current point and taking the labelled one.
inline BackwardOrbit random_backward_orbit(const Semigroup& sg, const IndexDistribution& dist,
                                           const SpherePoint& a, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("random_backward_orbit: length must be >= 1");
  BackwardOrbit orbit;
  orbit.start = a;
  orbit.seed = seed;
  orbit.symbols.reserve(n);
  orbit.points.reserve(n);
  SplitMix64 rng(seed);
  SpherePoint z = a;
  for (std::size_t m = 0; m < n; ++m) {
    const std::size_t i = sample_branch(dist, rng);
    z = branch_preimage(sg, dist, i, z);
    orbit.symbols.push_back(i);
    orbit.points.push_back(z);
  }
  return orbit;
}

inline BackwardOrbit random_backward_orbit(const Semigroup& sg, const SpherePoint& a, std::size_t n,
                                           std::uint64_t seed) {
  return random_backward_orbit(sg, IndexDistribution(sg), a, n, seed);
}

// Uniform mass on the orbit after dropping the first burn_in points.
inline WeightedPointCloud empirical_measure(const BackwardOrbit& orbit, std::size_t burn_in) {
  if (burn_in >= orbit.size()) {
    throw EmptyTail("empirical_measure: burn-in " + std::to_string(burn_in) + " leaves nothing of an orbit of length " +
                    std::to_string(orbit.size()));
  }
  const std::size_t tail = orbit.size() - burn_in;
  const double mass = 1.0 / static_cast<double>(tail);
  WeightedPointCloud cloud;
  cloud.points.assign(orbit.points.begin() + static_cast<std::ptrdiff_t>(burn_in), orbit.points.end());
  cloud.masses.assign(tail, mass);
  return cloud;
}

// Seeds for a family of chains rooted at one base seed.
inline std::vector<std::uint64_t> chain_seeds(std::uint64_t base, std::size_t n_chains) {
  std::vector<std::uint64_t> seeds(n_chains);
  for (std::size_t c = 0; c < n_chains; ++c) seeds[c] = SplitMix64::derive(base, c);
  return seeds;
}

// One orbit per seed, run on up to `threads` worker threads (0 = hardware
// concurrency). Results are indexed by seed position, so they do not depend
// on scheduling.
inline std::vector<BackwardOrbit> run_chain_orbits(const Semigroup& sg, const SpherePoint& a,
                                                   std::size_t n_per_chain, const std::vector<std::uint64_t>& seeds,
                                                   unsigned threads = 0) {
  if (seeds.empty()) throw InvalidArgument("run_chains: no seeds");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw InvalidArgument("run_chains: seeds must be pairwise distinct");
  }
  const IndexDistribution dist(sg);
  std::vector<BackwardOrbit> orbits(seeds.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(seeds.size()));

  std::vector<std::exception_ptr> errors(seeds.size());
  auto worker = [&](unsigned t) {
    for (std::size_t c = t; c < seeds.size(); c += threads) {
      try {
        orbits[c] = random_backward_orbit(sg, dist, a, n_per_chain, seeds[c]);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return orbits;
}

// Average of the per-orbit empirical measures, concatenated in ascending
// seed order so the result does not depend on how the orbits were listed.
inline WeightedPointCloud merge_empirical(const std::vector<BackwardOrbit>& orbits, std::size_t burn_in) {
  WeightedPointCloud merged;
  const double share = 1.0 / static_cast<double>(orbits.size());
  std::size_t total = 0;
  for (const auto& o : orbits) total += o.size() > burn_in ? o.size() - burn_in : 0;
  merged.reserve(total);
  std::vector<const BackwardOrbit*> order;
  for (const auto& o : orbits) order.push_back(&o);
  std::stable_sort(order.begin(), order.end(), [](const auto* x, const auto* y) { return x->seed < y->seed; });
  for (const auto* o : order) {
    auto cloud = empirical_measure(*o, burn_in);
    for (std::size_t k = 0; k < cloud.size(); ++k) merged.add(cloud.points[k], cloud.masses[k] * share);
  }
  return merged;
}

inline WeightedPointCloud run_chains(const Semigroup& sg, const SpherePoint& a, std::size_t n_per_chain,
                                     std::size_t burn_in, const std::vector<std::uint64_t>& seeds,
                                     unsigned threads = 0) {
  if (burn_in >= n_per_chain) {
    throw EmptyTail("run_chains: burn-in " + std::to_string(burn_in) + " >= chain length " +
                    std::to_string(n_per_chain));
  }
  return merge_empirical(run_chain_orbits(sg, a, n_per_chain, seeds, threads), burn_in);
}

}  // namespace semijulia
