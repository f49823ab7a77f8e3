#pragma once

// Verification harness: each criterion checks one convergence or
// correctness property on a built-in example at a pinned seed and tolerance.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "semijulia/backward.hpp"
#include "semijulia/config.hpp"
#include "semijulia/measure.hpp"
#include "semijulia/render.hpp"
#include "semijulia/rng.hpp"
#include "semijulia/semigroup.hpp"

namespace semijulia {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double time_limit = 0.0;

  std::string line() const {
    std::ostringstream os;
    os << (passed ? "[PASS] " : "[FAIL] ") << "C" << id << " " << title << ": " << detail << " ("
       << std::fixed << std::setprecision(2) << seconds << " s, limit " << std::setprecision(0) << time_limit
       << " s)";
    return os.str();
  }
};

struct VerifyOptions {
  std::uint64_t seed = 0x5EED;
  unsigned threads = 0;
};

// Arcsine law on [-2, 2]: the invariant measure of z^2 - 2.
inline double arcsine_cdf(double x) {
  const double t = std::clamp(x / 2.0, -1.0, 1.0);
  return 0.5 + std::asin(t) / std::numbers::pi;
}

// Kolmogorov-Smirnov distance between a weighted sample and a continuous CDF.
inline double ks_distance(std::vector<std::pair<double, double>> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  double total = 0.0;
  for (const auto& s : samples) total += s.second;
  double below = 0.0;
  double worst = 0.0;
  for (const auto& [x, w] : samples) {
    const double f = cdf(x);
    worst = std::max(worst, std::abs(below / total - f));
    below += w;
    worst = std::max(worst, std::abs(below / total - f));
  }
  return worst;
}

// Mass histogram of arg z over `bins` equal sectors of [0, 2pi).
inline std::vector<double> angular_histogram(const WeightedPointCloud& cloud, int bins) {
  std::vector<double> h(static_cast<std::size_t>(bins), 0.0);
  for (std::size_t k = 0; k < cloud.size(); ++k) {
    const auto& p = cloud.points[k];
    if (p.is_infinite()) continue;
    double theta = std::atan2(p.imag(), p.real());
    if (theta < 0.0) theta += 2.0 * std::numbers::pi;
    auto b = static_cast<int>(std::floor(theta / (2.0 * std::numbers::pi) * bins));
    h[static_cast<std::size_t>(std::clamp(b, 0, bins - 1))] += cloud.masses[k];
  }
  return h;
}

class AcceptanceSuite {
 public:
  explicit AcceptanceSuite(VerifyOptions opts = {}) : opts_(opts) {}

  static Semigroup example_semigroup(const std::string& name) { return make_semigroup(builtin_example(name)); }

  // Criteria applying to a built-in example; the generic ones (1, 2) go with
  // every selection.
  static std::vector<int> criteria_for(const std::string& example) {
    if (example.empty()) return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    if (example == "circle") return {1, 2, 3, 6, 7, 8};
    if (example == "chebyshev") return {1, 2, 4, 6};
    if (example == "annulus") return {1, 2, 5, 6, 9, 10};
    throw ConfigError("example", "no acceptance criteria for example '" + example + "'");
  }

  std::vector<CriterionResult> run(const std::string& example = "", std::ostream* progress = nullptr) {
    std::vector<CriterionResult> out;
    for (int id : criteria_for(example)) {
      out.push_back(run_one(id, example));
      if (progress) *progress << out.back().line() << std::endl;
    }
    return out;
  }

  CriterionResult run_one(int id, const std::string& example = "") {
    switch (id) {
      case 1: return timed(1, "preimage correctness", 5.0, [&] { return preimage_correctness(); });
      case 2: return timed(2, "index distribution structure", 1.0, [&] { return index_distribution_structure(); });
      case 3: return timed(3, "unit-circle oracle", 30.0, [&] { return unit_circle_oracle(); });
      case 4: return timed(4, "arcsine oracle", 30.0, [&] { return arcsine_oracle(); });
      case 5: return timed(5, "full vs random agreement", 60.0, [&] { return full_vs_random(); });
      case 6: return timed(6, "adjoint-invariance of empirical measures", 30.0, [&] { return invariance(example); });
      case 7: return timed(7, "distance decay", 1.0, [&] { return distance_decay(); });
      case 8: return timed(8, "orbit closure covers J", 10.0, [&] { return orbit_closure(); });
      case 9: return timed(9, "determinism", 120.0, [&] { return determinism(); });
      case 10: return timed(10, "Markov transition check", 60.0, [&] { return markov_transitions(); });
      default: throw InvalidArgument("unknown criterion " + std::to_string(id));
    }
  }

  // -------------------------------------------------------------------------

  // 1,000 random (map, point) pairs of degree <= 6.
  std::pair<bool, std::string> preimage_correctness() {
    SplitMix64 rng(SplitMix64::derive(opts_.seed, 1));
    auto disk = [&](double radius) {
      for (;;) {
        const Complex z(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
        if (std::norm(z) <= 1.0) return radius * z;
      }
    };
    auto random_poly = [&](int degree) {
      std::vector<Complex> c(static_cast<std::size_t>(degree) + 1);
      for (auto& x : c) x = disk(1.0);
      while (std::abs(c.back()) < 1e-3) c.back() = disk(1.0);
      return Polynomial(c);
    };
    double worst = 0.0;
    int bad_count = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      std::optional<RationalMap> f;
      while (!f) {
        const int dn = static_cast<int>(rng() % 7);
        const int dd = static_cast<int>(rng() % 7);
        if (std::max(dn, dd) < 1) continue;
        try {
          f.emplace(random_poly(dn), random_poly(dd));
        } catch (const InvalidArgument&) {
        }
      }
      const double pick = rng.uniform();
      SpherePoint z = pick < 0.05 ? SpherePoint::infinity() : SpherePoint(disk(pick < 0.5 ? 1.0 : 4.0));
      const auto pre = preimages(*f, z);
      if (static_cast<int>(pre.size()) != f->degree()) ++bad_count;
      for (const auto& w : pre) worst = std::max(worst, chordal_distance(evaluate(*f, w), z));
    }
    std::ostringstream os;
    os << "max chordal residual " << std::scientific << std::setprecision(2) << worst << " (limit 1e-09), "
       << bad_count << " count mismatches";
    return {worst <= 1e-9 && bad_count == 0, os.str()};
  }

  // 100 random (degrees, b) configurations.
  std::pair<bool, std::string> index_distribution_structure() {
    SplitMix64 rng(SplitMix64::derive(opts_.seed, 2));
    double worst_sum = 0.0;
    int block_violations = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t k = 1 + rng() % 5;
      std::vector<RationalMap> maps;
      std::vector<double> w(k);
      double total = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        int deg = 1 + static_cast<int>(rng() % 6);
        if (j == 0) deg = std::max(deg, 2);
        maps.push_back(RationalMap::polynomial(Polynomial::monomial(deg)));
        w[j] = 0.05 + rng.uniform();
        total += w[j];
      }
      for (auto& x : w) x /= total;
      const Semigroup sg(std::move(maps), ProbabilityVector(w));
      const IndexDistribution dist(sg);
      double sum = 0.0;
      for (std::size_t i = 0; i < dist.size(); ++i) {
        const auto& br = dist.decode(i);
        const double expected = sg.b()[br.generator] / sg.generator(br.generator).degree();
        if (dist.probability(i) != expected) ++block_violations;
        sum += dist.probability(i);
      }
      worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    }
    std::ostringstream os;
    os << block_violations << " block violations, max |sum-1| = " << std::scientific << std::setprecision(2)
       << worst_sum << " (limit 1e-12)";
    return {block_violations == 0 && worst_sum <= 1e-12, os.str()};
  }

  std::pair<bool, std::string> unit_circle_oracle() {
    const auto& orbit = single_chain("circle");
    const auto cloud = empirical_measure(orbit, kDefaultBurnIn);
    double worst_modulus = 0.0;
    for (const auto& p : cloud.points) worst_modulus = std::max(worst_modulus, std::abs(std::abs(p.value()) - 1.0));
    const auto hist = angular_histogram(cloud, 36);
    double worst_bin = 0.0;
    for (double h : hist) worst_bin = std::max(worst_bin, std::abs(h - 1.0 / 36.0));

    const auto tree = full_backward_tree(example_semigroup("circle"), SpherePoint(1.0), 20);
    double worst_tree_bin = 0.0;
    for (double h : angular_histogram(tree, 36)) worst_tree_bin = std::max(worst_tree_bin, std::abs(h - 1.0 / 36.0));

    std::ostringstream os;
    os << std::scientific << std::setprecision(2) << "max ||z|-1| = " << worst_modulus
       << " (limit 1e-09), max angular bin deviation = " << worst_bin
       << " (limit 5e-03), depth-20 tree bin deviation = " << worst_tree_bin << " (limit 5e-03)";
    return {worst_modulus <= 1e-9 && worst_bin <= 0.005 && worst_tree_bin <= 0.005, os.str()};
  }

  std::pair<bool, std::string> arcsine_oracle() {
    const auto& orbit = single_chain("chebyshev");
    const auto cloud = empirical_measure(orbit, kDefaultBurnIn);
    double worst_imag = 0.0;
    bool in_range = true;
    std::vector<std::pair<double, double>> samples;
    samples.reserve(cloud.size());
    for (std::size_t k = 0; k < cloud.size(); ++k) {
      const auto& p = cloud.points[k];
      if (p.is_infinite()) {
        in_range = false;
        continue;
      }
      worst_imag = std::max(worst_imag, std::abs(p.imag()));
      if (p.real() < -2.0 - 1e-6 || p.real() > 2.0 + 1e-6) in_range = false;
      samples.emplace_back(p.real(), cloud.masses[k]);
    }
    const double ks = ks_distance(std::move(samples), arcsine_cdf);

    const auto tree = full_backward_tree(example_semigroup("chebyshev"), SpherePoint(0.0), 18);
    std::vector<std::pair<double, double>> tree_samples;
    tree_samples.reserve(tree.size());
    for (std::size_t k = 0; k < tree.size(); ++k) tree_samples.emplace_back(tree.points[k].real(), tree.masses[k]);
    const double tree_ks = ks_distance(std::move(tree_samples), arcsine_cdf);

    std::ostringstream os;
    os << std::scientific << std::setprecision(2) << "max |Im z| = " << worst_imag << " (limit 1e-06), range "
       << (in_range ? "ok" : "VIOLATED") << ", KS = " << ks << " (limit 2e-02), depth-18 tree KS = " << tree_ks
       << " (limit 5e-03)";
    return {worst_imag <= 1e-6 && in_range && ks <= 0.02 && tree_ks <= 0.005, os.str()};
  }

  static Viewport annulus_viewport() { return Viewport{{0.0, 0.0}, 5.0, 5.0, 128, 128}; }

  std::pair<bool, std::string> full_vs_random() {
    const auto sg = example_semigroup("annulus");
    const auto vp = annulus_viewport();
    const auto tree = full_backward_tree(sg, SpherePoint(1.0), 8);
    const auto chains = merge_empirical(annulus_chains(), kDefaultBurnIn);
    const auto chain_grid = bin(chains, vp);
    const double tv = total_variation(bin(tree, vp), chain_grid);
    // Diagnostic only: how far the chains are from a deeper tree.
    const double tv_deep = total_variation(bin_full_backward_tree(sg, SpherePoint(1.0), 10, vp), chain_grid);
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << "TV(depth-8 tree, 4x250k chains) = " << tv
       << " (limit 0.05); diagnostic TV(depth-10 tree, chains) = " << tv_deep;
    return {tv <= 0.05, os.str()};
  }

  std::pair<bool, std::string> invariance(const std::string& example) {
    std::vector<std::string> names;
    if (example.empty()) {
      names = {"circle", "chebyshev", "annulus"};
    } else {
      names = {example};
    }
    const auto phis = default_test_functions();
    double worst = 0.0;
    std::ostringstream os;
    os << std::scientific << std::setprecision(2);
    for (const auto& name : names) {
      const auto sg = example_semigroup(name);
      const WeightedPointCloud cloud = name == "annulus" ? merge_empirical(annulus_chains(), kDefaultBurnIn)
                                                         : empirical_measure(single_chain(name), kDefaultBurnIn);
      double worst_here = 0.0;
      for (const auto& e : check_invariance(sg, cloud, phis)) worst_here = std::max(worst_here, e.discrepancy);
      os << name << " max " << worst_here << "; ";
      worst = std::max(worst, worst_here);
    }
    os << "limit 1e-02";
    return {worst <= 0.01, os.str()};
  }

  std::pair<bool, std::string> distance_decay() {
    const auto sg = example_semigroup("circle");
    const auto orbit = random_backward_orbit(sg, SpherePoint(3.0), 64, SplitMix64::derive(opts_.seed, 7));
    const auto profile = distance_decay_profile(orbit, [](const SpherePoint& p) { return chordal_distance_to_circle(p); });
    double worst_tail = 0.0;
    double worst_vs_closed_form = 0.0;
    for (std::size_t m = 1; m <= profile.size(); ++m) {
      if (m >= 40) worst_tail = std::max(worst_tail, profile[m - 1]);
      const double modulus = std::pow(3.0, std::ldexp(1.0, -static_cast<int>(m)));
      worst_vs_closed_form =
          std::max(worst_vs_closed_form, std::abs(std::abs(orbit.points[m - 1].value()) - modulus));
    }
    std::ostringstream os;
    os << std::scientific << std::setprecision(2) << "max dist to unit circle for m >= 40: " << worst_tail
       << " (limit 1e-06); max | |z_m| - 3^(2^-m) | = " << worst_vs_closed_form;
    return {worst_tail <= 1e-6 && worst_vs_closed_form <= 1e-9, os.str()};
  }

  std::pair<bool, std::string> orbit_closure() {
    const auto sg = example_semigroup("circle");
    const auto orbit = random_backward_orbit(sg, SpherePoint(1.0), 100'000, SplitMix64::derive(opts_.seed, 8));
    const auto reference = circle_samples(4096);
    const double d = directed_distance(reference, orbit.points);
    std::ostringstream os;
    os << std::scientific << std::setprecision(2) << "max distance from 4096 circle samples to orbit = " << d
       << " (limit 5e-02)";
    return {d <= 0.05, os.str()};
  }

  struct PipelineArtifacts {
    std::string chain_grid;
    std::string tree_grid;
    std::vector<std::uint8_t> chain_ppm;
    std::vector<std::uint8_t> tree_ppm;
  };

  // The criterion-5 pipeline from scratch: chains and tree, binned,
  // exported and rendered.
  PipelineArtifacts annulus_pipeline(unsigned threads) const {
    const auto sg = example_semigroup("annulus");
    ImageSpec spec;
    spec.viewport = annulus_viewport();
    const auto seeds = chain_seeds(SplitMix64::derive(opts_.seed, 5), 4);
    const auto chain_grid = bin(run_chains(sg, SpherePoint(1.0), 250'000, kDefaultBurnIn, seeds, threads), spec.viewport);
    const auto tree_grid = bin(full_backward_tree(sg, SpherePoint(1.0), 8), spec.viewport);
    return {grid_to_string(chain_grid), grid_to_string(tree_grid), encode_ppm(render_density(chain_grid, spec)),
            encode_ppm(render_density(tree_grid, spec))};
  }

  std::pair<bool, std::string> determinism() {
    const auto first = annulus_pipeline(1);
    const auto second = annulus_pipeline(4);
    const bool grids = first.chain_grid == second.chain_grid && first.tree_grid == second.tree_grid;
    const bool images = first.chain_ppm == second.chain_ppm && first.tree_ppm == second.tree_ppm;
    std::ostringstream os;
    os << "grid exports " << (grids ? "identical" : "DIFFER") << ", PPM files " << (images ? "identical" : "DIFFER")
       << " (1 thread vs 4 threads)";
    return {grids && images, os.str()};
  }

  // Conditioned on visits to the cell containing z = 1, the next branch index
  // follows pi_b and the next point is that labelled preimage.
  std::pair<bool, std::string> markov_transitions() {
    const auto sg = example_semigroup("annulus");
    const IndexDistribution dist(sg);
    const auto orbit = random_backward_orbit(sg, dist, SpherePoint(1.0), 2'000'000, SplitMix64::derive(opts_.seed, 10));
    const Viewport vp{{0.0, 0.0}, 5.0, 5.0, 16, 16};
    const auto target = vp.cell_of(SpherePoint(1.0));
    std::vector<double> counts(dist.size(), 0.0);
    std::size_t visits = 0;
    std::size_t mismatched_successors = 0;
    for (std::size_t m = kDefaultBurnIn; m + 1 < orbit.size(); ++m) {
      if (vp.cell_of(orbit.points[m]) != target) continue;
      ++visits;
      const std::size_t next = orbit.symbols[m + 1];
      counts[next] += 1.0;
      if (!(all_branch_preimages(sg, orbit.points[m])[next] == orbit.points[m + 1])) ++mismatched_successors;
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      worst = std::max(worst, std::abs(counts[i] / std::max<double>(1.0, static_cast<double>(visits)) - dist.probability(i)));
    }
    std::ostringstream os;
    os << visits << " visits (need >= 10000), max |freq - pi| = " << std::fixed << std::setprecision(4) << worst
       << " (limit 0.02), " << mismatched_successors << " successors off the preimage list";
    return {visits >= 10'000 && worst <= 0.02 && mismatched_successors == 0, os.str()};
  }

 private:
  template <typename F>
  CriterionResult timed(int id, std::string title, double limit, F&& body) {
    CriterionResult r;
    r.id = id;
    r.title = std::move(title);
    r.time_limit = limit;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      auto [ok, detail] = body();
      r.passed = ok;
      r.detail = std::move(detail);
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.seconds >= limit) {
      r.passed = false;
      r.detail += "; runtime over limit";
    }
    return r;
  }

  const BackwardOrbit& single_chain(const std::string& name) {
    auto it = chains_.find(name);
    if (it == chains_.end()) {
      const auto cfg = builtin_example(name);
      const auto sg = make_semigroup(cfg);
      validate_assumptions(sg, cfg.a);
      const auto seed = SplitMix64::derive(opts_.seed, name == "circle" ? 3 : 4);
      it = chains_.emplace(name, random_backward_orbit(sg, cfg.a, 1'000'000, seed)).first;
    }
    return it->second;
  }

  const std::vector<BackwardOrbit>& annulus_chains() {
    if (!annulus_orbits_) {
      const auto sg = example_semigroup("annulus");
      const auto seeds = chain_seeds(SplitMix64::derive(opts_.seed, 5), 4);
      annulus_orbits_ = run_chain_orbits(sg, SpherePoint(1.0), 250'000, seeds, opts_.threads);
    }
    return *annulus_orbits_;
  }

  VerifyOptions opts_;
  std::map<std::string, BackwardOrbit> chains_;
  std::optional<std::vector<BackwardOrbit>> annulus_orbits_;
};

}  // namespace semijulia
