#pragma once

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "semijulia/backward.hpp"
#include "semijulia/config.hpp"
#include "semijulia/measure.hpp"
#include "semijulia/render.hpp"
#include "semijulia/semigroup.hpp"
#include "semijulia/verify.hpp"

namespace semijulia {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

// Atoms fed to the invariance table in run reports; larger clouds are
// subsampled by mass.
inline constexpr std::size_t kReportInvarianceAtoms = 200'000;
// Support points per side for the Hausdorff distance in compare reports.
inline constexpr std::size_t kReportHausdorffPoints = 2'000;

struct RunResult {
  int exit_code = kExitOk;
  std::string report;
};

namespace detail {

inline std::string with_suffix(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  const auto ext = p.extension().string();
  p.replace_extension();
  return p.string() + suffix + ext;
}

inline std::vector<SpherePoint> stride_sample(const std::vector<SpherePoint>& pts, std::size_t limit) {
  if (pts.size() <= limit) return pts;
  std::vector<SpherePoint> out;
  out.reserve(limit);
  for (std::size_t k = 0; k < limit; ++k) out.push_back(pts[k * pts.size() / limit]);
  return out;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << text;
  if (!os) throw Error("write failed for " + path);
}

inline void invariance_table(std::ostream& os, const Semigroup& sg, const WeightedPointCloud& cloud, std::uint64_t seed) {
  InvarianceOptions opts;
  opts.max_atoms = kReportInvarianceAtoms;
  opts.seed = seed;
  const auto rows = check_invariance(sg, cloud, default_test_functions(), opts);
  os << "invariance check (|<T phi, mu> - <phi, mu>|"
     << (cloud.size() > kReportInvarianceAtoms ? ", " + std::to_string(kReportInvarianceAtoms) + " sampled atoms" : "")
     << "):\n";
  for (const auto& r : rows) {
    os << "  " << std::left << std::setw(26) << r.name << std::right << " <phi,mu> = " << std::setw(12) << r.integral
       << "  discrepancy = " << r.discrepancy << "\n";
  }
}

inline void emit(const GridMeasure& grid, const ImageSpec& spec, const std::string& grid_path,
                 const std::string& image_path, std::ostream& report) {
  write_grid_file(grid_path, grid);
  write_image(encode_ppm(render_density(grid, spec)), image_path);
  report << "wrote " << grid_path << " and " << image_path << " (outside mass " << grid.outside_mass << ")\n";
}

}  // namespace detail

// Executes one configured run: produces the image, grid export and report
// files and returns the report text. Library errors propagate.
inline RunResult run(const RunConfig& cfg, std::ostream* progress = nullptr) {
  validate_config(cfg);
  const Semigroup sg = make_semigroup(cfg);

  std::ostringstream report;
  report << std::setprecision(10);
  report << "semijulia run report\n";
  report << "effective config:\n" << to_json(cfg, sg).dump(2) << "\n\n";

  if (cfg.method == Method::Verify) {
    VerifyOptions vopts;
    vopts.threads = cfg.threads;
    AcceptanceSuite suite(vopts);
    const auto results = suite.run(cfg.example, progress);
    const bool all_pass = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
    for (const auto& r : results) report << r.line() << "\n";
    report << (all_pass ? "VERIFY PASS" : "VERIFY FAIL") << "\n";
    return {all_pass ? kExitOk : kExitFailure, report.str()};
  }

  const SpherePoint a(cfg.a);
  report << validate_assumptions(sg, a).to_text() << "\n";
  const ImageSpec& spec = cfg.image;
  const auto& vp = spec.viewport;

  std::optional<WeightedPointCloud> chains;
  std::optional<GridMeasure> chain_grid;
  if (cfg.method == Method::Random || cfg.method == Method::Compare) {
    const auto seeds = cfg.effective_seeds();
    const auto t0 = std::chrono::steady_clock::now();
    chains = merge_empirical(run_chain_orbits(sg, a, cfg.n, seeds, cfg.threads), cfg.burn_in);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report << "random backward iteration: " << seeds.size() << " chains x " << cfg.n << " steps, burn-in "
           << cfg.burn_in << ", " << chains->size() << " atoms, " << secs << " s\n";
    report << "seeds:";
    for (auto s : seeds) report << " " << s;
    report << "\n";
    chain_grid = bin(*chains, vp);
    detail::emit(*chain_grid, spec, cfg.output.grid, cfg.output.image, report);
    detail::invariance_table(report, sg, *chains, cfg.seed);
    if (progress) *progress << "random iteration done\n";
  }

  std::optional<WeightedPointCloud> tree;
  std::optional<GridMeasure> tree_grid;
  if (cfg.method == Method::Full || cfg.method == Method::Compare) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t atoms = tree_atom_count(sg.total_degree(), cfg.depth, cfg.max_atoms);
    if (atoms <= cfg.max_atoms) {
      tree = full_backward_tree(sg, a, cfg.depth, cfg.max_atoms);
      tree_grid = bin(*tree, vp);
    } else if (cfg.method == Method::Full) {
      tree_grid = bin_full_backward_tree(sg, a, cfg.depth, vp);
    } else {
      throw BudgetExceeded("compare: depth-" + std::to_string(cfg.depth) + " tree exceeds max_atoms " +
                           std::to_string(cfg.max_atoms));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report << "full backward iteration: depth " << cfg.depth << ", d = " << sg.total_degree() << ", "
           << (tree ? "materialized" : "streamed") << ", " << secs << " s\n";
    const bool compare = cfg.method == Method::Compare;
    detail::emit(*tree_grid, spec, compare ? detail::with_suffix(cfg.output.grid, ".full") : cfg.output.grid,
                 compare ? detail::with_suffix(cfg.output.image, ".full") : cfg.output.image, report);
    if (tree) detail::invariance_table(report, sg, *tree, cfg.seed);
    if (progress) *progress << "full iteration done\n";
  }

  if (cfg.method == Method::Compare) {
    const double tv = total_variation(*tree_grid, *chain_grid);
    const auto hs = hausdorff_distance(detail::stride_sample(tree->points, kReportHausdorffPoints),
                                       detail::stride_sample(chains->points, kReportHausdorffPoints));
    report << "TV(full, random) = " << tv << "\n";
    report << "Hausdorff(full support, random support) = " << hs << " (chordal, " << kReportHausdorffPoints
           << "-point subsamples)\n";
  }

  const std::string text = report.str();
  detail::write_text(cfg.output.report, text);
  return {kExitOk, text};
}

}  // namespace semijulia
