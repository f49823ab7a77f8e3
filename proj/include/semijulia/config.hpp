#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "semijulia/backward.hpp"
#include "semijulia/error.hpp"
#include "semijulia/measure.hpp"
#include "semijulia/render.hpp"
#include "semijulia/semigroup.hpp"

namespace semijulia {

enum class Method { Random, Full, Compare, Verify };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::Random: return "random";
    case Method::Full: return "full";
    case Method::Compare: return "compare";
    case Method::Verify: return "verify";
  }
  return "random";
}

inline Method parse_method(const std::string& s) {
  if (s == "random") return Method::Random;
  if (s == "full") return Method::Full;
  if (s == "compare") return Method::Compare;
  if (s == "verify") return Method::Verify;
  throw ConfigError("method", "unknown method '" + s + "' (expected random, full, compare or verify)");
}

struct GeneratorSpec {
  std::vector<Complex> numerator;
  std::vector<Complex> denominator{Complex(1.0, 0.0)};
};

struct OutputPaths {
  std::string image;
  std::string grid;
  std::string report;
};

// Everything a run needs. Defaults are filled in by parse_config; to_json
// echoes the effective values.
struct RunConfig {
  std::vector<GeneratorSpec> generators;
  std::optional<std::vector<double>> b;
  Complex a{1.0, 0.0};
  Method method = Method::Random;
  std::size_t n = 1'000'000;  // steps per chain
  int depth = 12;             // full-tree depth
  std::size_t burn_in = kDefaultBurnIn;
  std::size_t chains = 4;
  std::uint64_t seed = 1;
  std::optional<std::vector<std::uint64_t>> seeds;  // overrides seed-derived chain seeds
  unsigned threads = 0;                             // 0 = hardware concurrency
  std::size_t max_atoms = kDefaultAtomBudget;
  ImageSpec image;
  OutputPaths output{"semijulia.ppm", "semijulia.grid", "semijulia.report.txt"};
  std::string example;  // name of a built-in example, if any

  std::vector<std::uint64_t> effective_seeds() const { return seeds ? *seeds : chain_seeds(seed, chains); }
};

namespace detail {

using nlohmann::json;

inline Complex parse_complex(const json& j, const std::string& field) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError(field, "expected a complex number as [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline std::vector<Complex> parse_complex_list(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ConfigError(field, "expected a non-empty list of [re, im] pairs");
  std::vector<Complex> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(parse_complex(j[k], field + "[" + std::to_string(k) + "]"));
  return out;
}

template <typename T>
T get_number(const json& obj, const char* key, T fallback, const std::string& prefix = "") {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  const std::string field = prefix + key;
  if (!v.is_number()) throw ConfigError(field, "expected a number");
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer() && !v.is_number_unsigned()) throw ConfigError(field, "expected an integer");
    if (v.is_number_integer() && v.get<std::int64_t>() < 0) throw ConfigError(field, "must be non-negative");
  }
  return v.get<T>();
}

inline Rgb parse_rgb(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(field, "expected [r, g, b]");
  Rgb c;
  std::uint8_t* parts[] = {&c.r, &c.g, &c.b};
  for (std::size_t k = 0; k < 3; ++k) {
    if (!j[k].is_number_integer() || j[k].get<int>() < 0 || j[k].get<int>() > 255) {
      throw ConfigError(field, "components must be integers in 0..255");
    }
    *parts[k] = static_cast<std::uint8_t>(j[k].get<int>());
  }
  return c;
}

inline json complex_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j, RunConfig cfg = {}) {
  using detail::get_number;
  if (!j.is_object()) throw ConfigError("", "config must be a JSON object");

  if (j.contains("generators")) {
    const auto& gens = j.at("generators");
    if (!gens.is_array() || gens.empty()) throw ConfigError("generators", "expected a non-empty list");
    cfg.generators.clear();
    for (std::size_t k = 0; k < gens.size(); ++k) {
      const std::string field = "generators[" + std::to_string(k) + "]";
      const auto& g = gens[k];
      if (!g.is_object() || !g.contains("numerator")) throw ConfigError(field, "expected {numerator, denominator}");
      GeneratorSpec spec;
      spec.numerator = detail::parse_complex_list(g.at("numerator"), field + ".numerator");
      if (g.contains("denominator")) spec.denominator = detail::parse_complex_list(g.at("denominator"), field + ".denominator");
      cfg.generators.push_back(std::move(spec));
    }
  }
  if (cfg.generators.empty()) throw ConfigError("generators", "missing");

  if (j.contains("b")) {
    const auto& b = j.at("b");
    if (b.is_null()) {
      cfg.b.reset();
    } else {
      if (!b.is_array()) throw ConfigError("b", "expected a list of weights");
      std::vector<double> w;
      for (const auto& x : b) {
        if (!x.is_number()) throw ConfigError("b", "weights must be numbers");
        w.push_back(x.get<double>());
      }
      cfg.b = std::move(w);
    }
  }
  if (j.contains("a")) cfg.a = detail::parse_complex(j.at("a"), "a");
  if (j.contains("method")) {
    if (!j.at("method").is_string()) throw ConfigError("method", "expected a string");
    cfg.method = parse_method(j.at("method").get<std::string>());
  }
  cfg.n = get_number<std::size_t>(j, "n", cfg.n);
  cfg.depth = get_number<int>(j, "depth", cfg.depth);
  cfg.burn_in = get_number<std::size_t>(j, "burn_in", cfg.burn_in);
  cfg.chains = get_number<std::size_t>(j, "chains", cfg.chains);
  cfg.seed = get_number<std::uint64_t>(j, "seed", cfg.seed);
  cfg.threads = get_number<unsigned>(j, "threads", cfg.threads);
  cfg.max_atoms = get_number<std::size_t>(j, "max_atoms", cfg.max_atoms);
  if (j.contains("seeds")) {
    const auto& s = j.at("seeds");
    if (!s.is_array() || s.empty()) throw ConfigError("seeds", "expected a non-empty list of integers");
    std::vector<std::uint64_t> seeds;
    for (const auto& x : s) {
      if (!x.is_number_unsigned() && !(x.is_number_integer() && x.get<std::int64_t>() >= 0)) {
        throw ConfigError("seeds", "seeds must be non-negative integers");
      }
      seeds.push_back(x.get<std::uint64_t>());
    }
    cfg.seeds = std::move(seeds);
    cfg.chains = cfg.seeds->size();
  }

  if (j.contains("viewport")) {
    const auto& v = j.at("viewport");
    if (!v.is_object()) throw ConfigError("viewport", "expected an object");
    auto& vp = cfg.image.viewport;
    if (v.contains("center")) vp.center = detail::parse_complex(v.at("center"), "viewport.center");
    vp.width = get_number<double>(v, "width", vp.width, "viewport.");
    vp.height = get_number<double>(v, "height", vp.height, "viewport.");
    vp.nx = get_number<int>(v, "nx", vp.nx, "viewport.");
    vp.ny = get_number<int>(v, "ny", vp.ny, "viewport.");
  }
  if (j.contains("image")) {
    const auto& im = j.at("image");
    if (!im.is_object()) throw ConfigError("image", "expected an object");
    if (im.contains("colormap")) cfg.image.colormap = im.at("colormap").get<std::string>();
    if (im.contains("scale")) {
      const auto s = im.at("scale").get<std::string>();
      if (s == "log") {
        cfg.image.scale = IntensityScale::Log;
      } else if (s == "linear") {
        cfg.image.scale = IntensityScale::Linear;
      } else {
        throw ConfigError("image.scale", "expected 'log' or 'linear'");
      }
    }
    if (im.contains("background")) cfg.image.background = detail::parse_rgb(im.at("background"), "image.background");
    if (im.contains("foreground")) cfg.image.foreground = detail::parse_rgb(im.at("foreground"), "image.foreground");
    cfg.image.pixel_scale = get_number<int>(im, "pixel_scale", cfg.image.pixel_scale, "image.");
  }
  if (j.contains("output")) {
    const auto& o = j.at("output");
    if (!o.is_object()) throw ConfigError("output", "expected an object");
    if (o.contains("image")) cfg.output.image = o.at("image").get<std::string>();
    if (o.contains("grid")) cfg.output.grid = o.at("grid").get<std::string>();
    if (o.contains("report")) cfg.output.report = o.at("report").get<std::string>();
  }
  if (j.contains("example")) cfg.example = j.at("example").get<std::string>();
  return cfg;
}

// Structural checks that do not need the semigroup.
inline void validate_config(const RunConfig& cfg) {
  if (cfg.chains < 1) throw ConfigError("chains", "must be >= 1");
  if (cfg.n < 1) throw ConfigError("n", "must be >= 1");
  if (cfg.depth < 0) throw ConfigError("depth", "must be >= 0");
  if ((cfg.method == Method::Random || cfg.method == Method::Compare) && cfg.burn_in >= cfg.n) {
    throw ConfigError("burn_in", "must be smaller than n");
  }
  try {
    cfg.image.viewport.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("viewport", e.what());
  }
  if (cfg.image.pixel_scale < 1) throw ConfigError("image.pixel_scale", "must be >= 1");
  const auto& names = colormap_names();
  if (std::find(names.begin(), names.end(), cfg.image.colormap) == names.end()) {
    throw ConfigError("image.colormap", "unknown colormap '" + cfg.image.colormap + "'");
  }
  const auto seeds = cfg.effective_seeds();
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw ConfigError("seeds", "seeds must be pairwise distinct");
  }
}

// Builds G and b, reporting failures against the config field at fault.
inline Semigroup make_semigroup(const RunConfig& cfg) {
  std::vector<RationalMap> maps;
  for (std::size_t k = 0; k < cfg.generators.size(); ++k) {
    const std::string field = "generators[" + std::to_string(k) + "]";
    try {
      maps.emplace_back(Polynomial(cfg.generators[k].numerator), Polynomial(cfg.generators[k].denominator));
    } catch (const InvalidArgument& e) {
      throw ConfigError(field, e.what());
    }
  }
  std::optional<ProbabilityVector> b;
  try {
    b = cfg.b ? ProbabilityVector(*cfg.b) : ProbabilityVector::uniform(maps.size());
  } catch (const InvalidArgument& e) {
    throw ConfigError("b", e.what());
  }
  try {
    return Semigroup(std::move(maps), *b);
  } catch (const InvalidArgument& e) {
    const std::string what = e.what();
    throw ConfigError(what.find("weights") != std::string::npos ? "b" : "generators", what);
  }
}

inline nlohmann::json to_json(const RunConfig& cfg, const std::optional<Semigroup>& sg = std::nullopt) {
  using nlohmann::json;
  using detail::complex_json;
  json gens = json::array();
  for (const auto& g : cfg.generators) {
    json num = json::array(), den = json::array();
    for (const auto& c : g.numerator) num.push_back(complex_json(c));
    for (const auto& c : g.denominator) den.push_back(complex_json(c));
    gens.push_back({{"numerator", num}, {"denominator", den}});
  }
  json j;
  j["generators"] = gens;
  if (sg) {
    j["b"] = sg->b().weights();
  } else if (cfg.b) {
    j["b"] = *cfg.b;
  } else {
    j["b"] = nullptr;
  }
  j["a"] = complex_json(cfg.a);
  j["method"] = to_string(cfg.method);
  j["n"] = cfg.n;
  j["depth"] = cfg.depth;
  j["burn_in"] = cfg.burn_in;
  j["chains"] = cfg.chains;
  j["seed"] = cfg.seed;
  j["seeds"] = cfg.effective_seeds();
  j["threads"] = cfg.threads;
  j["max_atoms"] = cfg.max_atoms;
  const auto& vp = cfg.image.viewport;
  j["viewport"] = {{"center", complex_json(vp.center)}, {"width", vp.width}, {"height", vp.height}, {"nx", vp.nx}, {"ny", vp.ny}};
  j["image"] = {{"colormap", cfg.image.colormap},
                {"scale", cfg.image.scale == IntensityScale::Log ? "log" : "linear"},
                {"background", {cfg.image.background.r, cfg.image.background.g, cfg.image.background.b}},
                {"foreground", {cfg.image.foreground.r, cfg.image.foreground.g, cfg.image.foreground.b}},
                {"pixel_scale", cfg.image.pixel_scale}};
  j["output"] = {{"image", cfg.output.image}, {"grid", cfg.output.grid}, {"report", cfg.output.report}};
  if (!cfg.example.empty()) j["example"] = cfg.example;
  return j;
}

inline RunConfig load_config_file(const std::string& path, RunConfig base = {}) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config", "cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config", path + ": " + e.what());
  }
  try {
    return parse_config(j, std::move(base));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config", path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Built-in examples

inline std::vector<std::string> example_names() { return {"circle", "chebyshev", "annulus", "basilica"}; }

inline RunConfig builtin_example(const std::string& name) {
  RunConfig cfg;
  cfg.example = name;
  auto square = [&](double side, int res) {
    cfg.image.viewport = Viewport{{0.0, 0.0}, side, side, res, res};
  };
  if (name == "circle") {
    // <z^2>, J = unit circle
    cfg.generators = {{{0.0, 0.0, 1.0}, {1.0}}};
    cfg.a = 1.0;
    square(3.0, 512);
    cfg.depth = 20;
  } else if (name == "chebyshev") {
    // <z^2 - 2>, J = [-2, 2]
    cfg.generators = {{{-2.0, 0.0, 1.0}, {1.0}}};
    cfg.a = 0.0;
    square(5.0, 512);
    cfg.depth = 18;
  } else if (name == "annulus") {
    // <z^2, z^2/4>, J = {1 <= |z| <= 4}
    cfg.generators = {{{0.0, 0.0, 1.0}, {1.0}}, {{0.0, 0.0, 1.0}, {4.0}}};
    cfg.b = std::vector<double>{0.5, 0.5};
    cfg.a = 1.0;
    square(5.0, 128);
    cfg.depth = 8;
    cfg.n = 250'000;
  } else if (name == "basilica") {
    cfg.generators = {{{-1.0, 0.0, 1.0}, {1.0}}};
    cfg.a = 0.0;
    cfg.image.viewport = Viewport{{0.0, 0.0}, 3.6, 2.0, 720, 400};
  } else {
    throw ConfigError("example", "unknown example '" + name + "'");
  }
  return cfg;
}

}  // namespace semijulia
