#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cctype>
#include <cstdint>
#include <span>
#include <fstream>
#include <string>
#include <vector>

#include "semijulia/error.hpp"
#include "semijulia/measure.hpp"

namespace semijulia {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

enum class IntensityScale { Linear, Log };

// How a grid becomes pixels. Each grid cell becomes a pixel_scale square
// block of pixels.
struct ImageSpec {
  Viewport viewport;
  std::string colormap = "fire";  // "fire", "ocean", "mono"
  IntensityScale scale = IntensityScale::Log;
  Rgb background{0, 0, 0};
  Rgb foreground{255, 255, 255};
  int pixel_scale = 1;
  double log_gain = 1000.0;
};

inline const std::vector<std::string>& colormap_names() {
  static const std::vector<std::string> names{"fire", "ocean", "mono"};
  return names;
}

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

  Rgb pixel(int x, int y) const {
    const auto k = 3 * (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x));
    return {rgb.at(k), rgb.at(k + 1), rgb.at(k + 2)};
  }
};

namespace detail {

inline std::uint8_t lerp_byte(std::uint8_t a, std::uint8_t b, double t) {
  return static_cast<std::uint8_t>(std::lround(a + (static_cast<double>(b) - a) * t));
}

inline Rgb lerp(Rgb a, Rgb b, double t) { return {lerp_byte(a.r, b.r, t), lerp_byte(a.g, b.g, t), lerp_byte(a.b, b.b, t)}; }

inline Rgb gradient(std::span<const Rgb> stops, double t) {
  t = std::clamp(t, 0.0, 1.0);
  const double pos = t * static_cast<double>(stops.size() - 1);
  const auto k = std::min(static_cast<std::size_t>(pos), stops.size() - 2);
  return lerp(stops[k], stops[k + 1], pos - static_cast<double>(k));
}

}  // namespace detail

// Colour for a lit cell at intensity t in (0, 1].
inline Rgb colormap_lookup(const ImageSpec& spec, double t) {
  static constexpr std::array<Rgb, 5> kFire{{{64, 0, 0}, {200, 30, 0}, {255, 140, 0}, {255, 255, 80}, {255, 255, 255}}};
  static constexpr std::array<Rgb, 4> kOcean{{{0, 0, 90}, {0, 90, 200}, {100, 220, 255}, {255, 255, 255}}};
  if (spec.colormap == "fire") return detail::gradient(kFire, t);
  if (spec.colormap == "ocean") return detail::gradient(kOcean, t);
  if (spec.colormap == "mono") return detail::lerp(spec.background, spec.foreground, t);
  throw InvalidArgument("unknown colormap '" + spec.colormap + "'");
}

// Normalized intensity of a cell holding `mass` when the heaviest holds
// `max_mass`. Non-decreasing in mass under both scales.
inline double cell_intensity(double mass, double max_mass, const ImageSpec& spec) {
  if (!(mass > 0.0) || !(max_mass > 0.0)) return 0.0;
  const double ratio = std::min(mass / max_mass, 1.0);
  if (spec.scale == IntensityScale::Linear) return ratio;
  return std::log1p(spec.log_gain * ratio) / std::log1p(spec.log_gain);
}

inline Image render_density(const GridMeasure& g, const ImageSpec& spec) {
  if (!(g.viewport == spec.viewport)) throw ViewportMismatch("render_density: grid and image viewports differ");
  if (spec.pixel_scale < 1) throw InvalidArgument("render_density: pixel_scale must be >= 1");
  const int nx = g.viewport.nx;
  const int ny = g.viewport.ny;
  const int s = spec.pixel_scale;
  Image img;
  img.width = nx * s;
  img.height = ny * s;
  img.rgb.resize(static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height) * 3);

  const double max_mass = g.cells.empty() ? 0.0 : *std::max_element(g.cells.begin(), g.cells.end());
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const double m = g.at(ix, iy);
      const Rgb c = m > 0.0 ? colormap_lookup(spec, cell_intensity(m, max_mass, spec)) : spec.background;
      for (int py = iy * s; py < (iy + 1) * s; ++py) {
        for (int px = ix * s; px < (ix + 1) * s; ++px) {
          const auto k = 3 * (static_cast<std::size_t>(py) * static_cast<std::size_t>(img.width) + static_cast<std::size_t>(px));
          img.rgb[k] = c.r;
          img.rgb[k + 1] = c.g;
          img.rgb[k + 2] = c.b;
        }
      }
    }
  }
  return img;
}

// Binary PPM: "P6\n<w> <h>\n255\n" followed by the RGB bytes.
inline std::vector<std::uint8_t> encode_ppm(const Image& img) {
  const std::string header = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.rgb.begin(), img.rgb.end());
  return out;
}

inline Image decode_ppm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  auto token = [&]() {
    while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
    std::string t;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) t.push_back(static_cast<char>(bytes[pos++]));
    return t;
  };
  if (token() != "P6") throw InvalidArgument("decode_ppm: not a P6 file");
  Image img;
  try {
    img.width = std::stoi(token());
    img.height = std::stoi(token());
    if (std::stoi(token()) != 255) throw InvalidArgument("decode_ppm: max value must be 255");
  } catch (const std::logic_error&) {
    throw InvalidArgument("decode_ppm: malformed header");
  }
  ++pos;  // single whitespace byte after maxval
  const auto n = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height) * 3;
  if (bytes.size() < pos + n) throw InvalidArgument("decode_ppm: truncated pixel data");
  img.rgb.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.begin() + static_cast<std::ptrdiff_t>(pos + n));
  return img;
}

inline void write_image(std::span<const std::uint8_t> bytes, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw Error("write failed for " + path);
}

}  // namespace semijulia
