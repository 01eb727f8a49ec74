#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcf/ifs_support.hpp"

namespace qcf {

enum class Pixel : std::uint8_t { Empty = 0, Positive = 1, Negative = 2, Mixed = 3 };

/// Sign-coloured raster of a support approximation. Cell values are bit sets
/// (1 = touched by positive mass, 2 = touched by negative mass); row 0 is the
/// bottom edge v = 0.
struct SignedMask {
  int resolution = 0;
  std::vector<std::uint8_t> cells;

  Pixel at(int x, int y) const { return static_cast<Pixel>(cells[static_cast<std::size_t>(y) * resolution + x]); }
  std::size_t occupied_count() const;
  OccupancyGrid occupancy() const;
};

class ResolutionTooSmall : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMinResolution = 16;

/// Pixel [x/N, (x+1)/N] x [y/N, (y+1)/N] is marked when it shares positive
/// area with a rectangle; the test is exact on rational corners.
SignedMask rasterize_support(const SupportApprox& support, int resolution);

enum class ImageFormat { Pgm, Ppm };

/// Binary P5/P6 bytes, top row first. Grey levels: empty 255, positive 170,
/// negative 60, mixed 110; PPM uses white, light grey, dark grey and red.
std::string encode_image(const SignedMask& mask, ImageFormat format);
void write_image(const SignedMask& mask, ImageFormat format, const std::filesystem::path& path);

/// Reads a P5 or P6 image; every non-white pixel counts as occupied.
OccupancyGrid read_occupancy_image(const std::filesystem::path& path);

}  // namespace qcf
