#include "qcf/render.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <iterator>

#include "qcf/kernels.hpp"

namespace qcf {

std::size_t SignedMask::occupied_count() const {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](std::uint8_t c) { return c != 0; }));
}

OccupancyGrid SignedMask::occupancy() const {
  OccupancyGrid g{resolution, cells};
  for (auto& c : g.cells) c = c ? 1 : 0;
  return g;
}

SignedMask rasterize_support(const SupportApprox& support, int resolution) {
  if (resolution < kMinResolution)
    throw ResolutionTooSmall("resolution " + std::to_string(resolution) + " is below the minimum of " +
                             std::to_string(kMinResolution));
  return SignedMask{resolution, kernels::rasterize(support.rects(), resolution)};
}

namespace {

constexpr std::array<std::uint8_t, 4> kGrey{255, 170, 60, 110};
constexpr std::array<std::array<std::uint8_t, 3>, 4> kColour{{{255, 255, 255}, {170, 170, 170}, {60, 60, 60}, {255, 0, 0}}};

}  // namespace

std::string encode_image(const SignedMask& mask, ImageFormat format) {
  const int n = mask.resolution;
  const bool pgm = format == ImageFormat::Pgm;
  std::string out = (pgm ? "P5\n" : "P6\n") + std::to_string(n) + " " + std::to_string(n) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(n) * n * (pgm ? 1 : 3));
  for (int y = n - 1; y >= 0; --y)
    for (int x = 0; x < n; ++x) {
      const auto c = static_cast<std::size_t>(mask.at(x, y)) & 3;
      if (pgm) {
        out.push_back(static_cast<char>(kGrey[c]));
      } else {
        for (auto channel : kColour[c]) out.push_back(static_cast<char>(channel));
      }
    }
  return out;
}

void write_image(const SignedMask& mask, ImageFormat format, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoFailure("cannot open " + path.string() + " for writing");
  const std::string bytes = encode_image(mask, format);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw IoFailure("failed writing " + path.string());
}

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(const std::string& data, std::size_t& pos) {
  while (pos < data.size()) {
    if (std::isspace(static_cast<unsigned char>(data[pos]))) {
      ++pos;
    } else if (data[pos] == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
  return data.substr(start, pos - start);
}

int header_int(const std::string& data, std::size_t& pos, const std::string& what) {
  const std::string tok = header_token(data, pos);
  try {
    return std::stoi(tok);
  } catch (const std::exception&) {
    throw IoFailure("bad image " + what + ": '" + tok + "'");
  }
}

}  // namespace

OccupancyGrid read_occupancy_image(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoFailure("cannot open " + path.string());
  const std::string data((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  const std::string magic = header_token(data, pos);
  if (magic != "P5" && magic != "P6") throw IoFailure(path.string() + " is not a binary PGM or PPM image");
  const int channels = magic == "P5" ? 1 : 3;
  const int width = header_int(data, pos, "width");
  const int height = header_int(data, pos, "height");
  const int maxval = header_int(data, pos, "maximum value");
  if (width != height || width <= 0) throw IoFailure("occupancy images must be square");
  if (maxval <= 0 || maxval > 255) throw IoFailure("only 8-bit images are supported");
  ++pos;  // single whitespace byte before the raster
  const std::size_t needed = static_cast<std::size_t>(width) * height * channels;
  if (data.size() < pos + needed) throw IoFailure(path.string() + " is truncated");

  OccupancyGrid g{width, std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height, 0)};
  for (int row = 0; row < height; ++row)
    for (int x = 0; x < width; ++x) {
      const std::size_t at = pos + (static_cast<std::size_t>(row) * width + x) * channels;
      bool white = true;
      for (int c = 0; c < channels; ++c) white = white && static_cast<unsigned char>(data[at + c]) == maxval;
      g.cells[static_cast<std::size_t>(height - 1 - row) * width + x] = white ? 0 : 1;
    }
  return g;
}

}  // namespace qcf
