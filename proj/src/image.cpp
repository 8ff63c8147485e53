#include "blursynth/image.hpp"

#include <array>

namespace blursynth {

namespace {

// Tile layout, row-major: (0,0) (1,0) (0,1) (1,1).
constexpr std::array<std::array<Channel, 4>, 4> kTiles = {{
    {Channel::Red, Channel::Green, Channel::Green, Channel::Blue},   // RGGB
    {Channel::Blue, Channel::Green, Channel::Green, Channel::Red},   // BGGR
    {Channel::Green, Channel::Red, Channel::Blue, Channel::Green},   // GRBG
    {Channel::Green, Channel::Blue, Channel::Red, Channel::Green},   // GBRG
}};

}  // namespace

Channel cfa_channel(CfaPattern cfa, int x, int y) {
  return kTiles[static_cast<std::size_t>(cfa)][(y & 1) * 2 + (x & 1)];
}

std::string_view to_string(CfaPattern cfa) {
  switch (cfa) {
    case CfaPattern::RGGB: return "RGGB";
    case CfaPattern::BGGR: return "BGGR";
    case CfaPattern::GRBG: return "GRBG";
    case CfaPattern::GBRG: return "GBRG";
  }
  return "?";
}

CfaPattern parse_cfa(std::string_view name) {
  for (auto cfa : {CfaPattern::RGGB, CfaPattern::BGGR, CfaPattern::GRBG,
                   CfaPattern::GBRG}) {
    if (to_string(cfa) == name) return cfa;
  }
  throw std::invalid_argument("unknown CFA pattern '" + std::string(name) +
                              "' (expected RGGB, BGGR, GRBG or GBRG)");
}

RawFrame::RawFrame(int width, int height, CfaPattern cfa, float fill)
    : width_(width), height_(height), cfa_(cfa) {
  if (width <= 0 || height <= 0 || width % 2 != 0 || height % 2 != 0) {
    throw std::invalid_argument(
        "RawFrame: dimensions must be positive and even (complete Bayer "
        "tiles), got " +
        std::to_string(width) + "x" + std::to_string(height));
  }
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

}  // namespace blursynth
