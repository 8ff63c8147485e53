#pragma once

#include <filesystem>
#include <stdexcept>

#include "blursynth/image.hpp"

namespace blursynth::dataset {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PngInfo {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
};

// Reads only the header; throws IoError naming the file if it is not a PNG.
PngInfo probe_png(const std::filesystem::path& path);

// 8- or 16-bit gray, gray+alpha, RGB or RGBA. Alpha is dropped, gray is
// replicated to three channels, samples are scaled to [0,1].
SrgbFrame read_png(const std::filesystem::path& path);

// 16-bit RGB, samples rounded from [0,1] to [0,65535].
void write_png16(const std::filesystem::path& path, const SrgbFrame& frame);

}  // namespace blursynth::dataset
