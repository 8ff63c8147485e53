#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>

#include "blursynth/blur_synth.hpp"
#include "blursynth/frame_interp.hpp"
#include "blursynth/isp.hpp"

namespace blursynth::dataset {

enum class ProfileMode { Fixed, PerSequenceRandom };

struct JobConfig {
  std::filesystem::path input_root;
  std::filesystem::path output_root;
  std::uint64_t seed = 0;
  // 1 disables interpolation; otherwise a power of two.
  int factor = 8;
  synth::WindowPolicy window;
  ProfileMode profile_mode = ProfileMode::PerSequenceRandom;
  // Used when profile_mode == Fixed.
  isp::CameraProfile fixed_profile;
  // CFA for randomly sampled profiles.
  CfaPattern random_cfa = CfaPattern::RGGB;
  bool baseline_rgb = false;
  int workers = 1;
  interp::PyramidConfig flow;
  // Informational; copied into the manifest.
  double frame_rate = 240.0;

  void validate() const;
};

// TOML layout:
//
//   input = "frames"        # relative paths resolve against the file's dir
//   output = "out"
//   seed = 7
//   factor = 8
//   baseline_rgb = false
//   workers = 4
//   frame_rate = 240.0
//   [window]   m_min = 17, m_max = 65, stride = 65 (defaults to m_max)
//   [profile]  mode = "random" | "fixed", cfa = "RGGB",
//              wb_gains = [r, 1, b], ccm = [[..],[..],[..]],
//              crf = "gamma" | "srgb", gamma = 2.2
//   [flow]     levels = 4, window_radius = 7, iterations = 3, max_flow = 64
//
// Throws std::invalid_argument on malformed or out-of-range values.
JobConfig parse_config(std::string_view toml_text,
                       const std::filesystem::path& base_dir);
JobConfig load_config(const std::filesystem::path& file);

}  // namespace blursynth::dataset
