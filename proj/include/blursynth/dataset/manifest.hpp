#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "blursynth/blur_synth.hpp"
#include "blursynth/isp.hpp"

namespace blursynth::dataset {

enum class Domain { Raw, Rgb };

std::string_view to_string(Domain d);

// Every seed that fed a record, from the job's master seed down.
struct SeedLineage {
  std::uint64_t master = 0;
  std::uint64_t sequence = 0;
  std::uint64_t window = 0;
  std::uint64_t profile = 0;

  bool operator==(const SeedLineage&) const = default;
};

struct ManifestRecord {
  std::string sequence;
  std::size_t pair_index = 0;
  synth::ExposureWindow window{0, 3};
  // Absent for RGB-domain records, which bypass the ISP.
  std::optional<isp::CameraProfile> profile;
  // Relative to the output root.
  std::string blurry;
  std::string sharp;
  Domain domain = Domain::Raw;
  SeedLineage seeds;
  int factor = 1;
  double frame_rate = 0.0;

  bool operator==(const ManifestRecord&) const = default;
};

struct SequenceFailure {
  std::string sequence;
  std::string error;

  bool operator==(const SequenceFailure&) const = default;
};

using ManifestEntry = std::variant<ManifestRecord, SequenceFailure>;

nlohmann::json profile_to_json(const isp::CameraProfile& p);
isp::CameraProfile profile_from_json(const nlohmann::json& j);

nlohmann::json entry_to_json(const ManifestEntry& entry);
ManifestEntry entry_from_json(const nlohmann::json& j);

// One compact JSON object per line, keys sorted.
void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

}  // namespace blursynth::dataset
