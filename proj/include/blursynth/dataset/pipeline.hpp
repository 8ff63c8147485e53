#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "blursynth/blur_synth.hpp"
#include "blursynth/dataset/config.hpp"
#include "blursynth/dataset/manifest.hpp"
#include "blursynth/quality_metrics.hpp"

namespace blursynth::dataset {

struct SequenceSource {
  std::string id;
  std::filesystem::path root;
  // Sorted lexicographically by filename.
  std::vector<std::filesystem::path> frames;
  int width = 0;
  int height = 0;
  double frame_rate = 0.0;
};

// One source per subdirectory of `root`, in name order. Frames are the
// *.png files of each subdirectory. Throws IoError / std::invalid_argument
// naming the offending file or directory. An empty root yields an empty list
// and a warning on `log`.
std::vector<SequenceSource> ingest(const std::filesystem::path& root,
                                   double frame_rate = 0.0,
                                   std::ostream* log = nullptr);

struct SynthesisSummary {
  std::vector<ManifestEntry> entries;
  std::size_t pairs = 0;
  std::size_t failed_sequences = 0;
  std::filesystem::path manifest_path;
};

// Runs the full pipeline per sequence on `config.workers` threads and writes
// images plus <output_root>/manifest.jsonl. Output is independent of the
// worker count. A failing sequence is recorded and its files removed; the
// others proceed.
SynthesisSummary synthesize(const JobConfig& config,
                            std::span<const SequenceSource> sources,
                            std::ostream* log = nullptr);

// Recomputes the pair behind one manifest record from its source sequence.
synth::FramePair reproduce(const ManifestRecord& record,
                           const SequenceSource& source,
                           const interp::PyramidConfig& flow = {});

struct ImageScore {
  std::string name;
  metrics::MetricReport report;
};

struct PartitionScore {
  std::string label;
  std::size_t count = 0;
  double psnr_db = 0.0;
  double ssim = 0.0;
};

struct EvaluationReport {
  std::vector<ImageScore> images;
  // One row per requested prefix, then "Average" over every matched image.
  std::vector<PartitionScore> rows;
  // Filenames present in only one of the two directories.
  std::vector<std::string> unmatched;
};

EvaluationReport evaluate(const std::filesystem::path& pred_dir,
                          const std::filesystem::path& gt_dir,
                          std::span<const std::string> partitions = {});

void write_csv(const EvaluationReport& report, std::ostream& out);
void print_table(const EvaluationReport& report, std::ostream& out);

struct ManifestSummary {
  std::size_t raw_records = 0;
  std::size_t rgb_records = 0;
  std::size_t failed_sequences = 0;
  std::size_t sequences = 0;
  std::map<std::size_t, std::size_t> window_lengths;
  std::array<double, 3> gain_min{};
  std::array<double, 3> gain_max{};
  std::size_t gamma_profiles = 0;
  std::size_t srgb_profiles = 0;
  double gamma_min = 0.0;
  double gamma_max = 0.0;
  double ccm_offdiag_max = 0.0;
};

ManifestSummary inspect(const std::vector<ManifestEntry>& entries);
void print_summary(const ManifestSummary& summary, std::ostream& out);

}  // namespace blursynth::dataset
