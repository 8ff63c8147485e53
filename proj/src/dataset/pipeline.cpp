#include "blursynth/dataset/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "blursynth/dataset/png_io.hpp"
#include "blursynth/frame_interp.hpp"
#include "blursynth/rng.hpp"

namespace blursynth::dataset {

namespace fs = std::filesystem;

namespace {

bool is_png(const fs::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png";
}

std::vector<fs::path> sorted_pngs(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_png(entry.path())) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  return files;
}

std::string pair_name(const std::string& sequence, std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "_%04zu.png", index);
  return sequence + buf;
}

class Logger {
 public:
  explicit Logger(std::ostream* out) : out_(out) {}
  void operator()(const std::string& msg) {
    if (!out_) return;
    std::lock_guard lock(mu_);
    *out_ << msg << '\n';
  }

 private:
  std::ostream* out_;
  std::mutex mu_;
};

std::vector<SrgbFrame> load_sequence(const SequenceSource& source, int factor,
                                     const interp::PyramidConfig& flow) {
  std::vector<SrgbFrame> frames;
  frames.reserve(source.frames.size());
  for (const auto& p : source.frames) {
    frames.push_back(read_png(p));
    if (frames.back().width() != source.width ||
        frames.back().height() != source.height) {
      throw IoError("frame " + p.string() + " changed size since ingest");
    }
  }
  if (factor == 1) return frames;
  return interp::upsample_frame_rate(frames, factor, flow);
}

struct SequenceOutcome {
  std::vector<ManifestEntry> entries;
  std::vector<fs::path> written;
  bool failed = false;
};

// Fills `outcome` as it goes so a caller catching an exception still knows
// which files were written.
void run_sequence(const JobConfig& cfg, const SequenceSource& source,
                  SequenceOutcome& outcome) {
  SeedLineage seeds;
  seeds.master = cfg.seed;
  seeds.sequence = derive_seed(cfg.seed, source.id);
  seeds.window = derive_seed(seeds.sequence, "window");
  seeds.profile = derive_seed(seeds.sequence, "profile");

  const auto frames = load_sequence(source, cfg.factor, cfg.flow);
  if (frames.size() < static_cast<std::size_t>(cfg.window.m_min)) {
    throw std::invalid_argument(
        "sequence has " + std::to_string(frames.size()) +
        " frames after interpolation, fewer than m_min=" +
        std::to_string(cfg.window.m_min));
  }
  const auto windows = synth::sample_window(cfg.window, frames.size(), seeds.window);
  const isp::CameraProfile profile =
      cfg.profile_mode == ProfileMode::Fixed
          ? cfg.fixed_profile
          : isp::sample_profile(seeds.profile, cfg.random_cfa);

  auto emit = [&](Domain domain, std::size_t index,
                  const synth::ExposureWindow& window,
                  const synth::FramePair& pair) {
    const std::string dom(to_string(domain));
    const std::string name = pair_name(source.id, index);
    const std::string blurry = dom + "/blur/" + name;
    const std::string sharp = dom + "/sharp/" + name;
    outcome.written.push_back(cfg.output_root / blurry);
    write_png16(cfg.output_root / blurry, pair.blurry);
    outcome.written.push_back(cfg.output_root / sharp);
    write_png16(cfg.output_root / sharp, pair.sharp);

    ManifestRecord rec;
    rec.sequence = source.id;
    rec.pair_index = index;
    rec.window = window;
    if (domain == Domain::Raw) rec.profile = profile;
    rec.blurry = blurry;
    rec.sharp = sharp;
    rec.domain = domain;
    rec.seeds = seeds;
    rec.factor = cfg.factor;
    rec.frame_rate = source.frame_rate * cfg.factor;
    outcome.entries.emplace_back(std::move(rec));
  };

  for (std::size_t k = 0; k < windows.size(); ++k) {
    emit(Domain::Raw, k, windows[k],
         synth::synthesize_pair_raw(frames, windows[k], profile));
    if (cfg.baseline_rgb) {
      emit(Domain::Rgb, k, windows[k], synth::synthesize_pair_rgb(frames, windows[k]));
    }
  }
}

std::string format_metric(double v, int precision) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "n/a";
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

PartitionScore summarize(const std::string& label,
                         const std::vector<const ImageScore*>& members) {
  PartitionScore row;
  row.label = label;
  row.count = members.size();
  if (members.empty()) {
    row.psnr_db = std::numeric_limits<double>::quiet_NaN();
    row.ssim = std::numeric_limits<double>::quiet_NaN();
    return row;
  }
  for (const auto* m : members) {
    row.psnr_db += m->report.psnr_db;
    row.ssim += m->report.ssim;
  }
  row.psnr_db /= static_cast<double>(members.size());
  row.ssim /= static_cast<double>(members.size());
  return row;
}

}  // namespace

std::vector<SequenceSource> ingest(const fs::path& root, double frame_rate,
                                   std::ostream* log) {
  if (!fs::is_directory(root)) {
    throw IoError("input root is not a directory: " + root.string());
  }
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty() && log) {
    *log << "warning: no sequence directories under " << root.string() << '\n';
  }

  std::vector<SequenceSource> sources;
  for (const auto& dir : dirs) {
    SequenceSource src;
    src.id = dir.filename().string();
    src.root = dir;
    src.frame_rate = frame_rate;
    src.frames = sorted_pngs(dir);
    if (src.frames.empty()) {
      throw std::invalid_argument("sequence directory has no PNG frames: " +
                                  dir.string());
    }
    for (const auto& f : src.frames) {
      const PngInfo info = probe_png(f);
      if (src.width == 0) {
        src.width = info.width;
        src.height = info.height;
      } else if (info.width != src.width || info.height != src.height) {
        throw std::invalid_argument(
            "frame " + f.string() + " is " + std::to_string(info.width) + "x" +
            std::to_string(info.height) + ", expected " +
            std::to_string(src.width) + "x" + std::to_string(src.height));
      }
    }
    sources.push_back(std::move(src));
  }
  return sources;
}

SynthesisSummary synthesize(const JobConfig& config,
                            std::span<const SequenceSource> sources,
                            std::ostream* log) {
  config.validate();
  for (const auto* sub : {"raw/blur", "raw/sharp", "rgb/blur", "rgb/sharp"}) {
    if (std::string_view(sub).starts_with("rgb") && !config.baseline_rgb) continue;
    fs::create_directories(config.output_root / sub);
  }

  Logger logger(log);
  std::vector<SequenceOutcome> outcomes(sources.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < sources.size(); i = next++) {
      const auto& src = sources[i];
      try {
        run_sequence(config, src, outcomes[i]);
        logger("sequence " + src.id + ": " +
               std::to_string(outcomes[i].entries.size()) + " records");
      } catch (const std::exception& e) {
        std::error_code ec;
        for (const auto& p : outcomes[i].written) fs::remove(p, ec);
        outcomes[i] = {};
        outcomes[i].failed = true;
        outcomes[i].entries.emplace_back(SequenceFailure{src.id, e.what()});
        logger("sequence " + src.id + " failed: " + e.what());
      }
    }
  };
  const auto n_threads = static_cast<std::size_t>(config.workers);
  if (n_threads <= 1 || sources.size() <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < std::min(n_threads, sources.size()); ++t) {
      pool.emplace_back(worker);
    }
  }

  SynthesisSummary summary;
  for (auto& o : outcomes) {
    if (o.failed) ++summary.failed_sequences;
    for (auto& e : o.entries) {
      if (std::holds_alternative<ManifestRecord>(e) &&
          std::get<ManifestRecord>(e).domain == Domain::Raw) {
        ++summary.pairs;
      }
      summary.entries.push_back(std::move(e));
    }
  }
  summary.manifest_path = config.output_root / "manifest.jsonl";
  write_manifest(summary.manifest_path, summary.entries);
  return summary;
}

synth::FramePair reproduce(const ManifestRecord& record,
                           const SequenceSource& source,
                           const interp::PyramidConfig& flow) {
  const auto frames = load_sequence(source, record.factor, flow);
  if (record.domain == Domain::Rgb) {
    return synth::synthesize_pair_rgb(frames, record.window);
  }
  if (!record.profile) {
    throw std::invalid_argument("reproduce: RAW record without a profile");
  }
  return synth::synthesize_pair_raw(frames, record.window, *record.profile);
}

EvaluationReport evaluate(const fs::path& pred_dir, const fs::path& gt_dir,
                          std::span<const std::string> partitions) {
  for (const auto& d : {pred_dir, gt_dir}) {
    if (!fs::is_directory(d)) throw IoError("not a directory: " + d.string());
  }
  std::set<std::string> pred_names;
  std::set<std::string> gt_names;
  for (const auto& p : sorted_pngs(pred_dir)) pred_names.insert(p.filename().string());
  for (const auto& p : sorted_pngs(gt_dir)) gt_names.insert(p.filename().string());

  EvaluationReport report;
  std::set_symmetric_difference(pred_names.begin(), pred_names.end(),
                                gt_names.begin(), gt_names.end(),
                                std::back_inserter(report.unmatched));
  for (const auto& name : pred_names) {
    if (!gt_names.contains(name)) continue;
    const auto pred = read_png(pred_dir / name);
    const auto gt = read_png(gt_dir / name);
    if (!pred.same_shape(gt)) {
      throw std::invalid_argument("evaluate: " + name + " differs in size between " +
                                  pred_dir.string() + " and " + gt_dir.string());
    }
    report.images.push_back({name, metrics::compare(gt, pred)});
  }

  for (const auto& prefix : partitions) {
    std::vector<const ImageScore*> members;
    for (const auto& img : report.images) {
      if (img.name.starts_with(prefix)) members.push_back(&img);
    }
    report.rows.push_back(summarize(prefix, members));
  }
  std::vector<const ImageScore*> all;
  for (const auto& img : report.images) all.push_back(&img);
  report.rows.push_back(summarize("Average", all));
  return report;
}

void write_csv(const EvaluationReport& report, std::ostream& out) {
  out << "scope,name,count,psnr_db,ssim\n";
  for (const auto& img : report.images) {
    out << "image," << img.name << ",1," << format_metric(img.report.psnr_db, 4)
        << ',' << format_metric(img.report.ssim, 6) << '\n';
  }
  for (const auto& row : report.rows) {
    out << "partition," << row.label << ',' << row.count << ','
        << format_metric(row.psnr_db, 4) << ',' << format_metric(row.ssim, 6)
        << '\n';
  }
}

void print_table(const EvaluationReport& report, std::ostream& out) {
  std::size_t width = 10;
  for (const auto& img : report.images) width = std::max(width, img.name.size());
  for (const auto& row : report.rows) width = std::max(width, row.label.size());
  const int w = static_cast<int>(width) + 2;

  out << std::left << std::setw(w) << "image" << std::right << std::setw(10)
      << "PSNR" << std::setw(10) << "SSIM" << '\n';
  for (const auto& img : report.images) {
    out << std::left << std::setw(w) << img.name << std::right << std::setw(10)
        << format_metric(img.report.psnr_db, 2) << std::setw(10)
        << format_metric(img.report.ssim, 4) << '\n';
  }
  out << '\n'
      << std::left << std::setw(w) << "partition" << std::right << std::setw(6)
      << "n" << std::setw(10) << "PSNR" << std::setw(10) << "SSIM" << '\n';
  for (const auto& row : report.rows) {
    out << std::left << std::setw(w) << row.label << std::right << std::setw(6)
        << row.count << std::setw(10) << format_metric(row.psnr_db, 2)
        << std::setw(10) << format_metric(row.ssim, 4) << '\n';
  }
  for (const auto& name : report.unmatched) {
    out << "unmatched: " << name << '\n';
  }
}

ManifestSummary inspect(const std::vector<ManifestEntry>& entries) {
  ManifestSummary s;
  s.gain_min.fill(std::numeric_limits<double>::infinity());
  s.gain_max.fill(-std::numeric_limits<double>::infinity());
  s.gamma_min = std::numeric_limits<double>::infinity();
  s.gamma_max = -std::numeric_limits<double>::infinity();

  std::set<std::string> sequences;
  std::set<std::string> profiled;
  for (const auto& e : entries) {
    if (const auto* f = std::get_if<SequenceFailure>(&e)) {
      ++s.failed_sequences;
      sequences.insert(f->sequence);
      continue;
    }
    const auto& r = std::get<ManifestRecord>(e);
    sequences.insert(r.sequence);
    if (r.domain == Domain::Rgb) {
      ++s.rgb_records;
      continue;
    }
    ++s.raw_records;
    ++s.window_lengths[r.window.length()];
    // One profile per sequence.
    if (!r.profile || !profiled.insert(r.sequence).second) continue;
    const auto& p = *r.profile;
    for (int c = 0; c < 3; ++c) {
      s.gain_min[c] = std::min(s.gain_min[c], p.wb_gains[c]);
      s.gain_max[c] = std::max(s.gain_max[c], p.wb_gains[c]);
    }
    if (p.crf.kind() == isp::Crf::Kind::Gamma) {
      ++s.gamma_profiles;
      s.gamma_min = std::min(s.gamma_min, p.crf.exponent());
      s.gamma_max = std::max(s.gamma_max, p.crf.exponent());
    } else {
      ++s.srgb_profiles;
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (i != j) s.ccm_offdiag_max = std::max(s.ccm_offdiag_max, std::abs(p.ccm(i, j)));
      }
    }
  }
  s.sequences = sequences.size();
  return s;
}

void print_summary(const ManifestSummary& s, std::ostream& out) {
  out << "sequences:        " << s.sequences << " (" << s.failed_sequences
      << " failed)\n"
      << "raw pairs:        " << s.raw_records << '\n'
      << "rgb pairs:        " << s.rgb_records << '\n'
      << "window lengths:\n";
  std::size_t peak = 0;
  for (const auto& [m, count] : s.window_lengths) peak = std::max(peak, count);
  for (const auto& [m, count] : s.window_lengths) {
    const std::size_t bar = peak == 0 ? 0 : (count * 40 + peak - 1) / peak;
    out << "  M=" << std::setw(3) << m << std::setw(7) << count << "  "
        << std::string(bar, '#') << '\n';
  }
  const std::size_t profiles = s.gamma_profiles + s.srgb_profiles;
  out << "profiles:         " << profiles << " (" << s.gamma_profiles
      << " gamma, " << s.srgb_profiles << " sRGB)\n";
  if (profiles > 0) {
    static constexpr const char* kNames[3] = {"red", "green", "blue"};
    for (int c = 0; c < 3; ++c) {
      out << "  " << kNames[c] << " gain:     [" << format_metric(s.gain_min[c], 3)
          << ", " << format_metric(s.gain_max[c], 3) << "]\n";
    }
    if (s.gamma_profiles > 0) {
      out << "  gamma:        [" << format_metric(s.gamma_min, 3) << ", "
          << format_metric(s.gamma_max, 3) << "]\n";
    }
    out << "  |ccm off-diag| max: " << format_metric(s.ccm_offdiag_max, 3) << '\n';
  }
}

}  // namespace blursynth::dataset
