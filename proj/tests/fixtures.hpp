#pragma once

// Filesystem scaffolding for tests that run the dataset pipeline.

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "blursynth/dataset/png_io.hpp"
#include "blursynth/image.hpp"

namespace blursynth::testing {

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "blursynth") {
    std::random_device rd;
    const auto base = std::filesystem::temp_directory_path();
    do {
      path_ = base / (tag + "-" + std::to_string(rd()));
    } while (std::filesystem::exists(path_));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& sub) const { return path_ / sub; }

 private:
  std::filesystem::path path_;
};

inline std::string frame_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%04zu.png", i);
  return buf;
}

inline void write_sequence(const std::filesystem::path& dir,
                           std::span<const SrgbFrame> frames) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    dataset::write_png16(dir / frame_name(i), frames[i]);
  }
}

inline std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Relative path -> bytes for every regular file under `root`.
inline std::vector<std::pair<std::string, std::string>> snapshot(
    const std::filesystem::path& root) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) {
      files.emplace_back(std::filesystem::relative(e.path(), root).generic_string(),
                         read_bytes(e.path()));
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace blursynth::testing
