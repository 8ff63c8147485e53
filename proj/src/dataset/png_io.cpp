#include "blursynth/dataset/png_io.hpp"

#include <array>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <png.h>

namespace blursynth::dataset {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) {
    throw IoError("cannot open " + path.string());
  }
  return f;
}

void check_signature(std::FILE* f, const std::filesystem::path& path) {
  std::array<png_byte, 8> sig{};
  if (std::fread(sig.data(), 1, sig.size(), f) != sig.size() ||
      png_sig_cmp(sig.data(), 0, sig.size()) != 0) {
    throw IoError("not a PNG file: " + path.string());
  }
}

// libpng reports errors through longjmp; the handler copies the message so
// it can be rethrown as an exception once control is back in C++ land.
struct ErrorSink {
  std::string message;
};

void on_error(png_structp png, png_const_charp msg) {
  auto* sink = static_cast<ErrorSink*>(png_get_error_ptr(png));
  if (sink) sink->message = msg;
  png_longjmp(png, 1);
}

void on_warning(png_structp, png_const_charp) {}

class Reader {
 public:
  Reader(const std::filesystem::path& path)
      : path_(path), file_(open_file(path, "rb")) {
    check_signature(file_.get(), path);
    png_ = png_create_read_struct(PNG_LIBPNG_VER_STRING, &sink_, on_error,
                                  on_warning);
    if (!png_) throw IoError("libpng init failed for " + path.string());
    info_ = png_create_info_struct(png_);
    if (!info_) {
      png_destroy_read_struct(&png_, nullptr, nullptr);
      throw IoError("libpng init failed for " + path.string());
    }
  }
  ~Reader() { png_destroy_read_struct(&png_, &info_, nullptr); }
  Reader(const Reader&) = delete;
  Reader& operator=(const Reader&) = delete;

  [[noreturn]] void fail() const {
    throw IoError("cannot decode " + path_.string() + ": " + sink_.message);
  }

  png_structp png() const { return png_; }
  png_infop info() const { return info_; }
  std::FILE* file() const { return file_.get(); }

 private:
  std::filesystem::path path_;
  FilePtr file_;
  ErrorSink sink_;
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

}  // namespace

PngInfo probe_png(const std::filesystem::path& path) {
  Reader r(path);
  if (setjmp(png_jmpbuf(r.png()))) r.fail();
  png_init_io(r.png(), r.file());
  png_set_sig_bytes(r.png(), 8);
  png_read_info(r.png(), r.info());
  return {static_cast<int>(png_get_image_width(r.png(), r.info())),
          static_cast<int>(png_get_image_height(r.png(), r.info())),
          png_get_bit_depth(r.png(), r.info())};
}

SrgbFrame read_png(const std::filesystem::path& path) {
  Reader r(path);
  // Everything touched after a longjmp must live outside this frame.
  std::vector<png_byte> pixels;
  std::vector<png_bytep> rows;
  int width = 0;
  int height = 0;
  int depth = 0;
  if (setjmp(png_jmpbuf(r.png()))) r.fail();

  png_init_io(r.png(), r.file());
  png_set_sig_bytes(r.png(), 8);
  png_read_info(r.png(), r.info());

  const auto color = png_get_color_type(r.png(), r.info());
  depth = png_get_bit_depth(r.png(), r.info());
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(r.png());
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) {
    png_set_expand_gray_1_2_4_to_8(r.png());
  }
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(r.png());
  }
  if (png_get_valid(r.png(), r.info(), PNG_INFO_tRNS)) {
    png_set_tRNS_to_alpha(r.png());
  }
  png_set_strip_alpha(r.png());
  png_read_update_info(r.png(), r.info());

  width = static_cast<int>(png_get_image_width(r.png(), r.info()));
  height = static_cast<int>(png_get_image_height(r.png(), r.info()));
  depth = png_get_bit_depth(r.png(), r.info());
  const std::size_t stride = png_get_rowbytes(r.png(), r.info());
  pixels.resize(stride * static_cast<std::size_t>(height));
  rows.resize(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) rows[y] = pixels.data() + stride * y;
  png_read_image(r.png(), rows.data());
  png_read_end(r.png(), nullptr);

  SrgbFrame frame(width, height);
  auto dst = frame.data();
  if (depth == 16) {
    for (int y = 0; y < height; ++y) {
      const png_byte* row = rows[y];
      for (int i = 0; i < width * 3; ++i) {
        const unsigned v = (static_cast<unsigned>(row[2 * i]) << 8) | row[2 * i + 1];
        dst[static_cast<std::size_t>(y) * width * 3 + i] =
            static_cast<float>(v / 65535.0);
      }
    }
  } else {
    for (int y = 0; y < height; ++y) {
      const png_byte* row = rows[y];
      for (int i = 0; i < width * 3; ++i) {
        dst[static_cast<std::size_t>(y) * width * 3 + i] =
            static_cast<float>(row[i] / 255.0);
      }
    }
  }
  return frame;
}

void write_png16(const std::filesystem::path& path, const SrgbFrame& frame) {
  const int width = frame.width();
  const int height = frame.height();
  std::vector<png_byte> pixels(static_cast<std::size_t>(width) * height * 6);
  auto src = frame.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const auto v = static_cast<std::uint16_t>(
        std::lround(static_cast<double>(clip_unit(src[i])) * 65535.0));
    // PNG stores 16-bit samples big-endian.
    pixels[2 * i] = static_cast<png_byte>(v >> 8);
    pixels[2 * i + 1] = static_cast<png_byte>(v & 0xff);
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) {
    rows[y] = pixels.data() + static_cast<std::size_t>(y) * width * 6;
  }

  FilePtr file = open_file(path, "wb");
  ErrorSink sink;
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, &sink, on_error, on_warning);
  if (!png) throw IoError("libpng init failed for " + path.string());
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng init failed for " + path.string());
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("cannot write " + path.string() + ": " + sink.message);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width),
               static_cast<png_uint_32>(height), 16, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.get()) != 0) {
    throw IoError("cannot write " + path.string());
  }
}

}  // namespace blursynth::dataset
