#include "udos/pipeline/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "udos/maskcore/error.hpp"

namespace udos::pipeline {

namespace {

std::vector<uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open image " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

RgbImage decode_png(const std::vector<uint8_t>& bytes, const std::string& name) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
    throw FormatError(name + ": " + img.message);
  }
  img.format = PNG_FORMAT_RGB;
  RgbImage out(static_cast<int>(img.height), static_cast<int>(img.width));
  if (!png_image_finish_read(&img, nullptr, out.pixels.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw FormatError(name + ": " + msg);
  }
  return out;
}

// Reads the next PPM header token, skipping whitespace and # comments.
class PpmReader {
 public:
  PpmReader(const std::vector<uint8_t>& bytes, std::string name) : b_(bytes), name_(std::move(name)) {}

  int next_int() {
    skip_space();
    if (pos_ >= b_.size() || !std::isdigit(b_[pos_])) throw FormatError(name_ + ": malformed PPM header");
    long v = 0;
    while (pos_ < b_.size() && std::isdigit(b_[pos_])) {
      v = v * 10 + (b_[pos_++] - '0');
      if (v > (1 << 24)) throw FormatError(name_ + ": PPM value out of range");
    }
    return static_cast<int>(v);
  }

  size_t pos() const { return pos_; }
  void advance(size_t n) { pos_ += n; }

 private:
  void skip_space() {
    while (pos_ < b_.size()) {
      if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else if (std::isspace(b_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<uint8_t>& b_;
  std::string name_;
  size_t pos_ = 2;
};

RgbImage decode_ppm(const std::vector<uint8_t>& bytes, const std::string& name) {
  const bool binary = bytes[1] == '6';
  PpmReader r(bytes, name);
  const int w = r.next_int();
  const int h = r.next_int();
  const int maxval = r.next_int();
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) {
    throw FormatError(name + ": unsupported PPM dimensions or maxval");
  }
  RgbImage out(h, w);
  const auto scale = [maxval](int v) { return static_cast<uint8_t>((v * 255 + maxval / 2) / maxval); };
  if (binary) {
    r.advance(1);  // single whitespace byte after maxval
    const size_t need = out.pixels.size();
    if (bytes.size() - std::min(bytes.size(), r.pos()) < need) throw FormatError(name + ": truncated PPM data");
    for (size_t i = 0; i < need; ++i) out.pixels[i] = scale(bytes[r.pos() + i]);
  } else {
    for (auto& p : out.pixels) {
      const int v = r.next_int();
      if (v > maxval) throw FormatError(name + ": PPM sample exceeds maxval");
      p = scale(v);
    }
  }
  return out;
}

}  // namespace

RgbImage read_image(const std::filesystem::path& path) {
  const std::vector<uint8_t> bytes = slurp(path);
  static const uint8_t kPngMagic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::equal(kPngMagic, kPngMagic + 8, bytes.begin())) {
    return decode_png(bytes, path.string());
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '6' || bytes[1] == '3')) {
    return decode_ppm(bytes, path.string());
  }
  throw FormatError(path.string() + ": not a PNG or PPM image");
}

void write_png(const std::filesystem::path& path, const RgbImage& image) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width);
  img.height = static_cast<png_uint_32>(image.height);
  img.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&img, path.string().c_str(), 0, image.pixels.data(), 0, nullptr)) {
    throw IoError("cannot write " + path.string() + ": " + img.message);
  }
}

void write_ppm(const std::filesystem::path& path, const RgbImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

void write_image(const std::filesystem::path& path, const RgbImage& image) {
  if (path.extension() == ".ppm") {
    write_ppm(path, image);
  } else {
    write_png(path, image);
  }
}

bool is_image_file(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".ppm";
}

}  // namespace udos::pipeline
