#pragma once

#include <filesystem>

#include "udos/maskcore/image.hpp"

namespace udos::pipeline {

// PNG (any bit depth or color type, converted to 8-bit RGB) or binary/ASCII
// PPM (P6/P3, maxval up to 255), chosen by content. NotFoundError when the
// file is missing, FormatError when it cannot be decoded.
RgbImage read_image(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const RgbImage& image);
void write_ppm(const std::filesystem::path& path, const RgbImage& image);
// By extension: .ppm writes PPM, anything else PNG.
void write_image(const std::filesystem::path& path, const RgbImage& image);

bool is_image_file(const std::filesystem::path& path);

}  // namespace udos::pipeline
