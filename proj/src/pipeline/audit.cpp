#include "udos/pipeline/audit.hpp"

#include <fstream>

#include "udos/maskcore/coco.hpp"
#include "udos/maskcore/error.hpp"
#include "udos/pipeline/image_io.hpp"

namespace udos::pipeline {

void FileAudit::record(Access access, const std::filesystem::path& path) {
  std::lock_guard<std::mutex> lock(mu_);
  entries_.push_back({access, path.lexically_normal().string()});
}

nlohmann::json FileAudit::read_json(const std::filesystem::path& path) {
  record(Access::kRead, path);
  return read_json_file(path.string());
}

void FileAudit::write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  record(Access::kWrite, path);
  write_json_file(path.string(), j);
}

void FileAudit::write_text(const std::filesystem::path& path, const std::string& text) {
  record(Access::kWrite, path);
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

RgbImage FileAudit::read_image(const std::filesystem::path& path) {
  record(Access::kRead, path);
  return pipeline::read_image(path);
}

void FileAudit::write_image(const std::filesystem::path& path, const RgbImage& image) {
  record(Access::kWrite, path);
  pipeline::write_image(path, image);
}

std::vector<FileAudit::Entry> FileAudit::entries() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_;
}

bool FileAudit::was_read(const std::string& filename) const {
  std::lock_guard<std::mutex> lock(mu_);
  for (const auto& e : entries_) {
    if (e.access == Access::kRead && std::filesystem::path(e.path).filename() == filename) return true;
  }
  return false;
}

}  // namespace udos::pipeline
