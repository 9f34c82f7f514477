#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"

#include "udos/maskcore/image.hpp"

namespace udos::pipeline {

// Records every file the pipeline opens, in call order, so tests can assert
// which artifacts a run depended on.
class FileAudit {
 public:
  enum class Access { kRead, kWrite };
  struct Entry {
    Access access;
    std::string path;
  };

  nlohmann::json read_json(const std::filesystem::path& path);
  void write_json(const std::filesystem::path& path, const nlohmann::json& j);
  void write_text(const std::filesystem::path& path, const std::string& text);
  RgbImage read_image(const std::filesystem::path& path);
  void write_image(const std::filesystem::path& path, const RgbImage& image);
  void record(Access access, const std::filesystem::path& path);

  std::vector<Entry> entries() const;
  // True when any read touched a file with this name.
  bool was_read(const std::string& filename) const;

 private:
  mutable std::mutex mu_;
  std::vector<Entry> entries_;
};

}  // namespace udos::pipeline
