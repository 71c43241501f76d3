#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include "storesim/errors.hpp"

namespace storesim {

// Append-only line sink. One record per line; every line is flushed as soon
// as it is written so concurrently running sims stream instead of batching.
class JsonlWriter {
 public:
  explicit JsonlWriter(const std::filesystem::path& path) : path_(path) {
    std::filesystem::create_directories(path.parent_path().empty()
                                            ? std::filesystem::path(".")
                                            : path.parent_path());
    out_.open(path, std::ios::out | std::ios::trunc);
    if (!out_) throw ParseError("cannot open for writing: " + path.string());
  }

  void write_line(std::string_view line) {
    out_.write(line.data(), static_cast<std::streamsize>(line.size()));
    out_.put('\n');
    out_.flush();
    if (!out_) throw ParseError("write failed: " + path_.string());
  }

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace storesim
