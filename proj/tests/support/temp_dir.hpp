#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>

namespace relog::testing {

class TempDir {
public:
  TempDir() {
    auto tmpl = (std::filesystem::temp_directory_path() / "relog-test-XXXXXX").string();
    path_ = ::mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
};

}  // namespace relog::testing
