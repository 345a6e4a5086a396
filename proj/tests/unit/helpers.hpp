#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <memory>
#include <string>
#include <vector>

#include <unistd.h>

#include "arcd/data.hpp"
#include "arcd/losses.hpp"

namespace testing {

inline std::shared_ptr<const arcd::Dataset> dense(
    std::initializer_list<std::initializer_list<double>> rows,
    std::initializer_list<double> labels) {
  arcd::DatasetBuilder builder(true);
  auto label = labels.begin();
  std::size_t n = 0;
  for (const auto& r : rows) {
    std::vector<double> v(r);
    n = v.size();
    builder.add_dense_row(v, *label++);
  }
  builder.set_cols(n);
  return std::make_shared<const arcd::Dataset>(std::move(builder).build());
}

inline std::shared_ptr<const arcd::Dataset> share(arcd::Dataset d) {
  return std::make_shared<const arcd::Dataset>(std::move(d));
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("arcd_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }
  std::filesystem::path write(const std::string& name,
                              const std::string& text) const {
    const auto p = path_ / name;
    std::ofstream(p) << text;
    return p;
  }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
