#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "cbfs/biclustering.hpp"
#include "cbfs/dataset.hpp"

namespace cbfs::testing {

/// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("cbfs_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// The worked 3-feature example used across the suites:
///   A = [[5,1],[1,5],[10,11]], singleton sample clusters.
/// Feature classification puts features 0 -> cluster 0, 1 and 2 -> cluster 1;
/// selecting everything misclassifies sample 0, dropping feature 2 fixes it.
inline DataMatrix hand_matrix() {
  DataMatrix m;
  m.values = Matrix::from_rows({{5, 1}, {1, 5}, {10, 11}});
  m.feature_names = {"f0", "f1", "f2"};
  m.sample_names = {"s0", "s1"};
  return m;
}

inline SampleClassification singleton_clusters(std::size_t n) {
  SampleClassification c;
  c.k = n;
  c.cluster_of.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    c.cluster_of[j] = j;
    c.class_names.push_back("class_" + std::to_string(j));
  }
  return c;
}

inline SelectionVector selection(std::vector<int> bits) {
  SelectionVector s;
  for (int b : bits) s.x.push_back(b ? 1 : 0);
  return s;
}

}  // namespace cbfs::testing
