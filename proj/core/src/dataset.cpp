#include "cbfs/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "cbfs/errors.hpp"
#include "cbfs/rng.hpp"

namespace cbfs {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_cell(const std::string& cell, const std::filesystem::path& path,
                  std::size_t line_no, std::size_t col_no) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  while (ptr != last && (*ptr == ' ' || *ptr == '\t')) ++ptr;
  if (ec != std::errc{} || ptr != last) {
    std::ostringstream os;
    os << path.string() << ":" << line_no << ": column " << col_no << " ('"
       << cell << "') is not a number";
    throw ParseError(os.str());
  }
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << path.string() << ":" << line_no << ": column " << col_no
       << " is not finite";
    throw ParseError(os.str());
  }
  return v;
}

void check_unique(const std::vector<std::string>& names, const char* what) {
  std::unordered_set<std::string> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second)
      throw ValidationError(std::string("duplicate ") + what + " name: " + n);
  }
}

}  // namespace

void DataMatrix::validate() const {
  if (values.rows() == 0 || values.cols() == 0)
    throw ValidationError("matrix must have at least one feature and one sample");
  if (feature_names.size() != values.rows())
    throw ValidationError("feature name count does not match row count");
  if (sample_names.size() != values.cols())
    throw ValidationError("sample name count does not match column count");
  for (double v : values.data())
    if (!std::isfinite(v)) throw ValidationError("matrix contains a non-finite value");
  check_unique(feature_names, "feature");
  check_unique(sample_names, "sample");
}

std::vector<std::vector<std::size_t>> SampleClassification::members() const {
  std::vector<std::vector<std::size_t>> out(k);
  for (std::size_t j = 0; j < cluster_of.size(); ++j) out[cluster_of[j]].push_back(j);
  return out;
}

std::string SampleClassification::cluster_label(std::size_t r) const {
  if (r < class_names.size() && !class_names[r].empty()) return class_names[r];
  return "cluster_" + std::to_string(r);
}

void SampleClassification::validate() const {
  if (k < 2) throw ValidationError("at least two sample clusters are required");
  if (cluster_of.empty()) throw ValidationError("classification covers no samples");
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t r : cluster_of) {
    if (r >= k) throw ValidationError("cluster index out of range");
    ++counts[r];
  }
  for (std::size_t r = 0; r < k; ++r)
    if (counts[r] == 0)
      throw ValidationError("empty sample cluster: " + cluster_label(r));
  if (!class_names.empty() && class_names.size() != k)
    throw ValidationError("class name count does not match k");
}

void LabeledDataset::validate() const {
  matrix.validate();
  labels.validate();
  if (labels.num_samples() != matrix.num_samples())
    throw ValidationError("labels do not cover exactly the matrix samples");
  if (labels.k > std::min(matrix.num_features(), matrix.num_samples()))
    throw ValidationError("number of clusters exceeds min(features, samples)");
}

DataMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open matrix file: " + path.string());

  std::string line;
  if (!std::getline(in, line))
    throw ParseError(path.string() + ": empty file");
  auto header = split_csv_line(line);
  if (header.size() < 2)
    throw ParseError(path.string() + ":1: header must list at least one sample");

  DataMatrix m;
  m.sample_names.assign(header.begin() + 1, header.end());
  const std::size_t n = m.sample_names.size();

  std::vector<double> data;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (cells.size() != n + 1) {
      std::ostringstream os;
      os << path.string() << ":" << line_no << ": expected " << (n + 1)
         << " fields, got " << cells.size();
      throw ParseError(os.str());
    }
    m.feature_names.push_back(cells[0]);
    for (std::size_t c = 1; c < cells.size(); ++c)
      data.push_back(parse_cell(cells[c], path, line_no, c + 1));
  }
  if (m.feature_names.empty())
    throw ParseError(path.string() + ": no feature rows");

  m.values = Matrix(m.feature_names.size(), n);
  m.values.data() = std::move(data);
  m.validate();
  return m;
}

void save_matrix(const DataMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path.string());
  out << "feature";
  for (const auto& s : m.sample_names) out << ',' << s;
  out << '\n';
  char buf[64];
  for (std::size_t i = 0; i < m.num_features(); ++i) {
    out << m.feature_names[i];
    for (std::size_t j = 0; j < m.num_samples(); ++j) {
      // 17 significant digits: doubles survive the round-trip bit-exactly.
      std::snprintf(buf, sizeof buf, "%.17g", m.values(i, j));
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) throw ValidationError("write failed: " + path.string());
}

SampleClassification load_labels(const std::filesystem::path& path,
                                 const DataMatrix& matrix) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open label file: " + path.string());

  std::unordered_map<std::string, std::size_t> sample_index;
  for (std::size_t j = 0; j < matrix.sample_names.size(); ++j)
    sample_index.emplace(matrix.sample_names[j], j);

  SampleClassification cls;
  cls.cluster_of.assign(matrix.num_samples(), 0);
  std::vector<bool> labeled(matrix.num_samples(), false);
  std::unordered_map<std::string, std::size_t> class_index;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (cells.size() != 2) {
      std::ostringstream os;
      os << path.string() << ":" << line_no << ": expected `sample,class`";
      throw ParseError(os.str());
    }
    auto it = sample_index.find(cells[0]);
    if (it == sample_index.end())
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": unknown sample name: " + cells[0]);
    if (labeled[it->second])
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": sample labeled twice: " + cells[0]);
    auto [cit, inserted] = class_index.emplace(cells[1], cls.class_names.size());
    if (inserted) cls.class_names.push_back(cells[1]);
    cls.cluster_of[it->second] = cit->second;
    labeled[it->second] = true;
  }

  for (std::size_t j = 0; j < labeled.size(); ++j)
    if (!labeled[j])
      throw ValidationError("unlabeled sample: " + matrix.sample_names[j]);

  cls.k = cls.class_names.size();
  cls.validate();
  return cls;
}

void save_labels(const SampleClassification& labels, const DataMatrix& matrix,
                 const std::filesystem::path& path) {
  if (labels.num_samples() != matrix.num_samples())
    throw ValidationError("labels do not match the matrix");
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path.string());
  for (std::size_t j = 0; j < labels.num_samples(); ++j)
    out << matrix.sample_names[j] << ',' << labels.cluster_label(labels.cluster_of[j])
        << '\n';
  if (!out) throw ValidationError("write failed: " + path.string());
}

GeneratedDataset generate_planted(const PlantedParams& p) {
  if (p.signal <= 0) throw ValidationError("signal must be positive");
  if (p.k < 2) throw ValidationError("k must be at least 2");
  if (p.n < p.k) throw ValidationError("need at least k samples");
  if (p.m <= p.noise_features)
    throw ValidationError("need at least one planted feature");
  const std::size_t planted = p.m - p.noise_features;
  if (planted < p.k)
    throw ValidationError("need at least k planted features for a consistent block structure");
  if (p.k > std::min(p.m, p.n))
    throw ValidationError("number of clusters exceeds min(features, samples)");

  Rng rng(p.seed);
  GeneratedDataset g;
  DataMatrix& m = g.data.matrix;
  m.values = Matrix(p.m, p.n);

  SampleClassification& labels = g.data.labels;
  labels.k = p.k;
  labels.cluster_of.resize(p.n);
  for (std::size_t j = 0; j < p.n; ++j) labels.cluster_of[j] = j % p.k;
  for (std::size_t r = 0; r < p.k; ++r)
    labels.class_names.push_back("class_" + std::to_string(r));

  const double s = p.signal;
  const double jit = s / 10.0;
  // Noise rows: classified into cluster 0 by margin d, but with a base level
  // so large that the cluster-0 feature centroid dominates every sample
  // outside S_0 whenever a noise row is selected.
  const double base = 3.0 * s * static_cast<double>(p.m + 2);
  const double d = s / 2.0;

  g.planted_cluster.resize(p.m);
  g.consistent_selection.assign(p.m, 0);

  for (std::size_t i = 0; i < p.m; ++i) {
    m.feature_names.push_back("f" + std::to_string(i));
    if (i < planted) {
      const std::size_t r = i % p.k;
      g.planted_cluster[i] = r;
      g.consistent_selection[i] = 1;
      for (std::size_t j = 0; j < p.n; ++j) {
        const double block = (labels.cluster_of[j] == r) ? s : 0.0;
        m.values(i, j) = block + rng.uniform(-jit, jit);
      }
    } else {
      g.planted_cluster[i] = 0;
      for (std::size_t j = 0; j < p.n; ++j) {
        const double level = (labels.cluster_of[j] == 0) ? base : base - d;
        m.values(i, j) = level + rng.uniform(-d / 8.0, d / 8.0);
      }
    }
  }
  for (std::size_t j = 0; j < p.n; ++j) m.sample_names.push_back("s" + std::to_string(j));

  g.data.role = DatasetRole::train;
  g.data.validate();
  return g;
}

}  // namespace cbfs
