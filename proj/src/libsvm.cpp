#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "aels/objectives.hpp"

namespace aels {

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

void SparseDataset::add_row(std::span<const std::size_t> indices, std::span<const double> values,
                            double label) {
  if (indices.size() != values.size()) throw std::invalid_argument("add_row: size mismatch");
  if (label != 1.0 && label != -1.0) throw std::invalid_argument("add_row: label must be -1 or +1");
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= dim) throw std::invalid_argument("add_row: index out of range");
    if (k > 0 && indices[k] <= indices[k - 1]) {
      throw std::invalid_argument("add_row: indices must be strictly increasing");
    }
    col.push_back(indices[k]);
    val.push_back(values[k]);
  }
  row_ptr.push_back(col.size());
  labels.push_back(label);
}

double SparseDataset::dot_row(std::size_t i, const Vector& x) const {
  double s = 0.0;
  for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[static_cast<Eigen::Index>(col[k])];
  return s;
}

void SparseDataset::axpy_row(std::size_t i, double scale, Vector& out) const {
  for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
    out[static_cast<Eigen::Index>(col[k])] += scale * val[k];
  }
}

Vector SparseDataset::dense_row(std::size_t i) const {
  Vector z = Vector::Zero(static_cast<Eigen::Index>(dim));
  axpy_row(i, 1.0, z);
  return z;
}

namespace {

bool parse_double(std::string_view tok, double& out) {
  // std::from_chars for double is available in libstdc++ 11.
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

bool parse_index(std::string_view tok, std::size_t& out) {
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

struct RawRow {
  double label;
  std::vector<std::size_t> idx;  // zero-based
  std::vector<double> val;
};

}  // namespace

SparseDataset parse_libsvm(std::istream& in, std::optional<std::size_t> expected_dim) {
  std::vector<RawRow> raw;
  std::size_t max_index = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream tokens(line);
    std::string tok;
    if (!(tokens >> tok)) continue;

    RawRow row{};
    double label = 0.0;
    if (!parse_double(tok, label)) throw ParseError(lineno, "malformed label '" + tok + "'");
    if (label == 1.0) {
      row.label = 1.0;
    } else if (label == -1.0 || label == 0.0) {
      row.label = -1.0;
    } else {
      throw ParseError(lineno, "label '" + tok + "' outside {0, 1, -1, +1}");
    }

    while (tokens >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) throw ParseError(lineno, "malformed token '" + tok + "'");
      std::size_t index = 0;
      double value = 0.0;
      if (!parse_index(std::string_view(tok).substr(0, colon), index) || index == 0) {
        throw ParseError(lineno, "malformed index in '" + tok + "'");
      }
      if (!parse_double(std::string_view(tok).substr(colon + 1), value)) {
        throw ParseError(lineno, "malformed value in '" + tok + "'");
      }
      if (!row.idx.empty() && index - 1 <= row.idx.back()) {
        throw ParseError(lineno, "indices must be strictly increasing at '" + tok + "'");
      }
      row.idx.push_back(index - 1);
      row.val.push_back(value);
      max_index = std::max(max_index, index);
    }
    raw.push_back(std::move(row));
  }

  std::size_t features = max_index;
  if (expected_dim) {
    if (*expected_dim < max_index) {
      throw ParseError(lineno, "feature index " + std::to_string(max_index) + " exceeds expected dimension " +
                                   std::to_string(*expected_dim));
    }
    features = *expected_dim;
  }

  SparseDataset out;
  out.dim = features + 1;
  out.has_bias = true;
  for (auto& row : raw) {
    row.idx.push_back(features);
    row.val.push_back(1.0);
    out.add_row(row.idx, row.val, row.label);
  }
  return out;
}

SparseDataset parse_libsvm_file(const std::string& path, std::optional<std::size_t> expected_dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset '" + path + "'");
  return parse_libsvm(in, expected_dim);
}

std::string serialize_libsvm(const SparseDataset& data) {
  if (!data.has_bias) throw std::invalid_argument("serialize_libsvm: dataset has no bias column");
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < data.rows(); ++i) {
    out += data.labels[i] > 0 ? "+1" : "-1";
    for (std::size_t k = data.row_ptr[i]; k < data.row_ptr[i + 1]; ++k) {
      if (data.col[k] == data.dim - 1) continue;
      std::snprintf(buf, sizeof buf, " %zu:%.17g", data.col[k] + 1, data.val[k]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

SparseDataset make_synthetic_logistic(std::size_t rows, std::size_t features, std::uint64_t seed) {
  if (rows == 0 || features == 0) throw std::invalid_argument("synthetic dataset must be non-empty");
  RngStream rng(seed);
  const auto n = static_cast<Eigen::Index>(features);
  Vector w(n + 1);
  for (Eigen::Index j = 0; j <= n; ++j) w[j] = rng.normal();

  SparseDataset out;
  out.dim = features + 1;
  out.has_bias = true;
  std::vector<std::size_t> idx(features + 1);
  for (std::size_t j = 0; j <= features; ++j) idx[j] = j;
  std::vector<double> z(features + 1);
  for (std::size_t i = 0; i < rows; ++i) {
    double logit = 0.0;
    for (std::size_t j = 0; j < features; ++j) {
      z[j] = rng.normal();
      logit += w[static_cast<Eigen::Index>(j)] * z[j];
    }
    z[features] = 1.0;
    logit += w[n];
    const double label = rng.uniform() < sigmoid(logit) ? 1.0 : -1.0;
    out.add_row(idx, z, label);
  }
  return out;
}

}  // namespace aels
