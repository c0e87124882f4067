/*
 * Copyright 2026 The snapgap Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "snapgap/feature_matrix.h"

#include <cmath>

#include "snapgap/error.h"

namespace snapgap {

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols,
                             std::vector<std::string> names)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0), names_(std::move(names)) {
  if (names_.empty()) {
    for (std::size_t c = 0; c < cols; ++c) names_.push_back("x" + std::to_string(c));
  }
  if (names_.size() != cols) {
    throw Error(ErrorKind::kFeatureMismatch, "name count differs from column count");
  }
}

FeatureMatrix FeatureMatrix::FromRows(const std::vector<std::vector<double>>& rows,
                                      std::vector<std::string> names) {
  const std::size_t cols = rows.empty() ? names.size() : rows.front().size();
  FeatureMatrix m(rows.size(), cols, std::move(names));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      throw Error(ErrorKind::kFeatureMismatch, "ragged rows");
    }
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

std::vector<double> FeatureMatrix::Column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

void FeatureMatrix::SetColumn(std::size_t c, std::span<const double> values) {
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
}

FeatureMatrix FeatureMatrix::SelectRows(std::span<const std::size_t> indices) const {
  FeatureMatrix out(indices.size(), cols_, names_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto row = Row(indices[i]);
    std::copy(row.begin(), row.end(), out.data_.begin() + i * cols_);
  }
  return out;
}

FeatureMatrix Standardization::Apply(const FeatureMatrix& x) const {
  if (x.cols() != means.size()) {
    throw Error(ErrorKind::kFeatureMismatch,
                "expected " + std::to_string(means.size()) + " features, got " +
                    std::to_string(x.cols()));
  }
  FeatureMatrix out = x;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      out(r, c) = (x(r, c) - means[c]) / sds[c];
    }
  }
  return out;
}

Standardization FitStandardization(const FeatureMatrix& x) {
  Standardization s;
  const double n = static_cast<double>(x.rows());
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) mean += x(r, c);
    mean /= n;
    double var = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const double d = x(r, c) - mean;
      var += d * d;
    }
    double sd = std::sqrt(var / n);
    if (!(sd > 0.0)) {
      sd = 1.0;
      s.constant_features.push_back(c);
    }
    s.means.push_back(mean);
    s.sds.push_back(sd);
  }
  return s;
}

StandardizedMatrix Standardize(const FeatureMatrix& x) {
  StandardizedMatrix out;
  out.standardization = FitStandardization(x);
  out.matrix = out.standardization.Apply(x);
  return out;
}

}  // namespace snapgap
