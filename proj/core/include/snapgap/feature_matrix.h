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

#ifndef SNAPGAP_FEATURE_MATRIX_H_
#define SNAPGAP_FEATURE_MATRIX_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace snapgap {

// Dense row-major design matrix with named columns.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols,
                std::vector<std::string> names = {});

  static FeatureMatrix FromRows(const std::vector<std::vector<double>>& rows,
                                std::vector<std::string> names = {});

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<std::string>& names() const { return names_; }

  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  std::span<const double> Row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::vector<double> Column(std::size_t c) const;
  void SetColumn(std::size_t c, std::span<const double> values);

  // Subset of rows, in the given order.
  FeatureMatrix SelectRows(std::span<const std::size_t> indices) const;

  bool operator==(const FeatureMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
  std::vector<std::string> names_;
};

// Per-feature centering and scaling learned on training data and replayed
// unchanged on any later matrix.
struct Standardization {
  std::vector<double> means;
  std::vector<double> sds;
  // Features with zero spread; their sd is recorded as 1.
  std::vector<std::size_t> constant_features;

  bool empty() const { return means.empty(); }
  // Throws kFeatureMismatch when the column count differs.
  FeatureMatrix Apply(const FeatureMatrix& x) const;

  bool operator==(const Standardization&) const = default;
};

// Population (1/n) mean and standard deviation per column.
Standardization FitStandardization(const FeatureMatrix& x);

struct StandardizedMatrix {
  FeatureMatrix matrix;
  Standardization standardization;
};

StandardizedMatrix Standardize(const FeatureMatrix& x);

}  // namespace snapgap

#endif  // SNAPGAP_FEATURE_MATRIX_H_
