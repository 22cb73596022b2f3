#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fatigue {

/// Dense row-major table of learner inputs with named columns.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  explicit FeatureMatrix(std::vector<std::string> names) : names_(std::move(names)) {}

  std::size_t rows() const { return names_.empty() ? 0 : values_.size() / names_.size(); }
  std::size_t cols() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  double at(std::size_t row, std::size_t col) const { return values_[row * names_.size() + col]; }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * names_.size(), names_.size()};
  }

  /// Throws ArityMismatch if `values.size() != cols()`.
  void push_row(std::span<const double> values);

 private:
  std::vector<std::string> names_;
  std::vector<double> values_;
};

}  // namespace fatigue
