#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "fatigue/landmarks.hpp"

namespace fatigue {

/// Fatigue is the positive class.
struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fn = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const { return tp + fn + fp + tn; }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct SplitSpec {
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
  bool shuffle = true;
};

/// Row indices of a train/test partition. Train receives the first
/// floor(n * fraction) positions of a seeded shuffle; both index lists are
/// returned in ascending order so partitions keep the source row order.
struct IndexSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

IndexSplit split_indices(std::size_t n, const SplitSpec& spec);

/// Throws EmptyPartition when either side would be empty.
std::pair<Dataset, Dataset> split_dataset(const Dataset& dataset, const SplitSpec& spec);

/// A sample is predicted positive iff its probability is >= threshold.
ConfusionMatrix confusion(std::span<const double> probabilities, std::span<const Label> labels,
                          double decision_threshold = 0.5);

/// (TN + TP) / total. Throws EmptyMatrix.
double accuracy(const ConfusionMatrix& cm);
/// TP / (TP + FN). Throws NoPositives.
double sensitivity(const ConfusionMatrix& cm);

}  // namespace fatigue
