#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fatigue/error.hpp"
#include "fatigue/evaluation.hpp"

namespace fatigue {

IndexSplit split_indices(std::size_t n, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw Error(ErrorCode::EmptyPartition, "train_fraction must lie in (0, 1)");
  }
  const auto train_count = static_cast<std::size_t>(std::floor(static_cast<double>(n) * spec.train_fraction));
  if (train_count == 0 || train_count == n) {
    throw Error(ErrorCode::EmptyPartition, "splitting " + std::to_string(n) + " samples at fraction " +
                                               std::to_string(spec.train_fraction) + " leaves a side empty");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (spec.shuffle) {
    std::mt19937_64 rng(spec.seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  IndexSplit out;
  out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train_count));
  out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(train_count), order.end());
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& dataset, const SplitSpec& spec) {
  const auto split = split_indices(dataset.size(), spec);
  Dataset train;
  Dataset test;
  train.provenance = dataset.provenance + " [train]";
  test.provenance = dataset.provenance + " [test]";
  for (std::size_t i : split.train) train.samples.push_back(dataset.samples[i]);
  for (std::size_t i : split.test) test.samples.push_back(dataset.samples[i]);
  return {std::move(train), std::move(test)};
}

ConfusionMatrix confusion(std::span<const double> probabilities, std::span<const Label> labels,
                          double decision_threshold) {
  if (probabilities.size() != labels.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(probabilities.size()) + " probabilities but " +
                                               std::to_string(labels.size()) + " labels");
  }
  if (probabilities.empty()) throw Error(ErrorCode::LengthMismatch, "nothing to evaluate");
  if (!(decision_threshold >= 0.0 && decision_threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidProbability, "decision threshold must lie in [0, 1]");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const double p = probabilities[i];
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidProbability, "probability outside [0, 1]");
    const bool predicted = p >= decision_threshold;
    const bool actual = labels[i] == Label::Fatigue;
    if (actual) {
      ++(predicted ? cm.tp : cm.fn);
    } else {
      ++(predicted ? cm.fp : cm.tn);
    }
  }
  return cm;
}

double accuracy(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw Error(ErrorCode::EmptyMatrix, "confusion matrix is empty");
  return static_cast<double>(cm.tn + cm.tp) / static_cast<double>(cm.total());
}

double sensitivity(const ConfusionMatrix& cm) {
  if (cm.tp + cm.fn == 0) throw Error(ErrorCode::NoPositives, "no actual positives");
  return static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
}

}  // namespace fatigue
